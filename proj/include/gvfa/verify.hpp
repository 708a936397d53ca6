#ifndef GVFA_VERIFY_HPP
#define GVFA_VERIFY_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gvfa/matrix.hpp"
#include "gvfa/random.hpp"

namespace gvfa::verifiers {

/// Accept/reject outcome of one verification run.
///
/// residuals[t] and tolerances[t] are the componentwise |C w - A(B w)| and
/// tau vectors of comparison t; accepted is true iff every residual
/// component in every comparison is <= its tolerance component.
struct Verdict {
    bool accepted = false;
    std::size_t iterations_run = 0;
    double max_residual = 0.0;
    std::vector<std::vector<double>> residuals;
    std::vector<std::vector<double>> tolerances;
    std::string method;
};

/// Checksum-style localization: which rows/columns of C disagree, and the
/// cartesian product of the two index sets as the implicated cells. With
/// two or more faulty cells the product over-approximates, which is the
/// inherent ambiguity of row+column checksums.
struct ChecksumReport {
    std::vector<double> expected_col_checksum;  // one value per column of C
    std::vector<double> actual_col_checksum;
    std::vector<double> expected_row_checksum;  // one value per row of C
    std::vector<double> actual_row_checksum;
    std::vector<std::size_t> mismatched_rows;
    std::vector<std::size_t> mismatched_cols;
    std::vector<std::pair<std::size_t, std::size_t>> implicated_cells;
};

struct LocalizedVerdict {
    Verdict verdict;
    ChecksumReport report;
};

/// Gaussian-projection verification of A x B = C: for each of k fresh
/// standard-normal vectors w, compares C w against A(B w) componentwise
/// under the tolerance policy. The product A x B is never formed; each
/// iteration costs exactly three matrix-vector multiplications. The
/// iteration loop stops at the first rejection.
Verdict gvfa_verify(const DenseMatrix& a, const DenseMatrix& b,
                    const DenseMatrix& c, std::size_t k,
                    random::SeededStream stream, const TolerancePolicy& policy,
                    AccumulationMode mode);

/// Classic randomized verification with fair 0/1 vectors; false-positive
/// probability at most 2^-k.
Verdict freivalds_verify(const DenseMatrix& a, const DenseMatrix& b,
                         const DenseMatrix& c, std::size_t k,
                         random::SeededStream stream,
                         const TolerancePolicy& policy, AccumulationMode mode);

/// Power-ladder variant using w = (1, r, ..., r^{n-1}). Experimental: the
/// ladder limits usable dimensions (range errors propagate from sampling).
Verdict poly_verify(const DenseMatrix& a, const DenseMatrix& b,
                    const DenseMatrix& c, std::size_t k,
                    random::SeededStream stream, const TolerancePolicy& policy,
                    AccumulationMode mode);

/// Two-sided Gaussian projection: checks w_R^T C against (w_R^T A) B and
/// C w_C against A (B w_C). Exactly six matrix-vector multiplications and
/// two vector comparisons. On rejection, mismatched positions of the
/// row-vector comparison implicate columns, mismatched positions of the
/// column-vector comparison implicate rows, and their cartesian product is
/// reported; a single faulty cell is implicated exactly.
LocalizedVerdict gvfa_rowcol_verify(const DenseMatrix& a, const DenseMatrix& b,
                                    const DenseMatrix& c,
                                    random::SeededStream stream,
                                    const TolerancePolicy& policy,
                                    AccumulationMode mode);

/// Deterministic row/column checksum verification. Expected checksums are
/// computed from A and B directly ((column sums of A) B and A (row sums of
/// B)) and compared with the actual column/row sums of C, with the all-ones
/// vector standing in for w in the tolerance formula. Same O(n^2) cost and
/// the same blind spots as carrying checksums through the multiplication:
/// row or column swaps in C are invisible to it.
LocalizedVerdict huang_abraham_verify(const DenseMatrix& a,
                                      const DenseMatrix& b,
                                      const DenseMatrix& c,
                                      AccumulationMode mode,
                                      const TolerancePolicy& policy);

/// The checksum-extended matrices: a_f is A with an appended row of column
/// sums, b_f is B with an appended column of row sums, c_f = a_f x b_f.
struct AugmentedChecksums {
    DenseMatrix a_f;
    DenseMatrix b_f;
    DenseMatrix c_f;
};
AugmentedChecksums huang_abraham_augment(const DenseMatrix& a,
                                         const DenseMatrix& b,
                                         AccumulationMode mode);

/// Verifies M_1 M_2 ... M_N = C with N+1 matrix-vector multiplications per
/// iteration: C w against M_1 (M_2 (... (M_N w))).
Verdict chain_verify(std::span<const DenseMatrix> matrices,
                     const DenseMatrix& c, std::size_t k,
                     random::SeededStream stream, const TolerancePolicy& policy,
                     AccumulationMode mode);

}  // namespace gvfa::verifiers

#endif  // GVFA_VERIFY_HPP
