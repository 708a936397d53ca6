#ifndef GVFA_MATRIX_HPP
#define GVFA_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvfa {

/// Thrown when matrix shapes do not compose for the requested operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Accumulation discipline for inner products.
///
/// FusedMultiplyAdd performs each `acc += a*b` with a single rounding
/// (std::fma); SeparateRounding rounds the product and the sum separately.
/// The whole library is compiled with -ffp-contract=off so the separate
/// mode really performs two roundings.
enum class AccumulationMode { SeparateRounding, FusedMultiplyAdd };

/// Rectangular row-major binary64 matrix. Immutable after construction and
/// safe to share across concurrent verification trials.
///
/// Validating constructors reject non-finite entries. Fault injection may
/// legitimately produce NaN/Inf; such matrices enter through corrupted().
class DenseMatrix {
public:
    /// Zero-filled rows x cols matrix.
    DenseMatrix(std::size_t rows, std::size_t cols);

    /// Row-major nested-list construction; rejects ragged or non-finite input.
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    /// Validating factory: data.size() must equal rows*cols and every entry
    /// must be finite.
    static DenseMatrix from_values(std::size_t rows, std::size_t cols,
                                   std::vector<double> data);

    /// Non-validating entry path for fault-injected matrices that may carry
    /// NaN/Inf. Shape constraints still apply.
    static DenseMatrix corrupted(std::size_t rows, std::size_t cols,
                                 std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const {
        return data_[i * cols_ + j];
    }
    double at(std::size_t i, std::size_t j) const;

    std::span<const double> data() const noexcept { return data_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * cols_, cols_);
    }

    bool all_finite() const noexcept;

    /// Bit-pattern equality (distinguishes -0.0 from 0.0, compares NaN
    /// payloads). Used to classify neutral fault injections.
    bool bitwise_equal(const DenseMatrix& other) const noexcept;

private:
    struct unchecked_tag {};
    DenseMatrix(unchecked_tag, std::size_t rows, std::size_t cols,
                std::vector<double> data);

    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;

    friend DenseMatrix oracle_multiply(const DenseMatrix&, const DenseMatrix&,
                                       AccumulationMode);
    friend DenseMatrix subtract(const DenseMatrix&, const DenseMatrix&);
};

/// Floating-point comparison policy for residual vectors.
///
/// Componentwise computes tau_i = slack * n * u * [ (|A|(|B||w|))_i +
/// (|C||w|)_i ] with n the inner dimension (b.rows); Absolute uses the same
/// constant in every component.
struct TolerancePolicy {
    enum class Kind { Componentwise, Absolute };

    Kind kind = Kind::Componentwise;
    double slack = 4.0;
    double absolute_value = 0.0;
    double unit_roundoff = 0x1p-53;

    static TolerancePolicy componentwise(double theta = 4.0);
    static TolerancePolicy absolute(double value);
};

/// Ground-truth product via the textbook cubic loop. Deterministic for fixed
/// inputs and mode; per-entry accumulation order is ascending k.
DenseMatrix oracle_multiply(const DenseMatrix& a, const DenseMatrix& b,
                            AccumulationMode mode);

/// y = A x. Counted by the matvec audit (matvec_call_count).
std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x,
                           AccumulationMode mode);

/// y = A^T x without materializing the transpose. Also counted by the audit.
std::vector<double> matvec_transposed(const DenseMatrix& a,
                                      std::span<const double> x,
                                      AccumulationMode mode);

/// Elementwise a - b.
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Per-component tolerances for comparing C w against A(B w).
std::vector<double> component_tolerances(const DenseMatrix& a,
                                         const DenseMatrix& b,
                                         const DenseMatrix& c,
                                         std::span<const double> omega,
                                         const TolerancePolicy& policy);

/// Transposed analog for row-vector projections: tolerances for comparing
/// w^T C against (w^T A) B, one component per column of C.
std::vector<double> component_tolerances_left(const DenseMatrix& a,
                                              const DenseMatrix& b,
                                              const DenseMatrix& c,
                                              std::span<const double> omega,
                                              const TolerancePolicy& policy);

/// Process-wide count of matvec/matvec_transposed invocations. Tests take
/// deltas around a call to audit that verifiers never form the full product.
std::uint64_t matvec_call_count() noexcept;

/// Matrix text format: line 1 is `rows cols`, then rows lines of cols
/// whitespace-separated floating-point literals. Writing uses
/// shortest-round-trip formatting; reading accepts fixed and scientific
/// notation plus inf/nan (non-finite entries construct through the
/// corrupted path, since faulted matrices round-trip through files).
DenseMatrix read_matrix(std::istream& in);
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const DenseMatrix& m);
void write_matrix_file(const std::string& path, const DenseMatrix& m);

}  // namespace gvfa

#endif  // GVFA_MATRIX_HPP
