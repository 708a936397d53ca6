#include "gvfa/verify.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace gvfa::verifiers {

namespace {

void check_triple(const DenseMatrix& a, const DenseMatrix& b,
                  const DenseMatrix& c) {
    if (a.cols() != b.rows()) {
        throw DimensionError("inner dimensions do not compose");
    }
    if (c.rows() != a.rows() || c.cols() != b.cols()) {
        throw DimensionError("product shape does not match C");
    }
}

void check_iterations(std::size_t k) {
    if (k == 0) throw std::domain_error("iteration count must be positive");
}

struct Comparison {
    std::vector<double> residual;
    std::vector<double> tolerance;
    bool within = true;
};

Comparison compare(std::span<const double> lhs, std::span<const double> rhs,
                   std::vector<double> tolerance) {
    Comparison out;
    out.tolerance = std::move(tolerance);
    out.residual.resize(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double r = std::fabs(lhs[i] - rhs[i]);
        out.residual[i] = r;
        // NaN residuals or tolerances fail this test, so corrupted entries
        // always reject.
        if (!(r <= out.tolerance[i])) out.within = false;
    }
    return out;
}

void record(Verdict& v, Comparison cmp) {
    for (double r : cmp.residual) {
        if (std::isnan(r)) {
            v.max_residual = std::numeric_limits<double>::infinity();
        } else if (r > v.max_residual) {
            v.max_residual = r;
        }
    }
    v.residuals.push_back(std::move(cmp.residual));
    v.tolerances.push_back(std::move(cmp.tolerance));
}

using Sampler = std::function<random::ProjectionVector(random::SeededStream)>;

Verdict iterate_projection(const DenseMatrix& a, const DenseMatrix& b,
                           const DenseMatrix& c, std::size_t k,
                           random::SeededStream stream,
                           const TolerancePolicy& policy, AccumulationMode mode,
                           const char* method, const Sampler& sample) {
    check_triple(a, b, c);
    check_iterations(k);
    Verdict v;
    v.method = method;
    v.accepted = true;
    for (std::size_t iter = 0; iter < k; ++iter) {
        // Fresh vector per iteration: advancing the stream index keeps the
        // k draws independent.
        const random::SeededStream s{stream.seed, stream.stream_index + iter};
        const auto omega = sample(s);
        const auto c_proj = matvec(c, omega.values, mode);
        const auto b_proj = matvec(b, omega.values, mode);
        const auto ab_proj = matvec(a, b_proj, mode);
        auto cmp = compare(c_proj, ab_proj,
                           component_tolerances(a, b, c, omega.values, policy));
        const bool within = cmp.within;
        record(v, std::move(cmp));
        ++v.iterations_run;
        if (!within) {
            // A rejection is conclusive; only acceptance needs all k rounds.
            v.accepted = false;
            break;
        }
    }
    return v;
}

}  // namespace

Verdict gvfa_verify(const DenseMatrix& a, const DenseMatrix& b,
                    const DenseMatrix& c, std::size_t k,
                    random::SeededStream stream, const TolerancePolicy& policy,
                    AccumulationMode mode) {
    return iterate_projection(a, b, c, k, stream, policy, mode, "gvfa",
                              [&](random::SeededStream s) {
                                  return random::sample_gaussian(b.cols(), s);
                              });
}

Verdict freivalds_verify(const DenseMatrix& a, const DenseMatrix& b,
                         const DenseMatrix& c, std::size_t k,
                         random::SeededStream stream,
                         const TolerancePolicy& policy, AccumulationMode mode) {
    return iterate_projection(a, b, c, k, stream, policy, mode, "freivalds",
                              [&](random::SeededStream s) {
                                  return random::sample_binary(b.cols(), s);
                              });
}

Verdict poly_verify(const DenseMatrix& a, const DenseMatrix& b,
                    const DenseMatrix& c, std::size_t k,
                    random::SeededStream stream, const TolerancePolicy& policy,
                    AccumulationMode mode) {
    return iterate_projection(a, b, c, k, stream, policy, mode, "poly",
                              [&](random::SeededStream s) {
                                  return random::sample_polynomial(b.cols(), s);
                              });
}

namespace {

std::vector<std::size_t> mismatch_indices(const Comparison& cmp) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cmp.residual.size(); ++i) {
        if (!(cmp.residual[i] <= cmp.tolerance[i])) out.push_back(i);
    }
    return out;
}

void localize(ChecksumReport& report) {
    report.implicated_cells.clear();
    for (std::size_t i : report.mismatched_rows) {
        for (std::size_t j : report.mismatched_cols) {
            report.implicated_cells.emplace_back(i, j);
        }
    }
}

}  // namespace

LocalizedVerdict gvfa_rowcol_verify(const DenseMatrix& a, const DenseMatrix& b,
                                    const DenseMatrix& c,
                                    random::SeededStream stream,
                                    const TolerancePolicy& policy,
                                    AccumulationMode mode) {
    check_triple(a, b, c);
    const auto omega_left = random::sample_gaussian(
        a.rows(), {stream.seed, stream.stream_index});
    const auto omega_right = random::sample_gaussian(
        b.cols(), {stream.seed, stream.stream_index + 1});

    // Row side: w^T C vs (w^T A) B, one value per column of C.
    const auto row_actual = matvec_transposed(c, omega_left.values, mode);
    const auto left_a = matvec_transposed(a, omega_left.values, mode);
    const auto row_expected = matvec_transposed(b, left_a, mode);
    // Column side: C w vs A (B w), one value per row of C.
    const auto col_actual = matvec(c, omega_right.values, mode);
    const auto b_proj = matvec(b, omega_right.values, mode);
    const auto col_expected = matvec(a, b_proj, mode);

    auto row_cmp = compare(
        row_actual, row_expected,
        component_tolerances_left(a, b, c, omega_left.values, policy));
    auto col_cmp = compare(
        col_actual, col_expected,
        component_tolerances(a, b, c, omega_right.values, policy));

    LocalizedVerdict out;
    out.verdict.method = "gvfa-rowcol";
    out.verdict.accepted = row_cmp.within && col_cmp.within;
    out.verdict.iterations_run = 1;
    out.report.expected_col_checksum = row_expected;
    out.report.actual_col_checksum = row_actual;
    out.report.expected_row_checksum = col_expected;
    out.report.actual_row_checksum = col_actual;
    out.report.mismatched_cols = mismatch_indices(row_cmp);
    out.report.mismatched_rows = mismatch_indices(col_cmp);
    localize(out.report);
    record(out.verdict, std::move(row_cmp));
    record(out.verdict, std::move(col_cmp));
    return out;
}

LocalizedVerdict huang_abraham_verify(const DenseMatrix& a,
                                      const DenseMatrix& b,
                                      const DenseMatrix& c,
                                      AccumulationMode mode,
                                      const TolerancePolicy& policy) {
    check_triple(a, b, c);
    const std::vector<double> ones_m(a.rows(), 1.0);
    const std::vector<double> ones_n(b.cols(), 1.0);

    // Expected checksums from A and B alone; actuals from C.
    const auto colsum_a = matvec_transposed(a, ones_m, mode);
    const auto col_expected = matvec_transposed(b, colsum_a, mode);
    const auto col_actual = matvec_transposed(c, ones_m, mode);
    const auto rowsum_b = matvec(b, ones_n, mode);
    const auto row_expected = matvec(a, rowsum_b, mode);
    const auto row_actual = matvec(c, ones_n, mode);

    auto col_cmp = compare(col_actual, col_expected,
                           component_tolerances_left(a, b, c, ones_m, policy));
    auto row_cmp = compare(row_actual, row_expected,
                           component_tolerances(a, b, c, ones_n, policy));

    LocalizedVerdict out;
    out.verdict.method = "huang-abraham";
    out.verdict.accepted = col_cmp.within && row_cmp.within;
    out.verdict.iterations_run = 1;
    out.report.expected_col_checksum = col_expected;
    out.report.actual_col_checksum = col_actual;
    out.report.expected_row_checksum = row_expected;
    out.report.actual_row_checksum = row_actual;
    out.report.mismatched_cols = mismatch_indices(col_cmp);
    out.report.mismatched_rows = mismatch_indices(row_cmp);
    localize(out.report);
    record(out.verdict, std::move(row_cmp));
    record(out.verdict, std::move(col_cmp));
    return out;
}

AugmentedChecksums huang_abraham_augment(const DenseMatrix& a,
                                         const DenseMatrix& b,
                                         AccumulationMode mode) {
    const std::size_t m = a.rows(), p = a.cols(), n = b.cols();
    const std::vector<double> ones_m(m, 1.0);
    const std::vector<double> ones_n(n, 1.0);
    const auto colsum_a = matvec_transposed(a, ones_m, mode);
    const auto rowsum_b = matvec(b, ones_n, mode);

    std::vector<double> af(a.data().begin(), a.data().end());
    af.insert(af.end(), colsum_a.begin(), colsum_a.end());
    DenseMatrix a_f = DenseMatrix::from_values(m + 1, p, std::move(af));

    std::vector<double> bf;
    bf.reserve(p * (n + 1));
    for (std::size_t i = 0; i < p; ++i) {
        const auto row = b.row(i);
        bf.insert(bf.end(), row.begin(), row.end());
        bf.push_back(rowsum_b[i]);
    }
    DenseMatrix b_f = DenseMatrix::from_values(p, n + 1, std::move(bf));

    DenseMatrix c_f = oracle_multiply(a_f, b_f, mode);
    return AugmentedChecksums{std::move(a_f), std::move(b_f), std::move(c_f)};
}

namespace {

std::vector<double> chain_tolerances(std::span<const DenseMatrix> matrices,
                                     const DenseMatrix& c,
                                     std::span<const double> omega,
                                     const TolerancePolicy& policy) {
    if (policy.kind == TolerancePolicy::Kind::Absolute) {
        return std::vector<double>(c.rows(), policy.absolute_value);
    }
    std::vector<double> mag(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) mag[i] = std::fabs(omega[i]);
    std::size_t total_accumulation = 0;
    for (const auto& mtx : matrices) total_accumulation += mtx.cols();
    for (std::size_t idx = matrices.size(); idx-- > 0;) {
        const auto& mtx = matrices[idx];
        std::vector<double> next(mtx.rows(), 0.0);
        for (std::size_t i = 0; i < mtx.rows(); ++i) {
            double acc = 0.0;
            const auto row = mtx.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) {
                acc += std::fabs(row[j]) * mag[j];
            }
            next[i] = acc;
        }
        mag = std::move(next);
    }
    std::vector<double> cw(c.rows(), 0.0);
    for (std::size_t i = 0; i < c.rows(); ++i) {
        double acc = 0.0;
        const auto row = c.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            acc += std::fabs(row[j]) * std::fabs(omega[j]);
        }
        cw[i] = acc;
    }
    const double scale = policy.slack *
                         static_cast<double>(total_accumulation) *
                         policy.unit_roundoff;
    std::vector<double> tau(c.rows());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = scale * (mag[i] + cw[i]);
    return tau;
}

}  // namespace

Verdict chain_verify(std::span<const DenseMatrix> matrices,
                     const DenseMatrix& c, std::size_t k,
                     random::SeededStream stream, const TolerancePolicy& policy,
                     AccumulationMode mode) {
    if (matrices.empty()) {
        throw DimensionError("chain must contain at least one matrix");
    }
    for (std::size_t i = 0; i + 1 < matrices.size(); ++i) {
        if (matrices[i].cols() != matrices[i + 1].rows()) {
            throw DimensionError("chain shapes do not compose at link " +
                                 std::to_string(i));
        }
    }
    if (c.rows() != matrices.front().rows() ||
        c.cols() != matrices.back().cols()) {
        throw DimensionError("chain product shape does not match C");
    }
    check_iterations(k);

    Verdict v;
    v.method = "chain";
    v.accepted = true;
    for (std::size_t iter = 0; iter < k; ++iter) {
        const random::SeededStream s{stream.seed, stream.stream_index + iter};
        const auto omega = random::sample_gaussian(c.cols(), s);
        const auto c_proj = matvec(c, omega.values, mode);
        // Right-to-left ladder: N matrix-vector products, plus C w above.
        std::vector<double> y = omega.values;
        for (std::size_t idx = matrices.size(); idx-- > 0;) {
            y = matvec(matrices[idx], y, mode);
        }
        auto cmp = compare(c_proj, y,
                           chain_tolerances(matrices, c, omega.values, policy));
        const bool within = cmp.within;
        record(v, std::move(cmp));
        ++v.iterations_run;
        if (!within) {
            v.accepted = false;
            break;
        }
    }
    return v;
}

}  // namespace gvfa::verifiers
