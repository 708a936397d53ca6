#include "gvfa/matrix.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>
#include <utility>

namespace gvfa {

namespace {

std::atomic<std::uint64_t> g_matvec_calls{0};

void check_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("matrix dimensions must be positive");
    }
}

void check_product_shapes(const DenseMatrix& a, const DenseMatrix& b,
                          const DenseMatrix& c) {
    if (a.cols() != b.rows()) {
        throw DimensionError("inner dimensions do not compose");
    }
    if (c.rows() != a.rows() || c.cols() != b.cols()) {
        throw DimensionError("product shape does not match C");
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    check_shape(rows, cols);
}

DenseMatrix::DenseMatrix(unchecked_tag, std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {}

DenseMatrix DenseMatrix::from_values(std::size_t rows, std::size_t cols,
                                     std::vector<double> data) {
    check_shape(rows, cols);
    if (data.size() != rows * cols) {
        throw DimensionError("data length must equal rows*cols");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(
                "non-finite entry rejected; corrupted() is the entry path "
                "for fault-injected data");
        }
    }
    return DenseMatrix(unchecked_tag{}, rows, cols, std::move(data));
}

DenseMatrix DenseMatrix::corrupted(std::size_t rows, std::size_t cols,
                                   std::vector<double> data) {
    check_shape(rows, cols);
    if (data.size() != rows * cols) {
        throw DimensionError("data length must equal rows*cols");
    }
    return DenseMatrix(unchecked_tag{}, rows, cols, std::move(data));
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    check_shape(rows_, cols_);
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("ragged initializer");
        }
        for (double v : r) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("non-finite entry rejected");
            }
            data_.push_back(v);
        }
    }
}

double DenseMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
        throw std::out_of_range("matrix index out of range");
    }
    return data_[i * cols_ + j];
}

bool DenseMatrix::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool DenseMatrix::bitwise_equal(const DenseMatrix& other) const noexcept {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    return std::memcmp(data_.data(), other.data_.data(),
                       data_.size() * sizeof(double)) == 0;
}

TolerancePolicy TolerancePolicy::componentwise(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::domain_error("slack must be positive and finite");
    }
    TolerancePolicy p;
    p.kind = Kind::Componentwise;
    p.slack = theta;
    return p;
}

TolerancePolicy TolerancePolicy::absolute(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::domain_error("absolute tolerance must be nonnegative");
    }
    TolerancePolicy p;
    p.kind = Kind::Absolute;
    p.absolute_value = value;
    return p;
}

DenseMatrix oracle_multiply(const DenseMatrix& a, const DenseMatrix& b,
                            AccumulationMode mode) {
    if (a.cols() != b.rows()) {
        throw DimensionError("inner dimensions do not compose");
    }
    const std::size_t m = a.rows(), p = a.cols(), n = b.cols();
    std::vector<double> out(m * n, 0.0);
    // i-k-j order: per entry, this is the textbook ascending-k accumulation
    // (bit-identical to the i-j-k loop) with stride-1 inner access.
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a.data().data() + i * p;
        double* orow = out.data() + i * n;
        for (std::size_t kk = 0; kk < p; ++kk) {
            const double aik = arow[kk];
            const double* brow = b.data().data() + kk * n;
            if (mode == AccumulationMode::FusedMultiplyAdd) {
                for (std::size_t j = 0; j < n; ++j) {
                    orow[j] = std::fma(aik, brow[j], orow[j]);
                }
            } else {
                for (std::size_t j = 0; j < n; ++j) {
                    orow[j] += aik * brow[j];
                }
            }
        }
    }
    return DenseMatrix(DenseMatrix::unchecked_tag{}, m, n, std::move(out));
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x,
                           AccumulationMode mode) {
    if (a.cols() != x.size()) {
        throw DimensionError("matvec: vector length must equal cols");
    }
    g_matvec_calls.fetch_add(1, std::memory_order_relaxed);
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data().data() + i * n;
        double acc = 0.0;
        if (mode == AccumulationMode::FusedMultiplyAdd) {
            for (std::size_t j = 0; j < n; ++j) acc = std::fma(row[j], x[j], acc);
        } else {
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        }
        y[i] = acc;
    }
    return y;
}

std::vector<double> matvec_transposed(const DenseMatrix& a,
                                      std::span<const double> x,
                                      AccumulationMode mode) {
    if (a.rows() != x.size()) {
        throw DimensionError("matvec_transposed: vector length must equal rows");
    }
    g_matvec_calls.fetch_add(1, std::memory_order_relaxed);
    const std::size_t m = a.rows(), n = a.cols();
    // Accumulates y += x_i * row_i, which preserves the ascending-index
    // summation order of an explicit transpose.
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data().data() + i * n;
        const double xi = x[i];
        if (mode == AccumulationMode::FusedMultiplyAdd) {
            for (std::size_t j = 0; j < n; ++j) y[j] = std::fma(xi, row[j], y[j]);
        } else {
            for (std::size_t j = 0; j < n; ++j) y[j] += xi * row[j];
        }
    }
    return y;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("subtract: shapes must match");
    }
    std::vector<double> out(a.data().begin(), a.data().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.data()[i];
    return DenseMatrix(DenseMatrix::unchecked_tag{}, a.rows(), a.cols(),
                       std::move(out));
}

std::uint64_t matvec_call_count() noexcept {
    return g_matvec_calls.load(std::memory_order_relaxed);
}

namespace {

// |A| x applied without going through the audited matvec entry points;
// tolerance evaluation is comparison plumbing, not projection work.
std::vector<double> abs_matvec(const DenseMatrix& a,
                               std::span<const double> x_abs) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data().data() + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += std::fabs(row[j]) * x_abs[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> abs_matvec_transposed(const DenseMatrix& a,
                                          std::span<const double> x_abs) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data().data() + i * n;
        const double xi = x_abs[i];
        for (std::size_t j = 0; j < n; ++j) y[j] += xi * std::fabs(row[j]);
    }
    return y;
}

std::vector<double> abs_of(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::fabs(x[i]);
    return out;
}

}  // namespace

std::vector<double> component_tolerances(const DenseMatrix& a,
                                         const DenseMatrix& b,
                                         const DenseMatrix& c,
                                         std::span<const double> omega,
                                         const TolerancePolicy& policy) {
    check_product_shapes(a, b, c);
    if (omega.size() != b.cols()) {
        throw DimensionError("omega length must equal B columns");
    }
    if (policy.kind == TolerancePolicy::Kind::Absolute) {
        return std::vector<double>(c.rows(), policy.absolute_value);
    }
    const auto w = abs_of(omega);
    const auto bw = abs_matvec(b, w);
    const auto abw = abs_matvec(a, bw);
    const auto cw = abs_matvec(c, w);
    const double scale =
        policy.slack * static_cast<double>(b.rows()) * policy.unit_roundoff;
    std::vector<double> tau(c.rows());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = scale * (abw[i] + cw[i]);
    return tau;
}

std::vector<double> component_tolerances_left(const DenseMatrix& a,
                                              const DenseMatrix& b,
                                              const DenseMatrix& c,
                                              std::span<const double> omega,
                                              const TolerancePolicy& policy) {
    check_product_shapes(a, b, c);
    if (omega.size() != a.rows()) {
        throw DimensionError("omega length must equal A rows");
    }
    if (policy.kind == TolerancePolicy::Kind::Absolute) {
        return std::vector<double>(c.cols(), policy.absolute_value);
    }
    const auto w = abs_of(omega);
    const auto wa = abs_matvec_transposed(a, w);
    const auto wab = abs_matvec_transposed(b, wa);
    const auto wc = abs_matvec_transposed(c, w);
    const double scale =
        policy.slack * static_cast<double>(b.rows()) * policy.unit_roundoff;
    std::vector<double> tau(c.cols());
    for (std::size_t j = 0; j < tau.size(); ++j) tau[j] = scale * (wab[j] + wc[j]);
    return tau;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, std::size_t column,
                             const std::string& what) {
    std::ostringstream msg;
    msg << "matrix parse error at line " << line << ", column " << column
        << ": " << what;
    throw std::runtime_error(msg.str());
}

// Scans one whitespace-delimited token, tracking line/column for
// diagnostics.
struct TokenReader {
    std::istream& in;
    std::size_t line = 1;
    std::size_t column = 0;

    bool next(std::string& token, std::size_t& tok_line, std::size_t& tok_col) {
        token.clear();
        int ch;
        while ((ch = in.get()) != EOF) {
            ++column;
            if (ch == '\n') {
                ++line;
                column = 0;
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                break;
            }
        }
        if (ch == EOF) return false;
        tok_line = line;
        tok_col = column;
        token.push_back(static_cast<char>(ch));
        while ((ch = in.peek()) != EOF &&
               !std::isspace(static_cast<unsigned char>(ch))) {
            in.get();
            ++column;
            token.push_back(static_cast<char>(ch));
        }
        return true;
    }
};

double parse_double_token(const std::string& token, std::size_t line,
                          std::size_t col) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value,
                                     std::chars_format::general);
    if (ec != std::errc() || ptr != last) {
        parse_fail(line, col, "expected a floating-point value, got '" + token + "'");
    }
    return value;
}

std::size_t parse_size_token(const std::string& token, std::size_t line,
                             std::size_t col, const char* what) {
    std::size_t value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value == 0) {
        parse_fail(line, col,
                   std::string("expected a positive integer ") + what +
                       ", got '" + token + "'");
    }
    return value;
}

}  // namespace

DenseMatrix read_matrix(std::istream& in) {
    TokenReader reader{in};
    std::string token;
    std::size_t tl = 1, tc = 1;

    if (!reader.next(token, tl, tc)) parse_fail(1, 1, "missing 'rows cols' header");
    const std::size_t rows = parse_size_token(token, tl, tc, "row count");
    if (!reader.next(token, tl, tc)) parse_fail(tl, tc + 1, "missing column count");
    const std::size_t cols = parse_size_token(token, tl, tc, "column count");

    std::vector<double> data;
    data.reserve(rows * cols);
    for (std::size_t idx = 0; idx < rows * cols; ++idx) {
        if (!reader.next(token, tl, tc)) {
            parse_fail(reader.line, reader.column + 1,
                       "expected " + std::to_string(rows * cols) +
                           " values, got " + std::to_string(idx));
        }
        data.push_back(parse_double_token(token, tl, tc));
    }
    if (reader.next(token, tl, tc)) {
        parse_fail(tl, tc, "trailing content after " +
                               std::to_string(rows * cols) + " values");
    }
    // Files may carry fault-injected non-finite entries; route through the
    // corrupted path so they can round-trip (verifiers reject them anyway).
    return DenseMatrix::corrupted(rows, cols, std::move(data));
}

DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open matrix file: " + path);
    }
    try {
        return read_matrix(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

namespace {

void append_shortest(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.append(buf, ptr);
}

}  // namespace

void write_matrix(std::ostream& out, const DenseMatrix& m) {
    std::string text;
    text.reserve(m.rows() * m.cols() * 12);
    text += std::to_string(m.rows());
    text += ' ';
    text += std::to_string(m.cols());
    text += '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) text += ' ';
            append_shortest(text, m(i, j));
        }
        text += '\n';
    }
    out << text;
}

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open matrix file for writing: " + path);
    }
    write_matrix(out, m);
    if (!out) {
        throw std::runtime_error("failed writing matrix file: " + path);
    }
}

}  // namespace gvfa
