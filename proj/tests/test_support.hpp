// Shared helpers for the test suites: compensated-summation references that
// stay independent of the library's accumulation paths, and small matrix
// generators.
#ifndef GVFA_TEST_SUPPORT_HPP
#define GVFA_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gvfa/matrix.hpp"
#include "gvfa/random.hpp"

namespace gvfa::test {

// Kahan-compensated dot product; reference oracle for matvec/oracle_multiply.
inline double kahan_dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double term = a[i] * b[i] - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return sum;
}

inline std::vector<double> kahan_matvec(const DenseMatrix& m,
                                        std::span<const double> x) {
    std::vector<double> y(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) y[i] = kahan_dot(m.row(i), x);
    return y;
}

inline double kahan_product_entry(const DenseMatrix& a, const DenseMatrix& b,
                                  std::size_t i, std::size_t j) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) {
        const double term = a(i, k) * b(k, j) - carry;
        const double next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    return sum;
}

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols,
                                 random::SeededStream stream, double lo = -1.0,
                                 double hi = 1.0) {
    random::RandomStream rng(stream);
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = rng.uniform(lo, hi);
    return DenseMatrix::from_values(rows, cols, std::move(data));
}

inline std::vector<double> random_vector(std::size_t n,
                                         random::SeededStream stream,
                                         double lo = -1.0, double hi = 1.0) {
    random::RandomStream rng(stream);
    std::vector<double> data(n);
    for (auto& v : data) v = rng.uniform(lo, hi);
    return data;
}

// Componentwise |m| x for deriving error-bound scales in tests.
inline std::vector<double> abs_matvec(const DenseMatrix& m,
                                      std::span<const double> x) {
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        const auto row = m.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            acc += std::fabs(row[j]) * std::fabs(x[j]);
        }
        y[i] = acc;
    }
    return y;
}

inline constexpr double kUnitRoundoff = 0x1p-53;

}  // namespace gvfa::test

#endif  // GVFA_TEST_SUPPORT_HPP
