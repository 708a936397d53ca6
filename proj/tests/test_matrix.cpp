#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "gvfa/matrix.hpp"
#include "test_support.hpp"

using namespace gvfa;
using test::kUnitRoundoff;

namespace {

const DenseMatrix kFixtureA{{2, 3}, {3, 4}};
const DenseMatrix kFixtureB{{1, -6}, {1, 6}};
const DenseMatrix kFixtureC{{5, 6}, {7, 6}};

}  // namespace

TEST_CASE("construction validates shape and finiteness") {
    CHECK_THROWS_AS(DenseMatrix(0, 3), DimensionError);
    CHECK_THROWS_AS(DenseMatrix::from_values(2, 2, {1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(
        DenseMatrix::from_values(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        DenseMatrix::from_values(1, 1, {std::numeric_limits<double>::infinity()}),
        std::invalid_argument);

    const auto corrupt = DenseMatrix::corrupted(
        1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()});
    CHECK_FALSE(corrupt.all_finite());

    const DenseMatrix m(3, 4);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 4);
    CHECK(m(2, 3) == 0.0);
    CHECK_THROWS_AS(m.at(3, 0), std::out_of_range);
}

TEST_CASE("bitwise equality distinguishes signed zero") {
    const auto a = DenseMatrix::from_values(1, 1, {0.0});
    const auto b = DenseMatrix::from_values(1, 1, {-0.0});
    CHECK(a(0, 0) == b(0, 0));
    CHECK_FALSE(a.bitwise_equal(b));
    CHECK(a.bitwise_equal(a));
}

TEST_CASE("oracle_multiply reproduces the worked 2x2 product") {
    const auto c = oracle_multiply(kFixtureA, kFixtureB,
                                   AccumulationMode::SeparateRounding);
    CHECK(c.bitwise_equal(kFixtureC));
    const auto c_fma =
        oracle_multiply(kFixtureA, kFixtureB, AccumulationMode::FusedMultiplyAdd);
    CHECK(c_fma.bitwise_equal(kFixtureC));
}

TEST_CASE("identity times M returns M") {
    const DenseMatrix eye{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const auto m = test::random_matrix(3, 3, {41, 0});
    const auto prod = oracle_multiply(eye, m, AccumulationMode::SeparateRounding);
    CHECK(prod.bitwise_equal(m));
}

TEST_CASE("oracle_multiply shape mismatch") {
    CHECK_THROWS_AS(
        oracle_multiply(DenseMatrix(2, 3), DenseMatrix(2, 3),
                        AccumulationMode::SeparateRounding),
        DimensionError);
}

TEST_CASE("oracle_multiply matches compensated summation within 8u per entry") {
    const auto a = test::random_matrix(5, 4, {7, 1});
    const auto b = test::random_matrix(4, 3, {7, 2});
    for (const auto mode : {AccumulationMode::SeparateRounding,
                            AccumulationMode::FusedMultiplyAdd}) {
        const auto c = oracle_multiply(a, b, mode);
        for (std::size_t i = 0; i < c.rows(); ++i) {
            for (std::size_t j = 0; j < c.cols(); ++j) {
                const double reference = test::kahan_product_entry(a, b, i, j);
                double magnitude = 0.0;
                for (std::size_t k = 0; k < a.cols(); ++k) {
                    magnitude += std::fabs(a(i, k) * b(k, j));
                }
                CHECK(std::fabs(c(i, j) - reference) <=
                      8 * kUnitRoundoff * magnitude);
            }
        }
    }
}

TEST_CASE("matvec reproduces the fixture row sums") {
    const std::vector<double> ones{1.0, 1.0};
    const auto y = matvec(kFixtureC, ones, AccumulationMode::SeparateRounding);
    CHECK(y == std::vector<double>{11.0, 13.0});
}

TEST_CASE("matvec of the zero vector is zero") {
    const auto a = test::random_matrix(6, 5, {11, 0});
    const std::vector<double> zero(5, 0.0);
    const auto y = matvec(a, zero, AccumulationMode::FusedMultiplyAdd);
    for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("matvec shape mismatch") {
    const DenseMatrix a(3, 4);
    CHECK_THROWS_AS(matvec(a, std::vector<double>(3), AccumulationMode::SeparateRounding),
                    DimensionError);
    CHECK_THROWS_AS(
        matvec_transposed(a, std::vector<double>(4), AccumulationMode::SeparateRounding),
        DimensionError);
}

TEST_CASE("matvec stays within n*u of the compensated reference") {
    const auto a = test::random_matrix(64, 64, {13, 0});
    const auto x = test::random_vector(64, {13, 1});
    const auto scale = test::abs_matvec(a, x);
    for (const auto mode : {AccumulationMode::SeparateRounding,
                            AccumulationMode::FusedMultiplyAdd}) {
        const auto y = matvec(a, x, mode);
        const auto reference = test::kahan_matvec(a, x);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(std::fabs(y[i] - reference[i]) <= 64 * kUnitRoundoff * scale[i]);
        }
    }
}

TEST_CASE("matvec_transposed agrees with the compensated transpose reference") {
    const auto a = test::random_matrix(20, 33, {17, 5});
    const auto x = test::random_vector(20, {17, 6});
    const auto y = matvec_transposed(a, x, AccumulationMode::SeparateRounding);
    REQUIRE(y.size() == 33);
    // Reference via an explicitly materialized transpose.
    std::vector<double> at(33 * 20);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < 33; ++j) at[j * 20 + i] = a(i, j);
    }
    const auto atm = DenseMatrix::from_values(33, 20, std::move(at));
    const auto reference = test::kahan_matvec(atm, x);
    const auto scale = test::abs_matvec(atm, x);
    for (std::size_t j = 0; j < y.size(); ++j) {
        CHECK(std::fabs(y[j] - reference[j]) <= 20 * kUnitRoundoff * scale[j]);
    }
}

TEST_CASE("subtract on the worked example") {
    const DenseMatrix c_swapped{{6, 5}, {6, 7}};
    const auto diff = subtract(c_swapped, kFixtureC);
    CHECK(diff.bitwise_equal(DenseMatrix{{1, -1}, {-1, 1}}));
}

TEST_CASE("subtract of a matrix from itself is zero") {
    const auto m = test::random_matrix(4, 7, {19, 0});
    const auto diff = subtract(m, m);
    for (double v : diff.data()) CHECK(v == 0.0);
}

TEST_CASE("subtract is exact per entry") {
    const auto a = test::random_matrix(5, 5, {23, 0});
    const auto b = test::random_matrix(5, 5, {23, 1});
    const auto diff = subtract(a, b);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(diff(i, j) == a(i, j) - b(i, j));
        }
    }
    CHECK_THROWS_AS(subtract(a, DenseMatrix(4, 5)), DimensionError);
}

TEST_CASE("component_tolerances is zero exactly for all-zero inputs") {
    const DenseMatrix z(3, 3);
    const std::vector<double> omega{0.5, -2.0, 1.0};
    const auto tau =
        component_tolerances(z, z, z, omega, TolerancePolicy::componentwise());
    for (double t : tau) CHECK(t == 0.0);

    const auto a = test::random_matrix(3, 3, {29, 0});
    const auto tau_nonzero =
        component_tolerances(a, a, a, omega, TolerancePolicy::componentwise());
    double max_tau = 0.0;
    for (double t : tau_nonzero) max_tau = std::max(max_tau, t);
    CHECK(max_tau > 0.0);
}

TEST_CASE("component_tolerances regression on the worked 2x2 example") {
    // theta*n*u*[|A|(|B||w|) + |C||w|] with w = (1,1), theta = 4, n = 2:
    // |B||w| = (7,7), |A|(7,7) = (35,49), |C||w| = (11,13), so tau is
    // 8u*(46,62) = (368,496)*2^-53 exactly.
    const std::vector<double> omega{1.0, 1.0};
    const auto tau = component_tolerances(kFixtureA, kFixtureB, kFixtureC, omega,
                                          TolerancePolicy::componentwise());
    REQUIRE(tau.size() == 2);
    CHECK(tau[0] == 4.085620730620576e-14);
    CHECK(tau[1] == 5.5067062021407764e-14);
}

TEST_CASE("component_tolerances scales linearly with the data") {
    const auto a = test::random_matrix(6, 4, {31, 0});
    const auto b = test::random_matrix(4, 5, {31, 1});
    const auto c = oracle_multiply(a, b, AccumulationMode::SeparateRounding);
    const auto omega = test::random_vector(5, {31, 2});
    const auto policy = TolerancePolicy::componentwise();

    auto scale10 = [](const DenseMatrix& m) {
        std::vector<double> data(m.data().begin(), m.data().end());
        for (auto& v : data) v *= 10.0;
        return DenseMatrix::from_values(m.rows(), m.cols(), std::move(data));
    };
    const auto tau = component_tolerances(a, b, c, omega, policy);
    const auto tau10 = component_tolerances(scale10(a), scale10(b), scale10(c),
                                            omega, policy);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        // One scaling of each input: within a couple of roundings of 10x.
        CHECK(tau10[i] == doctest::Approx(10.0 * tau[i]).epsilon(1e-14));
    }
}

TEST_CASE("component_tolerances absolute kind and shape checks") {
    const auto policy = TolerancePolicy::absolute(1e-9);
    const auto tau = component_tolerances(kFixtureA, kFixtureB, kFixtureC,
                                          std::vector<double>{1.0, 1.0}, policy);
    for (double t : tau) CHECK(t == 1e-9);

    CHECK_THROWS_AS(component_tolerances(kFixtureA, kFixtureB, kFixtureC,
                                         std::vector<double>{1.0}, policy),
                    DimensionError);
    CHECK_THROWS_AS(component_tolerances(kFixtureA, kFixtureB, DenseMatrix(3, 2),
                                         std::vector<double>{1.0, 1.0}, policy),
                    DimensionError);
    CHECK_THROWS_AS(TolerancePolicy::componentwise(0.0), std::domain_error);
    CHECK_THROWS_AS(TolerancePolicy::absolute(-1.0), std::domain_error);
}

TEST_CASE("oracle product applied to a vector matches the two-hop matvec") {
    for (std::uint64_t seed_index = 0; seed_index < 20; ++seed_index) {
        random::RandomStream shape_rng({101, seed_index});
        const std::size_t n = 2 + static_cast<std::size_t>(shape_rng.next_u64() % 47);
        const auto a = test::random_matrix(n, n, {103, seed_index});
        const auto b = test::random_matrix(n, n, {107, seed_index});
        const auto x = test::random_vector(n, {109, seed_index});
        const auto c = oracle_multiply(a, b, AccumulationMode::SeparateRounding);
        const auto direct = matvec(c, x, AccumulationMode::SeparateRounding);
        const auto two_hop = matvec(a, matvec(b, x, AccumulationMode::SeparateRounding),
                                    AccumulationMode::SeparateRounding);
        const auto bx_mag = test::abs_matvec(b, x);
        const auto scale = test::abs_matvec(a, bx_mag);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::fabs(direct[i] - two_hop[i]) <=
                  2.0 * static_cast<double>(n) * kUnitRoundoff * scale[i]);
        }
    }
}

TEST_CASE("matvec is linear within round-off") {
    // Power-of-two scalings commute exactly with the accumulation.
    for (const double alpha : {0.25, 2.0, 1024.0}) {
        const auto a = test::random_matrix(32, 32, {113, 0});
        auto x = test::random_vector(32, {113, 1});
        const auto base = matvec(a, x, AccumulationMode::SeparateRounding);
        auto scaled_x = x;
        for (auto& v : scaled_x) v *= alpha;
        const auto lhs = matvec(a, scaled_x, AccumulationMode::SeparateRounding);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            CHECK(lhs[i] == alpha * base[i]);
        }
    }
    // General scalings agree within 2u relative per entry at small n.
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const auto a = test::random_matrix(8, 8, {127, trial});
        const auto x = test::random_vector(8, {131, trial});
        random::RandomStream rng({137, trial});
        const double alpha = rng.uniform(0.5, 3.0);
        auto scaled_x = x;
        for (auto& v : scaled_x) v *= alpha;
        const auto lhs = matvec(a, scaled_x, AccumulationMode::SeparateRounding);
        const auto base = matvec(a, x, AccumulationMode::SeparateRounding);
        const auto scale = test::abs_matvec(a, scaled_x);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            CHECK(std::fabs(lhs[i] - alpha * base[i]) <=
                  2.0 * kUnitRoundoff * scale[i]);
        }
    }
}

TEST_CASE("fused and separate matvec agree within n*u componentwise") {
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        const auto a = test::random_matrix(64, 64, {139, trial});
        const auto x = test::random_vector(64, {149, trial});
        const auto sep = matvec(a, x, AccumulationMode::SeparateRounding);
        const auto fused = matvec(a, x, AccumulationMode::FusedMultiplyAdd);
        const auto scale = test::abs_matvec(a, x);
        for (std::size_t i = 0; i < sep.size(); ++i) {
            CHECK(std::fabs(sep[i] - fused[i]) <= 64 * kUnitRoundoff * scale[i]);
        }
    }
}

TEST_CASE("matvec audit counter counts projection multiplications") {
    const auto a = test::random_matrix(5, 5, {151, 0});
    const auto x = test::random_vector(5, {151, 1});
    const auto before = matvec_call_count();
    (void)matvec(a, x, AccumulationMode::SeparateRounding);
    (void)matvec_transposed(a, x, AccumulationMode::SeparateRounding);
    (void)component_tolerances(a, a, oracle_multiply(a, a, AccumulationMode::SeparateRounding),
                               x, TolerancePolicy::componentwise());
    CHECK(matvec_call_count() - before == 2);
}

TEST_CASE("matrix text round-trip is bit-exact") {
    std::vector<double> values{
        0.0,
        -0.0,
        1.0,
        -1.5,
        0.1,
        1e-300,
        -1e300,
        5e-324,                                   // smallest subnormal
        std::numeric_limits<double>::min(),
        std::numeric_limits<double>::max(),
        3.141592653589793,
        -2.2250738585072011e-308,                 // largest subnormal
    };
    random::RandomStream rng({157, 0});
    for (int i = 0; i < 52; ++i) {
        values.push_back(rng.gaussian() * std::pow(10.0, rng.uniform(-30, 30)));
    }
    const auto m = DenseMatrix::from_values(8, 8, values);
    std::stringstream buffer;
    write_matrix(buffer, m);
    const auto back = read_matrix(buffer);
    CHECK(back.bitwise_equal(m));
}

TEST_CASE("matrix reader accepts scientific notation and flexible spacing") {
    std::stringstream in("2 2\n1.5e0   -6E-1\n\n  2.25e2 0.5\n");
    const auto m = read_matrix(in);
    CHECK(m(0, 0) == 1.5);
    CHECK(m(0, 1) == -0.6);
    CHECK(m(1, 0) == 225.0);
    CHECK(m(1, 1) == 0.5);
}

TEST_CASE("matrix reader round-trips non-finite injected values") {
    std::stringstream in("1 3\ninf -inf nan\n");
    const auto m = read_matrix(in);
    CHECK(std::isinf(m(0, 0)));
    CHECK(m(0, 1) < 0);
    CHECK(std::isinf(m(0, 1)));
    CHECK(std::isnan(m(0, 2)));
}

TEST_CASE("matrix reader reports line and column diagnostics") {
    std::stringstream bad_value("2 2\n1 2\n3 x\n");
    try {
        (void)read_matrix(bad_value);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        const std::string message = e.what();
        CHECK(message.find("line 3") != std::string::npos);
        CHECK(message.find("floating-point") != std::string::npos);
    }

    std::stringstream short_data("2 2\n1 2 3\n");
    CHECK_THROWS_AS((void)read_matrix(short_data), std::runtime_error);

    std::stringstream trailing("1 1\n1 2\n");
    CHECK_THROWS_AS((void)read_matrix(trailing), std::runtime_error);

    std::stringstream bad_header("0 2\n");
    CHECK_THROWS_AS((void)read_matrix(bad_header), std::runtime_error);
}
