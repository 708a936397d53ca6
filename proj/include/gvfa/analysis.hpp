#ifndef GVFA_ANALYSIS_HPP
#define GVFA_ANALYSIS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gvfa/faults.hpp"
#include "gvfa/matrix.hpp"
#include "gvfa/random.hpp"

namespace gvfa::analysis {

/// Standard normal CDF, evaluated via erfc for full accuracy in both tails.
double normal_cdf(double x);

/// Per-row Euclidean norms of Delta and their maximum: sigma_rows[i] =
/// sqrt(sum_j Delta_ij^2), sigma_tilde = max_i sigma_rows[i]. Under a
/// standard Gaussian projection, component i of Delta w is N(0,
/// sigma_rows[i]^2), so sigma_tilde is the largest standard deviation any
/// residual component can have.
struct RowNorms {
    double sigma_tilde = 0.0;
    std::vector<double> sigma_rows;
};
RowNorms sigma_tilde(const DenseMatrix& delta);

/// False-positive probability bounds for Gaussian projection at floating
/// point tolerance epsilon.
///
///   bound_dependent   = 2 Phi(|eps/sigma_tilde|) - 1   (no independence
///                       assumption on components of Delta w)
///   bound_independent = prod over nonzero rows of 2 Phi(|eps/sigma_i|) - 1
///   bound_approx      = (eps/sigma_tilde) sqrt(2/pi), the small-argument
///                       linearization of bound_dependent
///   bound_iterated    = bound_dependent^k
///
/// Rows with sigma_i = 0 contribute factor 1 to the independent product:
/// that residual component is identically zero and never witnesses a fault.
/// A Delta of all zeros is degenerate (nothing to detect); all bounds are
/// reported as 1 with the flag set.
struct BoundReport {
    double sigma_tilde = 0.0;
    std::vector<double> sigma_rows;
    double epsilon = 0.0;
    double bound_dependent = 1.0;
    double bound_independent = 1.0;
    double bound_approx = 1.0;
    std::size_t k = 1;
    double bound_iterated = 1.0;
    bool degenerate = false;
};

/// Throws std::domain_error unless epsilon > 0 and k >= 1.
BoundReport theorem2_bound(const DenseMatrix& delta, double epsilon,
                           std::size_t k);

/// The scalar epsilon coupling the componentwise tolerance vector to the
/// probability bounds: the maximum component tolerance evaluated at the
/// all-ones projection vector.
double tolerance_epsilon(const DenseMatrix& a, const DenseMatrix& b,
                         const DenseMatrix& c, const TolerancePolicy& policy);

enum class Method { Gvfa, Freivalds, Poly, GvfaRowcol, HuangAbraham, Chain };

/// CLI method identifiers: gvfa, freivalds, poly, gvfa-rowcol,
/// huang-abraham, chain.
const char* to_string(Method m);
Method parse_method(std::string_view name);

/// Builds the Delta pattern that maximizes binary-vector false positives:
/// column first_col of Delta equals +amplitude, column second_col equals
/// -amplitude, everything else zero. A 0/1 projection vector then cancels
/// the fault exactly when its two entries agree, which happens with
/// probability 1/2 per iteration.
struct AdversarialPairedColumns {
    std::size_t first_col = 0;
    std::size_t second_col = 1;
    double amplitude = 1.0;
};

using ExperimentFault = std::variant<faults::FaultSpec, AdversarialPairedColumns>;

enum class MatrixSource { RandomUniform, Paper2x2 };

/// The built-in 2x2 worked example: A x B = C holds exactly, and swapping
/// the columns of C preserves both its row sums and its column sums, so
/// checksum verification accepts the faulted product.
struct Fixture2x2 {
    DenseMatrix a;
    DenseMatrix b;
    DenseMatrix c;
};
const Fixture2x2& paper2x2();

struct ExperimentConfig {
    Method method = Method::Gvfa;
    std::size_t n = 8;  // square dimension of generated instances
    ExperimentFault fault = faults::FaultSpec(faults::ColSwap{0, 1});
    std::size_t k = 1;
    std::size_t trials = 1;
    std::uint64_t seed = 0xC0FFEE;
    TolerancePolicy policy;
    AccumulationMode mode = AccumulationMode::SeparateRounding;
    MatrixSource source = MatrixSource::RandomUniform;
    std::size_t threads = 1;
};

struct Instance {
    DenseMatrix a;
    DenseMatrix b;
    DenseMatrix c;  // oracle product of a and b
};

/// The (A, B, C) triple a given trial verifies; pure in (config, trial), so
/// trials can run concurrently and in any order.
Instance make_instance(const ExperimentConfig& config, std::uint64_t trial);

/// Monte Carlo tally over seeded trials. Every trial draws an instance,
/// injects the configured fault, runs the configured verifier, and counts
/// acceptance of an effective fault as a false positive.
struct ExperimentReport {
    Method method = Method::Gvfa;
    std::string fault_spec;
    std::size_t n = 0;
    std::size_t k = 1;
    std::size_t trials = 0;
    std::uint64_t false_positives = 0;
    std::uint64_t detections = 0;
    std::uint64_t neutral_injections = 0;
    double empirical_fp_rate = 0.0;
    /// 95% normal-approximation binomial interval around empirical_fp_rate.
    double fp_rate_ci_low = 0.0;
    double fp_rate_ci_high = 0.0;
    BoundReport bound;
    double wall_time = 0.0;  // seconds; excluded from reproducibility
    std::uint64_t seed = 0;
};

/// Throws std::domain_error for trials == 0 or k == 0 and propagates
/// component errors. Reproducible: identical config gives an identical
/// report except wall_time, regardless of threads.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Runs one experiment per perturbation magnitude (ElementPerturb at a
/// fixed cell), checking that detection rates are nondecreasing in delta up
/// to 3-sigma binomial noise; throws std::runtime_error if that fails.
/// deltas must be positive and strictly increasing.
std::vector<ExperimentReport> magnitude_sweep(const ExperimentConfig& base,
                                              std::span<const double> deltas);

nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const ExperimentReport& report);

}  // namespace gvfa::analysis

#endif  // GVFA_ANALYSIS_HPP
