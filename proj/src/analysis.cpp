#include "gvfa/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <utility>

#include "gvfa/verify.hpp"

namespace gvfa::analysis {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

RowNorms sigma_tilde(const DenseMatrix& delta) {
    RowNorms out;
    out.sigma_rows.resize(delta.rows());
    for (std::size_t i = 0; i < delta.rows(); ++i) {
        double sum_sq = 0.0;
        for (double v : delta.row(i)) sum_sq += v * v;
        out.sigma_rows[i] = std::sqrt(sum_sq);
        if (out.sigma_rows[i] > out.sigma_tilde || std::isnan(out.sigma_rows[i])) {
            out.sigma_tilde = out.sigma_rows[i];
        }
    }
    return out;
}

namespace {

// 2 Phi(x) - 1 for x >= 0, evaluated as erf(x/sqrt(2)): the literal form
// cancels catastrophically when x is near machine-noise scale.
double central_probability(double x) { return std::erf(x / std::sqrt(2.0)); }

}  // namespace

BoundReport theorem2_bound(const DenseMatrix& delta, double epsilon,
                           std::size_t k) {
    if (!(epsilon > 0.0)) {
        throw std::domain_error("epsilon must be positive");
    }
    if (k == 0) {
        throw std::domain_error("iteration count must be positive");
    }
    BoundReport report;
    report.epsilon = epsilon;
    report.k = k;
    auto norms = sigma_tilde(delta);
    report.sigma_tilde = norms.sigma_tilde;
    report.sigma_rows = std::move(norms.sigma_rows);

    if (report.sigma_tilde == 0.0) {
        // Delta = 0: nothing to detect; every bound degenerates to 1.
        report.degenerate = true;
        report.bound_dependent = 1.0;
        report.bound_independent = 1.0;
        report.bound_approx = 1.0;
        report.bound_iterated = 1.0;
        return report;
    }

    report.bound_dependent =
        central_probability(std::fabs(epsilon / report.sigma_tilde));
    double product = 1.0;
    for (double sigma_i : report.sigma_rows) {
        // A zero row of Delta keeps its residual component identically
        // zero; its factor is exactly 1.
        if (sigma_i > 0.0) {
            product *= central_probability(std::fabs(epsilon / sigma_i));
        }
    }
    report.bound_independent = product;
    report.bound_approx = (epsilon / report.sigma_tilde) *
                          std::sqrt(2.0 / 3.14159265358979323846);
    report.bound_iterated =
        std::pow(report.bound_dependent, static_cast<double>(k));
    return report;
}

double tolerance_epsilon(const DenseMatrix& a, const DenseMatrix& b,
                         const DenseMatrix& c, const TolerancePolicy& policy) {
    const std::vector<double> ones(b.cols(), 1.0);
    const auto tau = component_tolerances(a, b, c, ones, policy);
    double max_tau = 0.0;
    for (double t : tau) max_tau = std::max(max_tau, t);
    return max_tau;
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Gvfa: return "gvfa";
        case Method::Freivalds: return "freivalds";
        case Method::Poly: return "poly";
        case Method::GvfaRowcol: return "gvfa-rowcol";
        case Method::HuangAbraham: return "huang-abraham";
        case Method::Chain: return "chain";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "gvfa") return Method::Gvfa;
    if (name == "freivalds") return Method::Freivalds;
    if (name == "poly") return Method::Poly;
    if (name == "gvfa-rowcol") return Method::GvfaRowcol;
    if (name == "huang-abraham") return Method::HuangAbraham;
    if (name == "chain") return Method::Chain;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

const Fixture2x2& paper2x2() {
    static const Fixture2x2 fixture{
        DenseMatrix{{2, 3}, {3, 4}},
        DenseMatrix{{1, -6}, {1, 6}},
        DenseMatrix{{5, 6}, {7, 6}},
    };
    return fixture;
}

namespace {

// Purpose tags keep the matrix-entry streams and the projection-vector
// streams in unrelated parts of the seed space.
constexpr std::uint64_t kTagMatrixA = 0x8BADF00D5EEDA001ull;
constexpr std::uint64_t kTagMatrixB = 0x8BADF00D5EEDA002ull;
constexpr std::uint64_t kTagVerifier = 0x8BADF00D5EEDA003ull;

DenseMatrix random_uniform_matrix(std::size_t rows, std::size_t cols,
                                  random::SeededStream stream) {
    random::RandomStream rng(stream);
    std::vector<double> data(rows * cols);
    for (auto& v : data) v = rng.uniform(-1.0, 1.0);
    return DenseMatrix::from_values(rows, cols, std::move(data));
}

faults::FaultSpec resolve_fault(const ExperimentFault& fault, std::size_t rows,
                                std::size_t cols) {
    if (const auto* spec = std::get_if<faults::FaultSpec>(&fault)) {
        faults::validate(*spec, rows, cols);
        return *spec;
    }
    const auto& adv = std::get<AdversarialPairedColumns>(fault);
    if (adv.first_col >= cols || adv.second_col >= cols ||
        adv.first_col == adv.second_col) {
        throw std::domain_error("adversarial column pair out of range");
    }
    if (!(adv.amplitude != 0.0) || !std::isfinite(adv.amplitude)) {
        throw std::domain_error("adversarial amplitude must be nonzero");
    }
    faults::SparsePerturb sparse;
    sparse.cells.reserve(2 * rows);
    for (std::size_t i = 0; i < rows; ++i) {
        sparse.cells.push_back({i, adv.first_col, -adv.amplitude});
        sparse.cells.push_back({i, adv.second_col, adv.amplitude});
    }
    return sparse;
}

std::string fault_label(const ExperimentFault& fault) {
    if (const auto* spec = std::get_if<faults::FaultSpec>(&fault)) {
        return faults::to_string(*spec);
    }
    return "adversarial-paired-columns";
}

bool run_verifier(Method method, const Instance& inst,
                  const DenseMatrix& c_faulted, std::size_t k,
                  random::SeededStream stream, const TolerancePolicy& policy,
                  AccumulationMode mode) {
    switch (method) {
        case Method::Gvfa:
            return verifiers::gvfa_verify(inst.a, inst.b, c_faulted, k, stream,
                                          policy, mode)
                .accepted;
        case Method::Freivalds:
            return verifiers::freivalds_verify(inst.a, inst.b, c_faulted, k,
                                               stream, policy, mode)
                .accepted;
        case Method::Poly:
            return verifiers::poly_verify(inst.a, inst.b, c_faulted, k, stream,
                                          policy, mode)
                .accepted;
        case Method::GvfaRowcol:
            return verifiers::gvfa_rowcol_verify(inst.a, inst.b, c_faulted,
                                                 stream, policy, mode)
                .verdict.accepted;
        case Method::HuangAbraham:
            return verifiers::huang_abraham_verify(inst.a, inst.b, c_faulted,
                                                   mode, policy)
                .verdict.accepted;
        case Method::Chain: {
            const DenseMatrix links[] = {inst.a, inst.b};
            return verifiers::chain_verify(links, c_faulted, k, stream, policy,
                                           mode)
                .accepted;
        }
    }
    throw std::logic_error("unhandled method");
}

struct Tally {
    std::uint64_t false_positives = 0;
    std::uint64_t detections = 0;
    std::uint64_t neutral = 0;
};

}  // namespace

Instance make_instance(const ExperimentConfig& config, std::uint64_t trial) {
    if (config.source == MatrixSource::Paper2x2) {
        const auto& fx = paper2x2();
        return Instance{fx.a, fx.b, fx.c};
    }
    auto a = random_uniform_matrix(config.n, config.n,
                                   {config.seed ^ kTagMatrixA, trial});
    auto b = random_uniform_matrix(config.n, config.n,
                                   {config.seed ^ kTagMatrixB, trial});
    auto c = oracle_multiply(a, b, config.mode);
    return Instance{std::move(a), std::move(b), std::move(c)};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    if (config.trials == 0) throw std::domain_error("trials must be positive");
    if (config.k == 0) throw std::domain_error("k must be positive");
    const std::size_t n =
        config.source == MatrixSource::Paper2x2 ? 2 : config.n;
    if (n == 0) throw std::domain_error("matrix dimension must be positive");

    const auto t_start = std::chrono::steady_clock::now();
    const auto fault = resolve_fault(config.fault, n, n);
    // Disjoint per-trial index windows: every iteration of every trial and
    // both row/column draws get their own stream.
    const std::uint64_t stride = config.k + 2;

    auto run_trial = [&](std::uint64_t trial, Tally& tally,
                         bool* neutral_out = nullptr) -> bool {
        const auto inst = make_instance(config, trial);
        auto injection = faults::apply_fault(inst.c, fault);
        if (neutral_out) *neutral_out = injection.neutral;
        if (injection.neutral) {
            ++tally.neutral;
            return false;
        }
        const random::SeededStream stream{config.seed ^ kTagVerifier,
                                          trial * stride};
        const bool accepted = run_verifier(config.method, inst,
                                           injection.matrix, config.k, stream,
                                           config.policy, config.mode);
        if (accepted) {
            ++tally.false_positives;
        } else {
            ++tally.detections;
        }
        return true;
    };

    Tally total;
    const std::size_t threads =
        std::max<std::size_t>(1, std::min<std::size_t>(config.threads,
                                                       config.trials));
    if (threads == 1) {
        for (std::uint64_t t = 0; t < config.trials; ++t) run_trial(t, total);
    } else {
        std::vector<std::future<Tally>> futures;
        const std::uint64_t chunk =
            (config.trials + threads - 1) / threads;
        for (std::size_t w = 0; w < threads; ++w) {
            const std::uint64_t lo = w * chunk;
            const std::uint64_t hi =
                std::min<std::uint64_t>(lo + chunk, config.trials);
            if (lo >= hi) break;
            futures.push_back(std::async(std::launch::async, [&, lo, hi]() {
                Tally part;
                for (std::uint64_t t = lo; t < hi; ++t) run_trial(t, part);
                return part;
            }));
        }
        for (auto& f : futures) {
            const Tally part = f.get();
            total.false_positives += part.false_positives;
            total.detections += part.detections;
            total.neutral += part.neutral;
        }
    }

    ExperimentReport report;
    report.method = config.method;
    report.fault_spec = fault_label(config.fault);
    report.n = n;
    report.k = config.k;
    report.trials = config.trials;
    report.false_positives = total.false_positives;
    report.detections = total.detections;
    report.neutral_injections = total.neutral;
    report.seed = config.seed;

    const std::uint64_t effective = config.trials - total.neutral;
    if (effective > 0) {
        const double rate = static_cast<double>(total.false_positives) /
                            static_cast<double>(effective);
        report.empirical_fp_rate = rate;
        const double half =
            1.96 * std::sqrt(rate * (1.0 - rate) /
                             static_cast<double>(effective));
        report.fp_rate_ci_low = std::max(0.0, rate - half);
        report.fp_rate_ci_high = std::min(1.0, rate + half);
    }

    // Theory bound from the first effective injection; for deterministic
    // faults on a fixed source this is the Delta of every trial.
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        const auto inst = make_instance(config, t);
        auto injection = faults::apply_fault(inst.c, fault);
        if (injection.neutral) continue;
        const auto delta =
            faults::delta_of(inst.a, inst.b, injection.matrix, config.mode);
        double eps = tolerance_epsilon(inst.a, inst.b, injection.matrix,
                                       config.policy);
        eps = std::max(eps, std::numeric_limits<double>::min());
        report.bound = theorem2_bound(delta, eps, config.k);
        break;
    }

    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    return report;
}

std::vector<ExperimentReport> magnitude_sweep(const ExperimentConfig& base,
                                              std::span<const double> deltas) {
    if (deltas.empty()) {
        throw std::domain_error("sweep needs at least one delta");
    }
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i])) {
            throw std::domain_error("sweep deltas must be positive and finite");
        }
        if (i > 0 && !(deltas[i] > deltas[i - 1])) {
            throw std::domain_error("sweep deltas must be strictly increasing");
        }
    }
    std::vector<ExperimentReport> reports;
    reports.reserve(deltas.size());
    for (double delta : deltas) {
        ExperimentConfig config = base;
        config.fault = faults::FaultSpec(faults::ElementPerturb{0, 0, delta});
        reports.push_back(run_experiment(config));
    }
    // Detection must not decrease as the fault grows, up to 3-sigma
    // binomial noise (which vanishes at rates 0 and 1, allowing ties).
    for (std::size_t i = 1; i < reports.size(); ++i) {
        const auto rate = [](const ExperimentReport& r) {
            const std::uint64_t eff = r.trials - r.neutral_injections;
            return eff == 0 ? 0.0
                            : static_cast<double>(r.detections) /
                                  static_cast<double>(eff);
        };
        const auto sigma = [&](const ExperimentReport& r) {
            const std::uint64_t eff = r.trials - r.neutral_injections;
            if (eff == 0) return 0.0;
            const double p = rate(r);
            return std::sqrt(p * (1.0 - p) / static_cast<double>(eff));
        };
        const double slack =
            3.0 * std::sqrt(sigma(reports[i - 1]) * sigma(reports[i - 1]) +
                            sigma(reports[i]) * sigma(reports[i]));
        if (rate(reports[i]) < rate(reports[i - 1]) - slack) {
            throw std::runtime_error(
                "magnitude sweep detection rates are not nondecreasing");
        }
    }
    return reports;
}

namespace {

nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

nlohmann::json json_numbers(const std::vector<double>& values) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : values) arr.push_back(json_number(v));
    return arr;
}

}  // namespace

nlohmann::json to_json(const BoundReport& report) {
    return nlohmann::json{
        {"sigma_tilde", json_number(report.sigma_tilde)},
        {"sigma_rows", json_numbers(report.sigma_rows)},
        {"epsilon", json_number(report.epsilon)},
        {"bound_dependent", json_number(report.bound_dependent)},
        {"bound_independent", json_number(report.bound_independent)},
        {"bound_approx", json_number(report.bound_approx)},
        {"k", report.k},
        {"bound_iterated", json_number(report.bound_iterated)},
        {"degenerate", report.degenerate},
    };
}

nlohmann::json to_json(const ExperimentReport& report) {
    return nlohmann::json{
        {"method", to_string(report.method)},
        {"fault_spec", report.fault_spec},
        {"n", report.n},
        {"k", report.k},
        {"trials", report.trials},
        {"false_positives", report.false_positives},
        {"detections", report.detections},
        {"neutral_injections", report.neutral_injections},
        {"empirical_fp_rate", json_number(report.empirical_fp_rate)},
        {"empirical_fp_rate_ci",
         nlohmann::json::array({json_number(report.fp_rate_ci_low),
                                json_number(report.fp_rate_ci_high)})},
        {"bound", to_json(report.bound)},
        {"wall_time", json_number(report.wall_time)},
        {"seed", report.seed},
    };
}

}  // namespace gvfa::analysis
