#include "gvfa/cli.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gvfa/analysis.hpp"
#include "gvfa/faults.hpp"
#include "gvfa/matrix.hpp"
#include "gvfa/random.hpp"
#include "gvfa/verify.hpp"

namespace gvfa::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

TolerancePolicy parse_tolerance(const std::string& text) {
    if (text == "auto") return TolerancePolicy::componentwise(4.0);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                     value, std::chars_format::general);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("--tolerance expects 'auto' or a number, got '" +
                                    text + "'");
    }
    return TolerancePolicy::absolute(value);
}

AccumulationMode mode_of(bool fma) {
    return fma ? AccumulationMode::FusedMultiplyAdd
               : AccumulationMode::SeparateRounding;
}

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

nlohmann::json checksum_json(const verifiers::ChecksumReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [r, c] : report.implicated_cells) {
        cells.push_back(nlohmann::json::array({r, c}));
    }
    return nlohmann::json{
        {"expected_col_checksum", json_numbers(report.expected_col_checksum)},
        {"actual_col_checksum", json_numbers(report.actual_col_checksum)},
        {"expected_row_checksum", json_numbers(report.expected_row_checksum)},
        {"actual_row_checksum", json_numbers(report.actual_row_checksum)},
        {"mismatched_rows", report.mismatched_rows},
        {"mismatched_cols", report.mismatched_cols},
        {"implicated_cells", cells},
    };
}

nlohmann::json verdict_json(const verifiers::Verdict& v) {
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& r : v.residuals) residuals.push_back(json_numbers(r));
    nlohmann::json tolerances = nlohmann::json::array();
    for (const auto& t : v.tolerances) tolerances.push_back(json_numbers(t));
    return nlohmann::json{
        {"method", v.method},
        {"accepted", v.accepted},
        {"iterations_run", v.iterations_run},
        {"max_residual", json_number(v.max_residual)},
        {"residuals", residuals},
        {"tolerances", tolerances},
    };
}

constexpr const char* kChecksumBlindSpotNote =
    "checksum match is not proof of correctness: row/column exchanges "
    "preserve both checksum vectors";

void print_verdict_text(std::ostream& out, const verifiers::Verdict& v,
                        const verifiers::ChecksumReport* report) {
    out << "method=" << v.method << " accepted=" << (v.accepted ? "true" : "false")
        << " iterations_run=" << v.iterations_run
        << " max_residual=" << v.max_residual << "\n";
    if (report && !v.accepted) {
        out << "mismatched_rows=[";
        for (std::size_t i = 0; i < report->mismatched_rows.size(); ++i) {
            out << (i ? "," : "") << report->mismatched_rows[i];
        }
        out << "] mismatched_cols=[";
        for (std::size_t i = 0; i < report->mismatched_cols.size(); ++i) {
            out << (i ? "," : "") << report->mismatched_cols[i];
        }
        out << "] implicated_cells=[";
        for (std::size_t i = 0; i < report->implicated_cells.size(); ++i) {
            const auto& [r, c] = report->implicated_cells[i];
            out << (i ? "," : "") << "(" << r << "," << c << ")";
        }
        out << "]\n";
    }
    if (v.method == "huang-abraham" && v.accepted) {
        out << "note: " << kChecksumBlindSpotNote << "\n";
    }
}

struct VerifyOptions {
    std::string method;
    std::string a_path;
    std::string b_path;
    std::string c_path;
    std::vector<std::string> chain_paths;
    std::size_t k = 1;
    std::uint64_t seed = kDefaultSeed;
    std::string tolerance = "auto";
    std::string output = "text";
    bool fma = false;
};

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
    const auto policy = parse_tolerance(opt.tolerance);
    const auto mode = mode_of(opt.fma);
    const auto method = analysis::parse_method(opt.method);
    const random::SeededStream stream{opt.seed, 0};

    const DenseMatrix c = read_matrix_file(opt.c_path);
    verifiers::Verdict verdict;
    std::optional<verifiers::ChecksumReport> report;

    if (method == analysis::Method::Chain) {
        if (opt.chain_paths.empty()) {
            throw std::invalid_argument("--method chain requires --chain files");
        }
        std::vector<DenseMatrix> links;
        links.reserve(opt.chain_paths.size());
        for (const auto& path : opt.chain_paths) {
            links.push_back(read_matrix_file(path));
        }
        verdict = verifiers::chain_verify(links, c, opt.k, stream, policy, mode);
    } else {
        if (opt.a_path.empty() || opt.b_path.empty()) {
            throw std::invalid_argument("method requires -A and -B files");
        }
        const DenseMatrix a = read_matrix_file(opt.a_path);
        const DenseMatrix b = read_matrix_file(opt.b_path);
        switch (method) {
            case analysis::Method::Gvfa:
                verdict = verifiers::gvfa_verify(a, b, c, opt.k, stream, policy,
                                                 mode);
                break;
            case analysis::Method::Freivalds:
                verdict = verifiers::freivalds_verify(a, b, c, opt.k, stream,
                                                      policy, mode);
                break;
            case analysis::Method::Poly:
                verdict = verifiers::poly_verify(a, b, c, opt.k, stream, policy,
                                                 mode);
                break;
            case analysis::Method::GvfaRowcol: {
                auto localized =
                    verifiers::gvfa_rowcol_verify(a, b, c, stream, policy, mode);
                verdict = std::move(localized.verdict);
                report = std::move(localized.report);
                break;
            }
            case analysis::Method::HuangAbraham: {
                auto localized =
                    verifiers::huang_abraham_verify(a, b, c, mode, policy);
                verdict = std::move(localized.verdict);
                report = std::move(localized.report);
                break;
            }
            case analysis::Method::Chain:
                break;  // handled above
        }
    }

    if (opt.output == "json") {
        auto j = verdict_json(verdict);
        if (report) j["checksum_report"] = checksum_json(*report);
        if (verdict.method == "huang-abraham" && verdict.accepted) {
            j["note"] = kChecksumBlindSpotNote;
        }
        out << j.dump(2) << "\n";
    } else {
        print_verdict_text(out, verdict, report ? &*report : nullptr);
    }
    return verdict.accepted ? kExitAccepted : kExitRejected;
}

struct InjectOptions {
    std::string c_path;
    std::string fault;
    std::string out_path;
    std::string output = "text";
};

int cmd_inject(const InjectOptions& opt, std::ostream& out) {
    const DenseMatrix c = read_matrix_file(opt.c_path);
    const auto spec = faults::parse_fault(opt.fault);
    auto injection = faults::apply_fault(c, spec);
    write_matrix_file(opt.out_path, injection.matrix);
    if (opt.output == "json") {
        out << nlohmann::json{{"fault", faults::to_string(spec)},
                              {"output", opt.out_path},
                              {"neutral", injection.neutral}}
                   .dump(2)
            << "\n";
    } else {
        out << "fault=" << faults::to_string(spec)
            << " neutral=" << (injection.neutral ? "true" : "false")
            << " output=" << opt.out_path << "\n";
    }
    return injection.neutral ? kExitNeutral : kExitAccepted;
}

struct ExperimentOptions {
    std::string method;
    std::size_t n = 8;
    std::string fault;
    std::size_t k = 1;
    std::size_t trials = 1;
    std::uint64_t seed = kDefaultSeed;
    std::string tolerance = "auto";
    std::string fixture;
    std::vector<double> sweep;
    std::size_t threads = 1;
    bool fma = false;
};

int cmd_experiment(const ExperimentOptions& opt, std::ostream& out) {
    analysis::ExperimentConfig config;
    config.method = analysis::parse_method(opt.method);
    config.n = opt.n;
    config.k = opt.k;
    config.trials = opt.trials;
    config.seed = opt.seed;
    config.policy = parse_tolerance(opt.tolerance);
    config.mode = mode_of(opt.fma);
    config.threads = opt.threads;
    if (!opt.fixture.empty()) {
        if (opt.fixture != "paper2x2") {
            throw std::invalid_argument("unknown fixture '" + opt.fixture + "'");
        }
        config.source = analysis::MatrixSource::Paper2x2;
    }

    if (!opt.sweep.empty()) {
        auto reports = analysis::magnitude_sweep(config, opt.sweep);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(analysis::to_json(r));
        out << arr.dump(2) << "\n";
        return kExitAccepted;
    }

    if (opt.fault.empty()) {
        throw std::invalid_argument("--fault or --sweep is required");
    }
    if (opt.fault == "adversarial-paired-columns") {
        config.fault = analysis::AdversarialPairedColumns{};
    } else {
        config.fault = faults::parse_fault(opt.fault);
    }
    const auto report = analysis::run_experiment(config);
    out << analysis::to_json(report).dump(2) << "\n";
    return kExitAccepted;
}

struct BoundOptions {
    std::string delta_path;
    std::string a_path;
    std::string b_path;
    std::string c_path;
    double epsilon = 1e-12;
    std::size_t k = 1;
    bool fma = false;
};

int cmd_bound(const BoundOptions& opt, std::ostream& out) {
    std::optional<DenseMatrix> delta;
    if (!opt.delta_path.empty()) {
        delta = read_matrix_file(opt.delta_path);
    } else {
        if (opt.a_path.empty() || opt.b_path.empty() || opt.c_path.empty()) {
            throw std::invalid_argument(
                "bound requires --delta or all of -A, -B, -C");
        }
        delta = faults::delta_of(read_matrix_file(opt.a_path),
                                 read_matrix_file(opt.b_path),
                                 read_matrix_file(opt.c_path),
                                 mode_of(opt.fma));
    }
    const auto report = analysis::theorem2_bound(*delta, opt.epsilon, opt.k);
    out << analysis::to_json(report).dump(2) << "\n";
    return kExitAccepted;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"randomized matrix product verification"};
    app.name("gvfa");
    app.require_subcommand(1);

    VerifyOptions vopt;
    auto* verify = app.add_subcommand(
        "verify", "verify that A x B = C (exit 0 accept, 1 reject)");
    verify->add_option("--method", vopt.method, "verification method")
        ->required()
        ->check(CLI::IsMember({"gvfa", "freivalds", "poly", "gvfa-rowcol",
                               "huang-abraham", "chain"}));
    auto* va = verify->add_option("-A,--a-file", vopt.a_path, "left factor file");
    auto* vb = verify->add_option("-B,--b-file", vopt.b_path, "right factor file");
    verify->add_option("-C,--c-file", vopt.c_path, "claimed product file")
        ->required();
    auto* vchain = verify
                       ->add_option("--chain", vopt.chain_paths,
                                    "comma-separated factor files for chain")
                       ->delimiter(',');
    vchain->excludes(va)->excludes(vb);
    va->excludes(vchain);
    vb->excludes(vchain);
    verify->add_option("--k", vopt.k, "iteration count")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", vopt.seed, "random seed (default 0xC0FFEE)");
    verify->add_option("--tolerance", vopt.tolerance,
                       "'auto' (componentwise) or an absolute value");
    verify->add_option("--output", vopt.output, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    verify->add_flag("--fma", vopt.fma, "fused multiply-add accumulation");

    InjectOptions iopt;
    auto* inject = app.add_subcommand(
        "inject", "write a faulted copy of a matrix (exit 3 if neutral)");
    inject->add_option("-C,--c-file", iopt.c_path, "matrix file")->required();
    inject->add_option("--fault", iopt.fault, "fault grammar string")
        ->required();
    inject->add_option("-o,--out", iopt.out_path, "output file")->required();
    inject->add_option("--output", iopt.output, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    ExperimentOptions eopt;
    auto* experiment = app.add_subcommand(
        "experiment", "Monte Carlo false-positive/detection experiment (JSON)");
    experiment->add_option("--method", eopt.method, "verification method")
        ->required()
        ->check(CLI::IsMember({"gvfa", "freivalds", "poly", "gvfa-rowcol",
                               "huang-abraham", "chain"}));
    experiment->add_option("--n", eopt.n, "square instance dimension")
        ->check(CLI::PositiveNumber);
    experiment->add_option("--fault", eopt.fault,
                           "fault grammar string or adversarial-paired-columns");
    experiment->add_option("--k", eopt.k, "iteration count")
        ->check(CLI::PositiveNumber);
    experiment->add_option("--trials", eopt.trials, "number of trials")
        ->check(CLI::PositiveNumber);
    experiment->add_option("--seed", eopt.seed, "random seed");
    experiment->add_option("--tolerance", eopt.tolerance,
                           "'auto' or an absolute value");
    experiment->add_option("--fixture", eopt.fixture,
                           "named fixture (paper2x2)");
    experiment
        ->add_option("--sweep", eopt.sweep,
                     "comma-separated perturbation magnitudes")
        ->delimiter(',');
    experiment->add_option("--threads", eopt.threads, "worker threads")
        ->check(CLI::PositiveNumber);
    experiment->add_flag("--fma", eopt.fma, "fused multiply-add accumulation");

    BoundOptions bopt;
    auto* bound = app.add_subcommand(
        "bound", "false-positive probability bounds for a given Delta");
    bound->add_option("--delta", bopt.delta_path, "Delta matrix file");
    bound->add_option("-A,--a-file", bopt.a_path, "left factor file");
    bound->add_option("-B,--b-file", bopt.b_path, "right factor file");
    bound->add_option("-C,--c-file", bopt.c_path, "claimed product file");
    bound->add_option("--epsilon", bopt.epsilon, "scalar tolerance")
        ->required();
    bound->add_option("--k", bopt.k, "iteration count")
        ->check(CLI::PositiveNumber);
    bound->add_flag("--fma", bopt.fma, "fused multiply-add accumulation");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("gvfa");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitAccepted;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        if (*verify) return cmd_verify(vopt, out);
        if (*inject) return cmd_inject(iopt, out);
        if (*experiment) return cmd_experiment(eopt, out);
        if (*bound) return cmd_bound(bopt, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    err << "error: no subcommand\n";
    return kExitError;
}

int run_main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc) - 1 : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace gvfa::cli
