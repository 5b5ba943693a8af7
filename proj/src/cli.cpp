#include "povm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "povm/io.hpp"

namespace povm::cli {

namespace {

using io::Json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInputError = 2;

struct Config {
    std::vector<std::string> tolerance_overrides;
    Tolerances tol;

    std::string povm_path;
    std::string output;
    std::size_t max_terms = 4096;

    std::string family;
    std::string states_path;
    std::string regions_path;
    std::string mode = "det";
    std::size_t budget = 0;
    std::optional<std::uint64_t> seed;
    bool unfolded = false;
    double threshold = 1e-6;

    bool scheme = false;
    bool direct = false;
    std::string state_path;
    std::size_t n = 0;

    std::string a_path;
    std::string b_path;
    std::string bins = "sphere12";
    double alpha = 1e-3;

    std::string spec_path;
    std::size_t samples = 16;
    double spread_tol = 1e-9;

    std::string target_path;
    std::string records_path;
};

void apply_tolerances(Config &cfg) {
    for (const auto &kv : cfg.tolerance_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("--tolerance expects key=value, got '" + kv + "'");
        }
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) {
                throw std::invalid_argument(kv);
            }
        } catch (const std::logic_error &) {
            throw InvalidInput("--tolerance value is not a number in '" + kv + "'");
        }
        cfg.tol.set(kv.substr(0, eq), value);
    }
}

// Emits to -o when given, else to stdout.
class Output {
  public:
    Output(const Config &cfg, std::ostream &out, std::vector<std::string> inputs) : path_(cfg.output), out_(out) {
        if (path_.empty()) {
            return;
        }
        namespace fs = std::filesystem;
        const auto target = fs::weakly_canonical(fs::path(path_));
        for (const auto &in : inputs) {
            if (!in.empty() && fs::weakly_canonical(fs::path(in)) == target) {
                throw InvalidInput("refusing to overwrite input file '" + in + "'");
            }
        }
    }

    void json(const Json &j) const {
        if (path_.empty()) {
            out_ << j.dump(2) << '\n';
        } else {
            io::write_json_file(path_, j);
        }
    }

    void records(std::span<const OutcomeRecord> r, const OutcomeSpace &space,
                 const std::optional<OutcomeSpace> &parameter_space) const {
        if (path_.empty()) {
            io::write_records(out_, r, space, parameter_space);
            return;
        }
        std::ofstream f(path_, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw InvalidInput("cannot write '" + path_ + "'");
        }
        io::write_records(f, r, space, parameter_space);
    }

  private:
    std::string path_;
    std::ostream &out_;
};

io::NamedState load_single_state(const std::string &path, const Tolerances &tol) {
    const Json j = io::read_json_file(path);
    if (j.contains("states")) {
        auto states = io::states_from_json(j, tol);
        if (states.size() != 1) {
            throw InvalidInput("'" + path + "' holds several states; give exactly one");
        }
        return std::move(states.front());
    }
    return io::state_from_json(j, tol);
}

std::vector<OutcomeRecord> load_records(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    return io::read_records(in);
}

Operator load_target(const std::string &path) {
    const Json j = io::read_json_file(path);
    io::check_schema(j);
    if (j.is_array()) {
        return io::matrix_from_json(j);
    }
    if (j.contains("target")) {
        return io::matrix_from_json(j.at("target"));
    }
    if (j.contains("matrix")) {
        return io::matrix_from_json(j.at("matrix"));
    }
    throw InvalidInput("target file needs a 'matrix' field");
}

RandomizedScheme scheme_for(const ContinuousPovm &c, bool unfolded) {
    return c.family() == Family::SpinDirection ? stern_gerlach_scheme() : phase_scheme(c.dim(), unfolded);
}

std::uint64_t require_seed(const Config &cfg, const char *what) {
    if (!cfg.seed) {
        throw InvalidInput(std::string(what) + " draws random numbers and needs --seed");
    }
    return *cfg.seed;
}

int cmd_validate(const Config &cfg, std::ostream &out) {
    const Json j = io::read_json_file(cfg.povm_path);
    io::check_schema(j);
    const Output emit(cfg, out, {cfg.povm_path});
    if (j.contains("terms")) {
        const auto d = io::decomposition_from_json(j, cfg.tol);
        Json reports = Json::array();
        bool ok = true;
        double weight_sum = 0.0;
        for (const auto &t : d.terms) {
            const auto r = validate_povm(t.povm, cfg.tol);
            ok = ok && r.passed && t.weight >= 0.0;
            weight_sum += t.weight;
            reports.push_back(io::validation_to_json(r));
        }
        ok = ok && std::abs(weight_sum - 1.0) <= 1e-9;
        emit.json({{"schema", io::kSchema}, {"passed", ok}, {"weight_sum", weight_sum}, {"terms", reports}});
        return ok ? kOk : kFailed;
    }
    const auto report = validate_povm(io::povm_from_json(j, cfg.tol), cfg.tol);
    emit.json(io::validation_to_json(report));
    return report.passed ? kOk : kFailed;
}

int cmd_extremal(const Config &cfg, std::ostream &out) {
    const auto p = io::povm_from_json(io::read_json_file(cfg.povm_path), cfg.tol);
    const auto kernel = perturbation_space(p, cfg.tol);
    const Json j = {{"extremal", kernel.empty()}, {"kernel_dim", kernel.size()}};
    out << j.dump() << '\n';
    return kOk;
}

int cmd_decompose(const Config &cfg, std::ostream &out) {
    const auto p = io::povm_from_json(io::read_json_file(cfg.povm_path), cfg.tol);
    const Output emit(cfg, out, {cfg.povm_path});
    const auto report = validate_povm(p, cfg.tol);
    if (!report.passed) {
        throw InvalidInput("input is not a valid POVM: " +
                           (report.violations.empty() ? std::string("validation failed") : report.violations.front()));
    }
    try {
        emit.json(io::decomposition_to_json(decompose_extremal(p, cfg.max_terms, cfg.tol)));
        return kOk;
    } catch (const TermBudgetExceeded &e) {
        emit.json(io::decomposition_to_json(e.partial(), false));
        return kFailed;
    }
}

int cmd_equiv(const Config &cfg, std::ostream &out) {
    const auto c = io::family_from_string(cfg.family);
    const auto states = io::states_from_json(io::read_json_file(cfg.states_path), cfg.tol);
    const auto regions = io::regions_from_json(io::read_json_file(cfg.regions_path), cfg.tol);
    const Output emit(cfg, out, {cfg.states_path, cfg.regions_path});
    std::vector<DensityMatrix> rhos;
    std::vector<Region> rs;
    for (const auto &s : states) {
        rhos.push_back(s.rho);
    }
    for (const auto &r : regions) {
        rs.push_back(r.region);
    }
    EquivalenceMode mode;
    std::uint64_t seed = 0;
    std::size_t budget = cfg.budget;
    if (cfg.mode == "det") {
        mode = EquivalenceMode::Deterministic;
        budget = budget == 0 ? 64 : budget;
    } else if (cfg.mode == "mc") {
        mode = EquivalenceMode::MonteCarlo;
        seed = require_seed(cfg, "equiv --mode mc");
        budget = budget == 0 ? 100000 : budget;
    } else {
        throw InvalidInput("--mode must be det or mc");
    }
    const auto report = verify_scheme_equivalence(c, scheme_for(c, cfg.unfolded), rhos, rs, mode, budget, seed);
    bool passed = true;
    for (const auto &row : report.rows) {
        const double allowed = mode == EquivalenceMode::Deterministic ? cfg.threshold : 5.0 * row.std_error + 1e-12;
        passed = passed && std::abs(row.diff) <= allowed;
    }
    Json j = io::equivalence_to_json(report, states, regions);
    j["family"] = io::family_to_json(c);
    j["passed"] = passed;
    emit.json(j);
    return passed ? kOk : kFailed;
}

int cmd_sample(const Config &cfg, std::ostream &out) {
    const std::uint64_t seed = require_seed(cfg, "sample");
    const auto state = load_single_state(cfg.state_path, cfg.tol);
    std::vector<std::string> inputs = {cfg.state_path, cfg.povm_path};
    const Output emit(cfg, out, inputs);
    if (!cfg.povm_path.empty()) {
        if (!cfg.family.empty() || cfg.scheme || cfg.direct) {
            throw InvalidInput("--povm cannot be combined with --family, --scheme or --direct");
        }
        const auto p = io::povm_from_json(io::read_json_file(cfg.povm_path), cfg.tol);
        if (!validate_povm(p, cfg.tol).passed) {
            throw InvalidInput("'" + cfg.povm_path + "' is not a valid POVM");
        }
        emit.records(sample_finite(p, state.rho, cfg.n, seed), p.space(), std::nullopt);
        return kOk;
    }
    if (cfg.family.empty()) {
        throw InvalidInput("sample needs --family or --povm");
    }
    if (cfg.scheme == cfg.direct) {
        throw InvalidInput("choose exactly one of --scheme and --direct");
    }
    const auto c = io::family_from_string(cfg.family);
    if (cfg.direct) {
        emit.records(sample_direct(c, state.rho, cfg.n, seed), c.space(), std::nullopt);
    } else {
        const auto s = scheme_for(c, cfg.unfolded);
        emit.records(sample_two_stage(s, state.rho, cfg.n, seed), s.outcome_space(), s.parameter_space());
    }
    return kOk;
}

int cmd_gof(const Config &cfg, std::ostream &out) {
    const auto a = load_records(cfg.a_path);
    const auto b = load_records(cfg.b_path);
    std::vector<Region> bins;
    std::vector<std::string> inputs = {cfg.a_path, cfg.b_path};
    if (cfg.bins == "sphere12") {
        bins = sphere_bins(2, 6);
    } else if (cfg.bins == "circle16") {
        bins = circle_bins(16);
    } else {
        for (auto &r : io::regions_from_json(io::read_json_file(cfg.bins), cfg.tol)) {
            bins.push_back(std::move(r.region));
        }
        inputs.push_back(cfg.bins);
    }
    const Output emit(cfg, out, inputs);
    const auto report = compare_samples(a, b, bins, cfg.bins);
    Json j = io::gof_to_json(report);
    const bool passed = report.p_value > cfg.alpha;
    j["alpha"] = cfg.alpha;
    j["passed"] = passed;
    emit.json(j);
    return passed ? kOk : kFailed;
}

int cmd_merit(const Config &cfg, std::ostream &out) {
    const Output emit(cfg, out, {cfg.spec_path, cfg.povm_path});
    std::optional<BayesGainSpec> spec;
    if (!cfg.spec_path.empty()) {
        spec = io::bayes_spec_from_json(io::read_json_file(cfg.spec_path));
    }
    if (!cfg.povm_path.empty() == !cfg.family.empty()) {
        throw InvalidInput("merit needs exactly one of --povm and --family");
    }
    if (!cfg.povm_path.empty()) {
        const auto p = io::povm_from_json(io::read_json_file(cfg.povm_path), cfg.tol);
        if (!spec) {
            throw InvalidInput("merit --povm needs --spec");
        }
        emit.json({{"schema", io::kSchema}, {"spec", io::bayes_spec_to_json(*spec)}, {"value", bayes_gain(p, *spec)}});
        return kOk;
    }
    const auto c = io::family_from_string(cfg.family);
    if (!spec) {
        spec = c.family() == Family::SpinDirection ? BayesGainSpec{Prior::UniformSphere, Gain::Fidelity}
                                                   : BayesGainSpec{Prior::UniformCircle, Gain::Cosine};
    }
    const std::uint64_t seed = require_seed(cfg, "merit --family");
    const double continuous = bayes_gain(c, *spec);
    const auto report = check_equal_optimality(scheme_for(c, cfg.unfolded), *spec, cfg.samples, cfg.spread_tol, seed);
    const bool passed = report.passed && std::abs(report.value - continuous) <= cfg.threshold;
    emit.json({{"schema", io::kSchema},
               {"family", io::family_to_json(c)},
               {"spec", io::bayes_spec_to_json(*spec)},
               {"continuous", continuous},
               {"passed", passed},
               {"scheme", io::merit_to_json(report)}});
    return passed ? kOk : kFailed;
}

int cmd_tomo(const Config &cfg, std::ostream &out) {
    const Output emit(cfg, out, {cfg.povm_path, cfg.target_path, cfg.records_path, cfg.state_path});
    if (!cfg.povm_path.empty() == !cfg.family.empty()) {
        throw InvalidInput("tomo needs exactly one of --povm and --family");
    }
    const Operator target = load_target(cfg.target_path);
    Json j = {{"schema", io::kSchema}};
    DualProcessing dual;
    if (!cfg.povm_path.empty()) {
        const auto p = io::povm_from_json(io::read_json_file(cfg.povm_path), cfg.tol);
        dual = dual_coefficients(p, target, cfg.tol);
    } else {
        const auto c = io::family_from_string(cfg.family);
        dual = dual_coefficients(c, target, cfg.tol);
        j["family"] = io::family_to_json(c);
        j["reconstruction_error"] = (dual_reconstruction(c, dual) - dual.target).norm();
    }
    j["dual"] = io::dual_to_json(dual);
    if (!cfg.records_path.empty()) {
        std::optional<DensityMatrix> exact;
        if (!cfg.state_path.empty()) {
            exact = load_single_state(cfg.state_path, cfg.tol).rho;
        }
        j["estimate"] = io::estimate_to_json(estimate_expectation(load_records(cfg.records_path), dual, exact));
    }
    emit.json(j);
    return kOk;
}

void print_error(std::ostream &err, std::string_view kind, const std::string &message) {
    const Json j = {{"error", message}, {"kind", kind}};
    err << j.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    Config cfg;
    CLI::App app{"Finite and continuous POVM toolkit: extremality, decomposition, randomized schemes, sampling, "
                 "tomography"};
    app.name("povmctl");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tolerance", cfg.tolerance_overrides,
                   "Override a tolerance, key=value; keys: herm psd trace complete rank_gap ambiguity merge direction")
        ->type_name("KEY=VALUE");

    auto *validate = app.add_subcommand("validate", "Check a POVM (or a decomposition file); exit 1 on a defect");
    validate->add_option("povm", cfg.povm_path, "POVM JSON")->required();
    validate->add_option("-o,--output", cfg.output, "Report file (default stdout)");

    auto *extremal = app.add_subcommand("extremal", "Print the extremality verdict and perturbation kernel dimension");
    extremal->add_option("povm", cfg.povm_path, "POVM JSON")->required();

    auto *decompose = app.add_subcommand("decompose", "Split a POVM into a convex mixture of extremal POVMs");
    decompose->add_option("povm", cfg.povm_path, "POVM JSON")->required();
    decompose->add_option("--max-terms", cfg.max_terms, "Term budget")->capture_default_str();
    decompose->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    auto *equiv = app.add_subcommand("equiv", "Compare a continuous family with its randomized finite scheme");
    equiv->add_option("--family", cfg.family, "spin | phase:d")->required();
    equiv->add_option("--states", cfg.states_path, "States JSON")->required();
    equiv->add_option("--regions", cfg.regions_path, "Regions JSON")->required();
    equiv->add_option("--mode", cfg.mode, "det | mc")->capture_default_str();
    equiv->add_option("--budget", cfg.budget, "Quadrature nodes (det, default 64) or samples (mc, default 1e5)");
    equiv->add_option("--seed", cfg.seed, "Seed (required for mc)");
    equiv->add_option("--threshold", cfg.threshold, "Allowed |diff| in det mode")->capture_default_str();
    equiv->add_flag("--unfolded", cfg.unfolded, "Mix the phase scheme over the full circle");
    equiv->add_option("-o,--output", cfg.output, "Report file (default stdout)");

    auto *sample = app.add_subcommand("sample", "Draw outcome records as newline-delimited JSON");
    sample->add_option("--family", cfg.family, "spin | phase:d");
    sample->add_option("--povm", cfg.povm_path, "Finite POVM JSON instead of a family");
    sample->add_flag("--scheme", cfg.scheme, "Two-stage sampling through the randomized scheme");
    sample->add_flag("--direct", cfg.direct, "Sample the continuous density directly");
    sample->add_flag("--unfolded", cfg.unfolded, "Mix the phase scheme over the full circle");
    sample->add_option("--state", cfg.state_path, "State JSON")->required();
    sample->add_option("-n", cfg.n, "Number of records")->required();
    sample->add_option("--seed", cfg.seed, "Seed")->required();
    sample->add_option("-o,--output", cfg.output, "Records file (default stdout)");

    auto *gof = app.add_subcommand("gof", "Chi-square two-sample test on binned records; exit 1 if p <= alpha");
    gof->add_option("--a", cfg.a_path, "First records file")->required();
    gof->add_option("--b", cfg.b_path, "Second records file")->required();
    gof->add_option("--bins", cfg.bins, "sphere12 | circle16 | regions JSON")->capture_default_str();
    gof->add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();
    gof->add_option("-o,--output", cfg.output, "Report file (default stdout)");

    auto *merit = app.add_subcommand("merit", "Bayes gain of a POVM, or equal optimality of a scheme's members");
    merit->add_option("--family", cfg.family, "spin | phase:d");
    merit->add_option("--povm", cfg.povm_path, "Finite POVM JSON");
    merit->add_option("--spec", cfg.spec_path, "Bayes gain spec JSON");
    merit->add_option("--samples", cfg.samples, "Random members checked besides the quadrature nodes")
        ->capture_default_str();
    merit->add_option("--seed", cfg.seed, "Seed (required with --family)");
    merit->add_option("--tol", cfg.spread_tol, "Allowed spread of member values")->capture_default_str();
    merit->add_option("--threshold", cfg.threshold, "Allowed |scheme average - continuous value|")
        ->capture_default_str();
    merit->add_flag("--unfolded", cfg.unfolded, "Mix the phase scheme over the full circle");
    merit->add_option("-o,--output", cfg.output, "Report file (default stdout)");

    auto *tomo = app.add_subcommand("tomo", "Dual processing for a target operator, optionally applied to records");
    tomo->add_option("--povm", cfg.povm_path, "Finite POVM JSON");
    tomo->add_option("--family", cfg.family, "spin | phase:d");
    tomo->add_option("--target", cfg.target_path, "Target operator JSON")->required();
    tomo->add_option("--records", cfg.records_path, "Records to average");
    tomo->add_option("--state", cfg.state_path, "State giving the exact expectation");
    tomo->add_option("-o,--output", cfg.output, "Report file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        print_error(err, "UsageError", e.what());
        return kInputError;
    }

    try {
        apply_tolerances(cfg);
        if (validate->parsed()) {
            return cmd_validate(cfg, out);
        }
        if (extremal->parsed()) {
            return cmd_extremal(cfg, out);
        }
        if (decompose->parsed()) {
            return cmd_decompose(cfg, out);
        }
        if (equiv->parsed()) {
            return cmd_equiv(cfg, out);
        }
        if (sample->parsed()) {
            return cmd_sample(cfg, out);
        }
        if (gof->parsed()) {
            return cmd_gof(cfg, out);
        }
        if (merit->parsed()) {
            return cmd_merit(cfg, out);
        }
        if (tomo->parsed()) {
            return cmd_tomo(cfg, out);
        }
    } catch (const Error &e) {
        print_error(err, e.kind(), e.what());
        return kInputError;
    } catch (const nlohmann::json::exception &e) {
        print_error(err, "InvalidInput", e.what());
        return kInputError;
    } catch (const std::filesystem::filesystem_error &e) {
        print_error(err, "InvalidInput", e.what());
        return kInputError;
    }
    print_error(err, "UsageError", "no subcommand given");
    return kInputError;
}

int run(int argc, char **argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

} // namespace povm::cli
