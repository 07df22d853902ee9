#include "cli.hpp"

#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "rfim/config.hpp"
#include "rfim/equilibrium.hpp"
#include "rfim/format.hpp"
#include "rfim/learning.hpp"
#include "rfim/montecarlo.hpp"
#include "rfim/predictor.hpp"
#include "rfim/series.hpp"

namespace rfim::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kGradcheckLimit = 1e-5;

std::string banner(const std::string& subcommand, const ojson& resolved) {
    return "rfim " + std::string(kVersion) + " " + subcommand + " config=" + resolved.dump();
}

ojson grid_json(const GridSpec& g) { return ojson{{"start", g.start}, {"stop", g.stop}, {"step", g.step}}; }

// Data goes to `path` atomically, or to the stream when no path was given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
    } else {
        write_file_atomic(path, content);
    }
}

void emit_sidecar(const std::string& path, const std::string& subcommand, const ojson& resolved) {
    if (path.empty()) return;
    ojson doc;
    doc["version"] = std::string(kVersion);
    doc["subcommand"] = subcommand;
    doc["config"] = resolved;
    write_file_atomic(path + ".json", doc.dump(2) + "\n");
}

// "out.csv" -> "out.ising.csv"
std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

struct PhaseArgs {
    double mu = 0.0;
    double h = 0.0;
    double sigma = 1.0;
    std::string inv_J;
    double J = 0.0;
    std::string h_grid;
    std::string out;
    CLI::Option* inv_J_opt = nullptr;
    CLI::Option* J_opt = nullptr;
    CLI::Option* h_opt = nullptr;
};

struct PredictArgs {
    std::string input;
    std::string config;
    double eta = 0.0;
    int tau = 0;
    int M = 0;
    double J0 = 0.0;
    double h0 = 0.0;
    double mu0 = 0.0;
    long long history_cap = 0;
    int grad_steps = 0;
    bool fix_mu = false;
    std::string mode = "observed";
    std::string sigma_mode;
    std::string model = "rfim";
    std::string format = "csv";
    std::size_t resample_stride = 1;
    std::string out;
    std::string baseline_out;
    std::vector<std::pair<std::string, CLI::Option*>> given;
};

struct MCArgs {
    double J = 1.0;
    double h = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::size_t N = 2000;
    std::size_t sweeps = 5000;
    std::size_t burn_in = 2000;
    std::uint64_t seed = 1;
    std::string out;
};

struct GradcheckArgs {
    std::uint64_t seed = 7;
    std::size_t trials = 100;
};

struct GenArgs {
    std::string scenario;
    std::string kind;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    double level = 100.0;
    double slope = 0.0;
    double amplitude = 1.0;
    double period = 100.0;
    double crash_at = 0.0;
    double crash_width = 0.0;
    double depth = 0.0;
    double recovery_drift = 0.0;
    double noise = 0.0;
    double walk = 0.0;
    std::string out;
    std::vector<std::pair<std::string, CLI::Option*>> given;
};

int run_phase(const PhaseArgs& a, std::ostream& out) {
    const bool coupling = a.inv_J_opt->count() > 0;
    const bool field = a.J_opt->count() > 0;
    if (coupling == field) throw CLI::ValidationError("phase", "give either --invJ or --J with --hgrid");
    if (field && a.h_grid.empty()) throw CLI::ValidationError("phase", "--J needs --hgrid");
    if (field && a.h_opt->count() > 0) throw CLI::ValidationError("phase", "--h is fixed by --hgrid in a field sweep");

    ojson resolved;
    resolved["mu"] = a.mu;
    resolved["sigma"] = a.sigma;
    std::vector<SweepRow> rows;
    std::string x_name;
    if (coupling) {
        const GridSpec grid = GridSpec::parse(a.inv_J);
        resolved["h"] = a.h;
        resolved["invJ"] = grid_json(grid);
        rows = sweep_phase_diagram(a.mu, grid, a.h, FieldSignal{a.sigma});
        x_name = "invJ";
    } else {
        const GridSpec grid = GridSpec::parse(a.h_grid);
        resolved["J"] = a.J;
        resolved["hgrid"] = grid_json(grid);
        rows = sweep_field(a.J, a.mu, grid, FieldSignal{a.sigma});
        x_name = "h";
    }
    emit(a.out, render_sweep_csv(rows, x_name, banner("phase", resolved)), out);
    emit_sidecar(a.out, "phase", resolved);
    return kExitOk;
}

bool given(const std::vector<std::pair<std::string, CLI::Option*>>& opts, const std::string& name) {
    for (const auto& [n, o] : opts) {
        if (n == name) return o->count() > 0;
    }
    return false;
}

LearningConfig resolve_learning(const PredictArgs& a) {
    nlohmann::json j = a.config.empty() ? nlohmann::json::object() : read_json_file(a.config);
    if (!j.is_object()) throw std::invalid_argument(a.config + ": learning config must be a JSON object");
    if (given(a.given, "eta")) j["eta"] = a.eta;
    if (given(a.given, "tau")) j["tau"] = a.tau;
    if (given(a.given, "M")) j["M"] = a.M;
    if (given(a.given, "J0")) j["J0"] = a.J0;
    if (given(a.given, "h0")) j["h0"] = a.h0;
    if (given(a.given, "mu0")) j["mu0"] = a.mu0;
    if (given(a.given, "history-cap")) j["history_cap"] = a.history_cap;
    if (given(a.given, "grad-steps")) j["grad_steps_per_tick"] = a.grad_steps;
    if (given(a.given, "sigma-mode")) j["sigma_mode"] = a.sigma_mode;
    if (a.fix_mu) j["learn_mu"] = false;
    return learning_config_from_json(j);
}

std::string render_trace(const PredictionTrace& trace, const std::string& format, const ojson& resolved) {
    if (format == "jsonl") {
        const ojson head{{"rfim", std::string(kVersion)}, {"model", to_string(trace.model)}, {"config", resolved}};
        return head.dump() + "\n" + render_trace_jsonl(trace);
    }
    return render_trace_csv(trace, "predict config=" + resolved.dump());
}

int run_predict(const PredictArgs& a, std::ostream& out) {
    const LearningConfig config = resolve_learning(a);
    const PredictionMode mode = parse_prediction_mode(a.mode);
    PriceSeries series = read_csv_file(a.input);
    if (a.resample_stride > 1) series = resample(series, a.resample_stride);

    ojson resolved;
    resolved["input"] = a.input;
    resolved["resample"] = a.resample_stride;
    resolved["model"] = a.model;
    resolved["mode"] = to_string(mode);
    resolved["learning"] = to_json(config);

    std::string primary;
    std::string baseline;
    if (a.model == "rfim" || a.model == "both") primary = render_trace(run_prediction(series, config, mode), a.format, resolved);
    if (a.model == "ising" || a.model == "both") {
        baseline = render_trace(run_baseline_ising(series, config, mode), a.format, resolved);
    }

    if (a.model == "both") {
        if (a.out.empty()) {
            out << primary << baseline;
        } else {
            write_file_atomic(a.out, primary);
            write_file_atomic(a.baseline_out.empty() ? with_suffix(a.out, ".ising") : a.baseline_out, baseline);
        }
    } else {
        emit(a.out, a.model == "ising" ? baseline : primary, out);
    }
    emit_sidecar(a.out, "predict", resolved);
    return kExitOk;
}

int run_mc(const MCArgs& a, std::ostream& out) {
    MCConfig config;
    config.N = a.N;
    config.sweeps = a.sweeps;
    config.burn_in = a.burn_in;
    config.seed = a.seed;
    config.params = {a.J, a.h, a.mu};
    config.signal = FieldSignal{a.sigma};
    config.validate();

    ojson resolved{{"J", a.J},           {"h", a.h},         {"mu", a.mu},     {"sigma", a.sigma}, {"N", a.N},
                   {"sweeps", a.sweeps}, {"burn_in", a.burn_in}, {"seed", a.seed}};
    const MCEstimate e = estimate_observables(config);
    resolved["m_is_absolute"] = e.m_is_absolute;
    std::string text = "# " + banner("mc", resolved) + "\n" + mc_csv_header() + "\n" + mc_csv_row(config, e) + "\n";
    emit(a.out, text, out);
    emit_sidecar(a.out, "mc", resolved);
    return kExitOk;
}

int run_gradcheck(const GradcheckArgs& a, std::ostream& out) {
    const GradientCheckReport report = check_gradients(a.seed, a.trials);
    const bool ok = report.max_deviation <= kGradcheckLimit;
    out << "# " << banner("gradcheck", ojson{{"seed", a.seed}, {"trials", a.trials}}) << "\n"
        << "trials=" << report.trials << " max_deviation=" << format_double(report.max_deviation)
        << " worst_trial=" << report.worst_trial << " limit=" << format_double(kGradcheckLimit) << " "
        << (ok ? "ok" : "FAILED") << "\n";
    return ok ? kExitOk : kExitDomain;
}

int run_gen(const GenArgs& a, std::ostream& out) {
    nlohmann::json j = a.scenario.empty() ? nlohmann::json::object() : read_json_file(a.scenario);
    if (!j.is_object()) throw std::invalid_argument(a.scenario + ": scenario must be a JSON object");
    if (given(a.given, "kind")) j["kind"] = a.kind;
    if (given(a.given, "length")) j["length"] = a.length;
    if (given(a.given, "seed")) j["seed"] = a.seed;
    if (given(a.given, "level")) j["level"] = a.level;
    if (given(a.given, "slope")) j["slope"] = a.slope;
    if (given(a.given, "amplitude")) j["amplitude"] = a.amplitude;
    if (given(a.given, "period")) j["period"] = a.period;
    if (given(a.given, "crash-at")) j["crash_at"] = a.crash_at;
    if (given(a.given, "crash-width")) j["crash_width"] = a.crash_width;
    if (given(a.given, "depth")) j["depth"] = a.depth;
    if (given(a.given, "recovery-drift")) j["recovery_drift"] = a.recovery_drift;
    if (given(a.given, "noise")) j["noise"] = a.noise;
    if (given(a.given, "walk")) j["walk"] = a.walk;
    if (!j.contains("kind") || !j.contains("length")) throw CLI::ValidationError("gen", "needs --kind and --length");

    const Scenario scenario = scenario_from_json(j);
    const ojson resolved = to_json(scenario);
    emit(a.out, render_csv(generate_synthetic(scenario), banner("gen", resolved)), out);
    emit_sidecar(a.out, "gen", resolved);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-state random-field Ising market model", "rfim"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kVersion));

    PhaseArgs phase;
    auto* phase_cmd = app.add_subcommand("phase", "Equilibrium sweep over 1/J or over h");
    phase_cmd->add_option("--mu", phase.mu, "Activity bias mu")->required();
    phase.h_opt = phase_cmd->add_option("--h", phase.h, "Field coupling h (coupling sweep)");
    phase_cmd->add_option("--sigma", phase.sigma, "Trend sigma")->capture_default_str();
    phase.inv_J_opt = phase_cmd->add_option("--invJ", phase.inv_J, "1/J grid start:stop:step");
    phase.J_opt = phase_cmd->add_option("--J", phase.J, "Coupling J (field sweep)");
    phase_cmd->add_option("--hgrid", phase.h_grid, "h grid start:stop:step (field sweep)");
    phase_cmd->add_option("--out", phase.out, "Output CSV path (default stdout)");

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Online learning and prediction on a price series");
    predict_cmd->add_option("input,--input", predict.input, "Price CSV")->required();
    predict_cmd->add_option("--config", predict.config, "Learning config JSON");
    auto track = [&](const std::string& name, CLI::Option* o) { predict.given.emplace_back(name, o); };
    track("eta", predict_cmd->add_option("--eta", predict.eta, "Learning rate"));
    track("tau", predict_cmd->add_option("--tau", predict.tau, "Trend window"));
    track("M", predict_cmd->add_option("--M", predict.M, "Return smoothing window"));
    track("J0", predict_cmd->add_option("--J0", predict.J0, "Initial J"));
    track("h0", predict_cmd->add_option("--h0", predict.h0, "Initial h"));
    track("mu0", predict_cmd->add_option("--mu0", predict.mu0, "Initial mu"));
    track("history-cap", predict_cmd->add_option("--history-cap", predict.history_cap, "Cost terms kept"));
    track("grad-steps", predict_cmd->add_option("--grad-steps", predict.grad_steps, "Gradient steps per tick"));
    track("sigma-mode", predict_cmd->add_option("--sigma-mode", predict.sigma_mode, "per_term|literal")
                            ->check(CLI::IsMember({"per_term", "literal"})));
    predict_cmd->add_flag("--fix-mu", predict.fix_mu, "Keep mu at its initial value");
    predict_cmd->add_option("--mode", predict.mode, "recursive|observed")
        ->check(CLI::IsMember({"recursive", "observed", "observed_return"}))
        ->capture_default_str();
    predict_cmd->add_option("--model", predict.model, "rfim|ising|both")
        ->check(CLI::IsMember({"rfim", "ising", "both"}))
        ->capture_default_str();
    predict_cmd->add_option("--format", predict.format, "csv|jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();
    predict_cmd->add_option("--resample", predict.resample_stride, "Keep every k-th tick")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    predict_cmd->add_option("--out", predict.out, "Trace path (default stdout)");
    predict_cmd->add_option("--baseline-out", predict.baseline_out, "Baseline trace path with --model both");

    MCArgs mc;
    auto* mc_cmd = app.add_subcommand("mc", "Heat-bath Monte Carlo estimate of (m, a)");
    mc_cmd->add_option("--J", mc.J)->capture_default_str();
    mc_cmd->add_option("--h", mc.h)->capture_default_str();
    mc_cmd->add_option("--mu", mc.mu)->capture_default_str();
    mc_cmd->add_option("--sigma", mc.sigma)->capture_default_str();
    mc_cmd->add_option("--N", mc.N)->check(CLI::Range(2, 100000000))->capture_default_str();
    mc_cmd->add_option("--sweeps", mc.sweeps)->check(CLI::PositiveNumber)->capture_default_str();
    mc_cmd->add_option("--burn-in", mc.burn_in)->capture_default_str();
    mc_cmd->add_option("--seed", mc.seed)->capture_default_str();
    mc_cmd->add_option("--out", mc.out, "Output CSV path (default stdout)");

    GradcheckArgs gradcheck;
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
    gradcheck_cmd->add_option("--seed", gradcheck.seed)->capture_default_str();
    gradcheck_cmd->add_option("--trials", gradcheck.trials)->check(CLI::PositiveNumber)->capture_default_str();

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Synthetic price series");
    gen_cmd->add_option("--scenario", gen.scenario, "Scenario JSON (flags override)");
    auto gen_track = [&](const std::string& name, CLI::Option* o) { gen.given.emplace_back(name, o); };
    gen_track("kind", gen_cmd->add_option("--kind", gen.kind, "constant|linear|sine|crash")
                          ->check(CLI::IsMember({"constant", "linear", "sine", "crash"})));
    gen_track("length", gen_cmd->add_option("--length", gen.length)->check(CLI::Range(2, 1000000000)));
    gen_track("seed", gen_cmd->add_option("--seed", gen.seed));
    gen_track("level", gen_cmd->add_option("--level", gen.level));
    gen_track("slope", gen_cmd->add_option("--slope", gen.slope));
    gen_track("amplitude", gen_cmd->add_option("--amplitude", gen.amplitude));
    gen_track("period", gen_cmd->add_option("--period", gen.period));
    gen_track("crash-at", gen_cmd->add_option("--crash-at", gen.crash_at));
    gen_track("crash-width", gen_cmd->add_option("--crash-width", gen.crash_width));
    gen_track("depth", gen_cmd->add_option("--depth", gen.depth));
    gen_track("recovery-drift", gen_cmd->add_option("--recovery-drift", gen.recovery_drift));
    gen_track("noise", gen_cmd->add_option("--noise", gen.noise));
    gen_track("walk", gen_cmd->add_option("--walk", gen.walk));
    gen_cmd->add_option("--out", gen.out, "Output CSV path (default stdout)");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("rfim");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_storage) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (phase_cmd->parsed()) return run_phase(phase, out);
        if (predict_cmd->parsed()) return run_predict(predict, out);
        if (mc_cmd->parsed()) return run_mc(mc, out);
        if (gradcheck_cmd->parsed()) return run_gradcheck(gradcheck, out);
        return run_gen(gen, out);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace rfim::cli
