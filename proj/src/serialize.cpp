#include "shmopt/serialize.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace shmopt {

namespace {

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

/// Reject unknown keys, naming the first offender.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown config key '" + it.key() + "' in " + where);
    }
}

const json& require_field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing config key '" + std::string(key) + "' in " + where);
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

std::vector<double> as_number_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(as_number(e, where + " entry"));
    return v;
}

std::vector<int> as_index_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be an array of integers");
    std::vector<int> v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw ConfigError(where + " entries must be integers");
        v.push_back(e.get<int>());
    }
    return v;
}

/// Wrap invariant violations from the domain constructors as config errors.
template <typename Fn>
auto config_checked(Fn&& fn, const std::string& where) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

HarmonicSpec parse_harmonics(const json& j) {
    require_object(j, "harmonics");
    require_keys(j, {"cos", "sin"}, "harmonics");
    auto cos_idx = as_index_list(require_field(j, "cos", "harmonics"), "harmonics.cos");
    auto sin_idx = as_index_list(require_field(j, "sin", "harmonics"), "harmonics.sin");
    return config_checked([&] { return HarmonicSpec(std::move(cos_idx), std::move(sin_idx)); },
                          "harmonics");
}

PenaltyMode parse_mode(const json& j) {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "linear") return PenaltyMode::Linear;
    if (s == "piecewise_affine") return PenaltyMode::PiecewiseAffine;
    if (s == "smooth_piecewise_affine") return PenaltyMode::SmoothPiecewiseAffine;
    throw ConfigError("penalty.mode must be one of linear, piecewise_affine, smooth_piecewise_affine");
}

const char* mode_name(PenaltyMode m) {
    switch (m) {
        case PenaltyMode::Linear: return "linear";
        case PenaltyMode::PiecewiseAffine: return "piecewise_affine";
        case PenaltyMode::SmoothPiecewiseAffine: return "smooth_piecewise_affine";
    }
    return "linear";
}

PenaltyModel parse_penalty(const json& j, ControlSet set) {
    require_object(j, "penalty");
    require_keys(j, {"mode", "alpha", "beta", "epsilon", "theta"}, "penalty");
    const PenaltyMode mode = parse_mode(require_field(j, "mode", "penalty"));
    const double alpha = as_number(require_field(j, "alpha", "penalty"), "penalty.alpha");
    const double beta = j.contains("beta") ? as_number(j["beta"], "penalty.beta") : 0.0;
    const double epsilon = as_number(require_field(j, "epsilon", "penalty"), "penalty.epsilon");
    const double theta = j.contains("theta") ? as_number(j["theta"], "penalty.theta") : 1e5;
    return config_checked(
        [&] { return PenaltyModel(std::move(set), mode, alpha, beta, epsilon, theta); }, "penalty");
}

SolverOptions parse_solver_options(const json& j) {
    SolverOptions o;
    if (j.is_null()) return o;
    require_object(j, "solver");
    require_keys(j, {"stationarity_tol", "max_iters", "snap_tol", "bisection_tol", "snap_threshold"},
                 "solver");
    if (j.contains("stationarity_tol")) o.stationarity_tol = as_number(j["stationarity_tol"], "solver.stationarity_tol");
    if (j.contains("max_iters")) {
        if (!j["max_iters"].is_number_integer()) throw ConfigError("solver.max_iters must be an integer");
        o.max_iters = j["max_iters"].get<int>();
    }
    if (j.contains("snap_tol")) o.snap_tol = as_number(j["snap_tol"], "solver.snap_tol");
    if (j.contains("bisection_tol")) o.bisection_tol = as_number(j["bisection_tol"], "solver.bisection_tol");
    if (j.contains("snap_threshold")) o.snap_threshold = as_number(j["snap_threshold"], "solver.snap_threshold");
    return o;
}

FourierTargets parse_targets(const json& j, const HarmonicSpec& spec) {
    require_object(j, "targets");
    require_keys(j, {"a", "b"}, "targets");
    FourierTargets t;
    t.a = as_number_list(require_field(j, "a", "targets"), "targets.a");
    t.b = as_number_list(require_field(j, "b", "targets"), "targets.b");
    config_checked([&] { validate_targets(spec, t); return 0; }, "targets");
    return t;
}

json targets_to_json(const FourierTargets& t) {
    return json{{"a", t.a}, {"b", t.b}};
}

std::vector<double> parse_m_values(const json& j) {
    if (j.is_array()) return as_number_list(j, "m_values");
    require_object(j, "m_values");
    require_keys(j, {"from", "to", "step"}, "m_values");
    const double from = as_number(require_field(j, "from", "m_values"), "m_values.from");
    const double to = as_number(require_field(j, "to", "m_values"), "m_values.to");
    const double step = as_number(require_field(j, "step", "m_values"), "m_values.step");
    if (!(step > 0.0)) throw ConfigError("m_values.step must be positive");
    std::vector<double> values;
    const auto count = static_cast<long>(std::llround((to - from) / step));
    for (long i = 0; i <= count; ++i) {
        const double m = from + static_cast<double>(i) * step;
        if (m > to + 0.5 * step) break;
        values.push_back(m);
    }
    return values;
}

}  // namespace

// -----------------------------------------------------------------------------
// GridConfig
// -----------------------------------------------------------------------------

TimeGrid GridConfig::build() const {
    switch (kind) {
        case Kind::Uniform:
            return config_checked([&] { return TimeGrid::uniform(count); }, "grid");
        case Kind::Step:
            return config_checked([&] { return TimeGrid::from_step(step); }, "grid");
        case Kind::Explicit:
            return config_checked([&] { return TimeGrid(nodes); }, "grid");
    }
    return TimeGrid::uniform(count);
}

json GridConfig::to_json() const {
    switch (kind) {
        case Kind::Uniform: return json{{"n", count}};
        case Kind::Step: return json{{"step", step}};
        case Kind::Explicit: return json{{"nodes", nodes}};
    }
    return json{{"n", count}};
}

GridConfig GridConfig::parse(const json& j) {
    GridConfig g;
    if (j.is_null()) return g;
    require_object(j, "grid");
    require_keys(j, {"n", "step", "nodes"}, "grid");
    if (j.size() != 1) throw ConfigError("grid must have exactly one of n, step, nodes");
    if (j.contains("n")) {
        if (!j["n"].is_number_integer()) throw ConfigError("grid.n must be an integer");
        g.kind = Kind::Uniform;
        g.count = j["n"].get<std::size_t>();
    } else if (j.contains("step")) {
        g.kind = Kind::Step;
        g.step = as_number(j["step"], "grid.step");
    } else {
        g.kind = Kind::Explicit;
        g.nodes = as_number_list(j["nodes"], "grid.nodes");
    }
    return g;
}

// -----------------------------------------------------------------------------
// RunConfig
// -----------------------------------------------------------------------------

FourierTargets RunConfig::solve_targets() const {
    if (targets.has_value()) return *targets;
    if (pattern.has_value() && m.has_value()) return pattern->at(*m);
    throw ConfigError("config needs either explicit targets or an m_pattern with m");
}

ProblemSpec RunConfig::problem_spec(const FourierTargets& t) const {
    return ProblemSpec(harmonics, t, penalty, options);
}

json RunConfig::to_json() const {
    json j;
    j["control_set"] = penalty.set().levels();
    j["harmonics"] = json{{"cos", harmonics.cos_indices()}, {"sin", harmonics.sin_indices()}};
    if (targets.has_value()) j["targets"] = targets_to_json(*targets);
    if (pattern.has_value()) {
        j["m_pattern"] = json{{"a", pattern->pattern_a}, {"b", pattern->pattern_b}};
    }
    if (m.has_value()) j["m"] = *m;
    if (!m_values.empty()) j["m_values"] = m_values;
    j["penalty"] = json{{"mode", mode_name(penalty.mode())},
                        {"alpha", penalty.alpha()},
                        {"beta", penalty.beta()},
                        {"epsilon", penalty.epsilon()},
                        {"theta", penalty.theta()}};
    j["grid"] = grid.to_json();
    j["solver"] = json{{"stationarity_tol", options.stationarity_tol},
                       {"max_iters", options.max_iters},
                       {"snap_tol", options.snap_tol},
                       {"bisection_tol", options.bisection_tol},
                       {"snap_threshold", options.snap_threshold}};
    j["warm_start"] = warm_start;
    j["seed"] = seed;
    j["workers"] = workers;
    return j;
}

RunConfig parse_run_config(const json& j) {
    require_object(j, "config");
    require_keys(j,
                 {"control_set", "harmonics", "targets", "m_pattern", "m", "m_values", "penalty",
                  "grid", "solver", "warm_start", "seed", "workers"},
                 "config");

    ControlSet set = config_checked(
        [&] { return ControlSet(as_number_list(require_field(j, "control_set", "config"), "control_set")); },
        "control_set");
    HarmonicSpec harmonics = parse_harmonics(require_field(j, "harmonics", "config"));
    PenaltyModel penalty = parse_penalty(require_field(j, "penalty", "config"), std::move(set));

    RunConfig cfg(std::move(harmonics), std::move(penalty));
    cfg.options = parse_solver_options(j.contains("solver") ? j["solver"] : json());
    cfg.grid = GridConfig::parse(j.contains("grid") ? j["grid"] : json());

    if (j.contains("targets")) cfg.targets = parse_targets(j["targets"], cfg.harmonics);
    if (j.contains("m_pattern")) {
        const json& p = j["m_pattern"];
        require_object(p, "m_pattern");
        require_keys(p, {"a", "b"}, "m_pattern");
        TargetPattern pattern;
        pattern.pattern_a = as_number_list(require_field(p, "a", "m_pattern"), "m_pattern.a");
        pattern.pattern_b = as_number_list(require_field(p, "b", "m_pattern"), "m_pattern.b");
        if (pattern.pattern_a.size() != cfg.harmonics.cos_count() ||
            pattern.pattern_b.size() != cfg.harmonics.sin_count()) {
            throw ConfigError("m_pattern lengths must match the harmonic index counts");
        }
        cfg.pattern = std::move(pattern);
    }
    if (j.contains("m")) cfg.m = as_number(j["m"], "m");
    if (j.contains("m_values")) cfg.m_values = parse_m_values(j["m_values"]);
    if (j.contains("warm_start")) {
        if (!j["warm_start"].is_boolean()) throw ConfigError("warm_start must be a boolean");
        cfg.warm_start = j["warm_start"].get<bool>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) throw ConfigError("seed must be an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        if (!j["workers"].is_number_integer()) throw ConfigError("workers must be an integer");
        cfg.workers = j["workers"].get<int>();
    }
    if (j.contains("targets") && j.contains("m_pattern")) {
        throw ConfigError("config must not mix explicit targets with an m_pattern");
    }
    return cfg;
}

// -----------------------------------------------------------------------------
// BaselineConfig
// -----------------------------------------------------------------------------

BaselineConfig parse_baseline_config(const json& j) {
    require_object(j, "config");
    require_keys(j,
                 {"control_set", "harmonics", "switches", "targets_grid", "m_pattern", "m_values",
                  "restarts", "budget", "solvable_tol", "seed", "workers"},
                 "config");

    ControlSet set = config_checked(
        [&] { return ControlSet(as_number_list(require_field(j, "control_set", "config"), "control_set")); },
        "control_set");
    HarmonicSpec harmonics = parse_harmonics(require_field(j, "harmonics", "config"));
    BaselineConfig cfg(std::move(set), std::move(harmonics));

    const json& sw = require_field(j, "switches", "config");
    if (!sw.is_number_integer() || sw.get<long>() < 1) {
        throw ConfigError("switches must be a positive integer");
    }
    cfg.switches = sw.get<std::size_t>();

    if (j.contains("targets_grid")) {
        if (!j["targets_grid"].is_array()) throw ConfigError("targets_grid must be an array");
        for (const auto& t : j["targets_grid"]) {
            cfg.target_grid.push_back(parse_targets(t, cfg.harmonics));
        }
    } else if (j.contains("m_pattern") && j.contains("m_values")) {
        const json& p = j["m_pattern"];
        require_object(p, "m_pattern");
        require_keys(p, {"a", "b"}, "m_pattern");
        TargetPattern pattern;
        pattern.pattern_a = as_number_list(require_field(p, "a", "m_pattern"), "m_pattern.a");
        pattern.pattern_b = as_number_list(require_field(p, "b", "m_pattern"), "m_pattern.b");
        if (pattern.pattern_a.size() != cfg.harmonics.cos_count() ||
            pattern.pattern_b.size() != cfg.harmonics.sin_count()) {
            throw ConfigError("m_pattern lengths must match the harmonic index counts");
        }
        for (double m : parse_m_values(j["m_values"])) cfg.target_grid.push_back(pattern.at(m));
    } else {
        throw ConfigError("baseline config needs targets_grid or m_pattern with m_values");
    }

    if (j.contains("restarts")) {
        if (!j["restarts"].is_number_integer()) throw ConfigError("restarts must be an integer");
        cfg.options.restarts = j["restarts"].get<int>();
    }
    if (j.contains("budget")) {
        if (!j["budget"].is_number_integer()) throw ConfigError("budget must be an integer");
        cfg.budget = j["budget"].get<std::size_t>();
    }
    if (j.contains("solvable_tol")) cfg.options.solvable_tol = as_number(j["solvable_tol"], "solvable_tol");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) throw ConfigError("seed must be an integer");
        cfg.options.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        if (!j["workers"].is_number_integer()) throw ConfigError("workers must be an integer");
        cfg.options.workers = j["workers"].get<int>();
    }
    return cfg;
}

// -----------------------------------------------------------------------------
// Documents
// -----------------------------------------------------------------------------

json signal_to_json(const StaircaseSignal& signal, const ControlSet& set) {
    return json{{"levels", set.levels()}, {"waveform", signal.waveform()}, {"angles", signal.angles()}};
}

SignalDocument signal_from_json(const json& j) {
    require_object(j, "signal");
    require_keys(j, {"levels", "waveform", "angles"}, "signal");
    ControlSet set = config_checked(
        [&] { return ControlSet(as_number_list(require_field(j, "levels", "signal"), "signal.levels")); },
        "signal.levels");
    StaircaseSignal signal = config_checked(
        [&] {
            return StaircaseSignal(as_number_list(require_field(j, "waveform", "signal"), "signal.waveform"),
                                   as_number_list(require_field(j, "angles", "signal"), "signal.angles"));
        },
        "signal");
    return SignalDocument{std::move(set), std::move(signal)};
}

json report_to_json(const RunConfig& config, const SolveReport& report) {
    json result;
    result["converged"] = report.converged;
    result["iterations"] = report.iterations;
    result["stationarity"] = report.stationarity;
    result["monotone_descent"] = report.monotone_descent;
    result["objective"] = report.objective;
    result["terminal_state"] = report.terminal_state;
    result["terminal_residual"] = report.terminal_residual;
    result["control"] = report.control.values;
    result["snap_fraction"] = report.snap_fraction;
    result["extraction_reliable"] = report.extraction_reliable;
    if (report.extracted.has_value()) {
        result["extracted_signal"] = signal_to_json(*report.extracted, config.penalty.set());
    } else {
        result["extracted_signal"] = nullptr;
    }
    result["pmp_agreement"] = report.pmp_agreement;
    result["pmp_switch_angles"] = report.pmp_switch_angles;
    return json{{"problem", config.to_json()}, {"result", result}};
}

ReportDocument report_from_json(const json& j) {
    require_object(j, "report");
    require_keys(j, {"problem", "result"}, "report");
    RunConfig config = parse_run_config(require_field(j, "problem", "report"));
    const json& result = require_field(j, "result", "report");
    require_object(result, "report.result");

    TimeGrid grid = config.grid.build();
    DiscreteControl control = config_checked(
        [&] {
            return DiscreteControl(
                as_number_list(require_field(result, "control", "report.result"), "report.result.control"),
                grid);
        },
        "report.result.control");

    ReportDocument doc(std::move(config), std::move(control));
    doc.terminal_state =
        as_number_list(require_field(result, "terminal_state", "report.result"), "terminal_state");
    doc.converged = require_field(result, "converged", "report.result").get<bool>();
    doc.snap_fraction = as_number(require_field(result, "snap_fraction", "report.result"), "snap_fraction");
    doc.extraction_reliable = require_field(result, "extraction_reliable", "report.result").get<bool>();
    const json& sig = require_field(result, "extracted_signal", "report.result");
    if (!sig.is_null()) {
        doc.extracted = signal_from_json(sig).signal;
    }
    return doc;
}

json sweep_summary_to_json(const RunConfig& config, const SweepResult& result) {
    json rows = json::array();
    for (const SweepRow& row : result.rows) {
        json r;
        r["m"] = row.m;
        if (row.failed()) {
            r["failed"] = true;
            r["error"] = row.error;
        } else {
            r["failed"] = false;
            r["converged"] = row.report->converged;
            r["iterations"] = row.report->iterations;
            r["terminal_residual"] = row.report->terminal_residual;
            r["snap_fraction"] = row.report->snap_fraction;
            r["extraction_reliable"] = row.report->extraction_reliable;
            r["pmp_agreement"] = row.report->pmp_agreement;
        }
        rows.push_back(std::move(r));
    }
    return json{{"problem", config.to_json()}, {"rows", rows}};
}

json continuity_to_json(const SweepResult& result) {
    const ContinuityReport report = continuity_report(result);
    std::vector<double> ms;
    ms.reserve(result.rows.size());
    for (const SweepRow& row : result.rows) ms.push_back(row.m);
    return json{{"m_values", ms},
                {"gaps", report.gaps},
                {"max_gap", report.max_gap},
                {"mean_gap", report.mean_gap}};
}

// -----------------------------------------------------------------------------
// CSV
// -----------------------------------------------------------------------------

std::string control_csv(const DiscreteControl& control) {
    std::string out = "t,u\n";
    for (std::size_t k = 0; k < control.grid.size(); ++k) {
        out += fmt::format("{},{}\n", control.grid.node(k), control.values[k]);
    }
    return out;
}

std::string policy_csv(const SweepResult& result) {
    std::string out = "m,t,u\n";
    for (const SweepRow& row : result.rows) {
        if (row.failed()) continue;
        const DiscreteControl& ctl = row.report->control;
        for (std::size_t k = 0; k < ctl.grid.size(); ++k) {
            out += fmt::format("{},{},{}\n", row.m, ctl.grid.node(k), ctl.values[k]);
        }
    }
    return out;
}

std::string scan_csv(const std::vector<std::vector<BaselineResult>>& table) {
    std::string out = "waveform_id,target_index,V,solved,angles\n";
    for (std::size_t w = 0; w < table.size(); ++w) {
        for (std::size_t t = 0; t < table[w].size(); ++t) {
            const BaselineResult& r = table[w][t];
            std::string angles;
            for (std::size_t i = 0; i < r.angles.size(); ++i) {
                if (i > 0) angles += ';';
                angles += fmt::format("{}", r.angles[i]);
            }
            out += fmt::format("{},{},{},{},{}\n", w, t, r.optimal_value, r.solved ? 1 : 0, angles);
        }
    }
    return out;
}

// -----------------------------------------------------------------------------
// Files
// -----------------------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

}  // namespace shmopt
