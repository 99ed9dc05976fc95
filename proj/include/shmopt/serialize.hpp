#pragma once

// JSON configuration parsing (strict: unknown keys are rejected), report and
// signal documents, and the CSV writers. All floating-point output uses
// shortest round-trip formatting, so emitted files re-parse bit-exactly.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shmopt/baseline.hpp"
#include "shmopt/problem.hpp"
#include "shmopt/solver.hpp"
#include "shmopt/sweep.hpp"

namespace shmopt {

using json = nlohmann::json;

/// Configuration and input-validation failure (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// =============================================================================
// Grid configuration
// =============================================================================

struct GridConfig {
    enum class Kind { Uniform, Step, Explicit };
    Kind kind = Kind::Uniform;
    std::size_t count = 630;
    double step = 0.1;
    std::vector<double> nodes;

    [[nodiscard]] TimeGrid build() const;
    [[nodiscard]] json to_json() const;
    static GridConfig parse(const json& j);
};

// =============================================================================
// Run configuration (solve / sweep)
// =============================================================================

struct RunConfig {
    HarmonicSpec harmonics;
    PenaltyModel penalty;
    SolverOptions options;
    GridConfig grid;
    std::optional<FourierTargets> targets;  // explicit targets
    std::optional<TargetPattern> pattern;   // m-pattern targets
    std::optional<double> m;                // solve: scalar placed on the pattern
    std::vector<double> m_values;           // sweep
    bool warm_start = true;
    std::uint64_t seed = 1;
    int workers = 0;

    RunConfig(HarmonicSpec h, PenaltyModel p) : harmonics(std::move(h)), penalty(std::move(p)) {}

    /// Concrete targets for a single solve (explicit, or pattern at m).
    [[nodiscard]] FourierTargets solve_targets() const;
    [[nodiscard]] ProblemSpec problem_spec(const FourierTargets& t) const;
    /// The normalized configuration document (round-trips through parse).
    [[nodiscard]] json to_json() const;
};

[[nodiscard]] RunConfig parse_run_config(const json& j);

// =============================================================================
// Baseline configuration
// =============================================================================

struct BaselineConfig {
    ControlSet control_set;
    HarmonicSpec harmonics;
    std::size_t switches = 1;
    std::vector<FourierTargets> target_grid;
    BaselineOptions options;
    std::size_t budget = 100000;

    BaselineConfig(ControlSet s, HarmonicSpec h) : control_set(std::move(s)), harmonics(std::move(h)) {}
};

[[nodiscard]] BaselineConfig parse_baseline_config(const json& j);

// =============================================================================
// Documents
// =============================================================================

[[nodiscard]] json signal_to_json(const StaircaseSignal& signal, const ControlSet& set);

struct SignalDocument {
    ControlSet set;
    StaircaseSignal signal;
};

[[nodiscard]] SignalDocument signal_from_json(const json& j);

/// Full solve report: the normalized problem document plus results, enough to
/// re-verify without the original config file.
[[nodiscard]] json report_to_json(const RunConfig& config, const SolveReport& report);

struct ReportDocument {
    RunConfig config;
    DiscreteControl control;
    std::vector<double> terminal_state;
    bool converged = false;
    std::optional<StaircaseSignal> extracted;
    double snap_fraction = 0.0;
    bool extraction_reliable = false;

    ReportDocument(RunConfig c, DiscreteControl ctl)
        : config(std::move(c)), control(std::move(ctl)) {}
};

[[nodiscard]] ReportDocument report_from_json(const json& j);

[[nodiscard]] json sweep_summary_to_json(const RunConfig& config, const SweepResult& result);
[[nodiscard]] json continuity_to_json(const SweepResult& result);

// =============================================================================
// CSV writers (shortest round-trip numbers; deterministic output)
// =============================================================================

[[nodiscard]] std::string control_csv(const DiscreteControl& control);
[[nodiscard]] std::string policy_csv(const SweepResult& result);
[[nodiscard]] std::string scan_csv(const std::vector<std::vector<BaselineResult>>& table);

// =============================================================================
// File helpers
// =============================================================================

void write_text_file(const std::string& path, const std::string& content);
[[nodiscard]] std::string read_text_file(const std::string& path);
[[nodiscard]] json load_json_file(const std::string& path);

}  // namespace shmopt
