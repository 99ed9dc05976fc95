#pragma once

// Policy sweeps over the modulation index m: per-m solves with optional warm
// starting, L1-continuity diagnostics between consecutive policies, and the
// policy matrix consumed by the CSV writers.

#include <string>
#include <vector>

#include "shmopt/solver.hpp"

namespace shmopt {

// =============================================================================
// Types
// =============================================================================

/// Places m on the targets: a_target = m * pattern_a, b_target = m * pattern_b.
struct TargetPattern {
    std::vector<double> pattern_a;
    std::vector<double> pattern_b;

    [[nodiscard]] FourierTargets at(double m) const;
};

struct SweepSpec {
    ProblemSpec base;          // targets inside are overridden per m
    TimeGrid grid;
    TargetPattern pattern;
    std::vector<double> m_values;  // strictly monotone
    bool warm_start = true;
    int workers = 0;  // cold-start sweeps only; 0 = hardware concurrency

    SweepSpec(ProblemSpec b, TimeGrid g, TargetPattern p, std::vector<double> ms);
};

struct SweepRow {
    double m = 0.0;
    std::optional<SolveReport> report;  // empty when the solve threw
    std::string error;

    [[nodiscard]] bool failed() const { return !report.has_value(); }
};

struct SweepResult {
    std::vector<SweepRow> rows;
    /// Trapezoid L1 distances between consecutive controls (size rows-1).
    std::vector<double> consecutive_l1;
};

struct ContinuityReport {
    double max_gap = 0.0;
    double mean_gap = 0.0;
    std::vector<double> gaps;
};

// =============================================================================
// Operations
// =============================================================================

/// Solve every m in order. Warm-start sweeps run sequentially, reusing the
/// previous solution; cold-start sweeps parallelize across m. Individual
/// failures are recorded per row and the sweep continues.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec);

/// Trapezoid L1 distance between two controls on a common grid.
[[nodiscard]] double control_l1_distance(const DiscreteControl& a, const DiscreteControl& b);

[[nodiscard]] ContinuityReport continuity_report(const SweepResult& result);

}  // namespace shmopt
