#pragma once

// Aggregate problem description shared by the solver, the sweep driver and
// the CLI front end.

#include "shmopt/dynamics.hpp"
#include "shmopt/penalty.hpp"
#include "shmopt/signal.hpp"

namespace shmopt {

struct SolverOptions {
    /// Stop once ||u - clip(u - g, [-1,1])||_inf falls below this.
    double stationarity_tol = 1e-8;
    int max_iters = 20000;
    /// Node counts as level-valued when within snap_tol of a control level.
    double snap_tol = 1e-2;
    /// Switching angles from the PMP switching function are bisected to this
    /// accuracy (radians).
    double bisection_tol = 1e-10;
    /// Extraction is flagged unreliable below this snap fraction.
    double snap_threshold = 0.95;
};

struct ProblemSpec {
    HarmonicSpec harmonics;
    FourierTargets targets;
    PenaltyModel penalty;
    SolverOptions options;

    ProblemSpec(HarmonicSpec h, FourierTargets t, PenaltyModel p, SolverOptions o = {})
        : harmonics(std::move(h)), targets(std::move(t)), penalty(std::move(p)), options(o) {
        validate_targets(harmonics, targets);
    }

    [[nodiscard]] const ControlSet& control_set() const { return penalty.set(); }
    [[nodiscard]] std::vector<double> initial_state() const { return targets.stacked(); }
};

}  // namespace shmopt
