#pragma once

// Direct method for the penalized problem on a time grid: discrete objective
// with analytic gradient, spectral projected gradient over the box
// [-1,1]^{N_t} with monotone Armijo backtracking, staircase extraction and
// the Pontryagin-based reconstruction used for verification.

#include <optional>
#include <vector>

#include "shmopt/problem.hpp"

namespace shmopt {

// =============================================================================
// Types
// =============================================================================

struct DiscreteControl {
    std::vector<double> values;  // one entry per grid node, each in [-1, 1]
    TimeGrid grid;

    DiscreteControl(std::vector<double> v, TimeGrid g);
};

struct Extraction {
    StaircaseSignal signal;
    double snap_fraction = 0.0;
    bool reliable = false;
};

struct PmpReconstruction {
    std::vector<double> control;        // level per grid node
    std::vector<double> switch_angles;  // bisected crossings of mu with eps*p_k
};

struct SolveReport {
    DiscreteControl control;
    std::vector<double> terminal_state;
    double terminal_residual = 0.0;
    /// Final objective, recomputed with the exact piecewise penalty.
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool monotone_descent = true;
    /// Final projected-gradient stationarity measure.
    double stationarity = 0.0;
    std::optional<StaircaseSignal> extracted;
    double snap_fraction = 0.0;
    bool extraction_reliable = false;
    double pmp_agreement = 0.0;
    std::vector<double> pmp_switch_angles;
};

// =============================================================================
// Discretization
// =============================================================================

/// Caches the terminal map and quadrature weights of (spec, grid) so that a
/// solve (or a sweep over targets) assembles trigonometry only once.
class DiscretizedProblem {
public:
    DiscretizedProblem(const ProblemSpec& spec, const TimeGrid& grid);

    [[nodiscard]] const ProblemSpec& spec() const { return spec_; }
    [[nodiscard]] const TimeGrid& grid() const { return grid_; }
    [[nodiscard]] const TerminalMap& map() const { return map_; }

    [[nodiscard]] std::vector<double> terminal_state(const std::vector<double>& u) const;

    /// Objective with the optimizer penalty (linear models: alpha*u, otherwise
    /// the tanh-smoothed interpolant) and its analytic gradient.
    double objective_and_gradient(const std::vector<double>& u, std::vector<double>& grad) const;

    /// Objective value only (same penalty as objective_and_gradient).
    [[nodiscard]] double objective(const std::vector<double>& u) const;

    /// Objective with the exact piecewise penalty (reporting / verification).
    [[nodiscard]] double objective_exact(const std::vector<double>& u) const;

    /// Allows sweeping over targets without re-assembling the map.
    void set_initial_state(std::vector<double> x0);

private:
    ProblemSpec spec_;
    TimeGrid grid_;
    TerminalMap map_;
    std::vector<double> weights_;
    std::vector<double> x0_;

    double penalty_term(const std::vector<double>& u) const;
};

// =============================================================================
// Operations
// =============================================================================

/// F = 0.5*||x_{N_t}||^2 + eps * sum_k w_k * L_opt(u_k) and its gradient,
/// where w_k are the trapezoid weights of the grid and L_opt is the
/// optimizer penalty of the model.
[[nodiscard]] std::pair<double, std::vector<double>>
objective_and_gradient(const ProblemSpec& spec, const DiscreteControl& u);

/// Same objective evaluated with the exact piecewise penalty.
[[nodiscard]] double objective_exact(const ProblemSpec& spec, const DiscreteControl& u);

/// Minimize the discretized objective over the box [-1,1]^{N_t}. Warm start
/// from `init` when given, otherwise from the constant penalty minimizer.
/// Non-convergence within max_iters is reported, not thrown.
[[nodiscard]] SolveReport solve(const ProblemSpec& spec, const TimeGrid& grid,
                                const std::optional<DiscreteControl>& init = std::nullopt);

/// Control implied by the Pontryagin conditions for a given terminal state:
/// mu(t) = (2/pi) x(pi) . D(t) evaluated per node, the Hamiltonian argmin at
/// each node (left endpoint on flat ties), and the switching angles located
/// by bisection of mu against the tie values between differing nodes.
[[nodiscard]] PmpReconstruction pmp_reconstruct(const ProblemSpec& spec,
                                                const std::vector<double>& terminal_state,
                                                const TimeGrid& grid);

/// Snap the control to the nearest levels, merge equal runs, place switch
/// angles at panel midpoints. snap_fraction is the share of nodes within
/// snap_tol of some level; below `snap_threshold` the extraction is flagged
/// unreliable.
[[nodiscard]] Extraction extract_staircase(const DiscreteControl& control, const ControlSet& set,
                                           double snap_tol, double snap_threshold = 0.95);

/// As above, but refines the switch angles with the PMP switching function of
/// the supplied terminal state.
[[nodiscard]] Extraction extract_staircase(const DiscreteControl& control, const ProblemSpec& spec,
                                           const std::vector<double>& terminal_state);

/// Share of nodes where `control` matches the PMP reconstruction within tol
/// (nodes on flat ties match any value inside the tied segment).
[[nodiscard]] double pmp_agreement(const ProblemSpec& spec, const DiscreteControl& control,
                                   const std::vector<double>& terminal_state, double tol);

}  // namespace shmopt
