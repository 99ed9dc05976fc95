#include "shmopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shmopt {

namespace {

double clip_box(double v) { return std::clamp(v, -1.0, 1.0); }

double optimizer_penalty_value(const PenaltyModel& m, double u) {
    if (m.mode() == PenaltyMode::Linear) return m.alpha() * u;
    return smooth_value(m, u);
}

double optimizer_penalty_derivative(const PenaltyModel& m, double u) {
    if (m.mode() == PenaltyMode::Linear) return m.alpha();
    return smooth_derivative(m, u);
}

/// mu(t) = (2/pi) x(pi) . D(t).
double switching_function(const HarmonicSpec& spec, const std::vector<double>& terminal, double t) {
    double acc = 0.0;
    std::size_t i = 0;
    for (int j : spec.cos_indices()) acc += terminal[i++] * std::cos(j * t);
    for (int j : spec.sin_indices()) acc += terminal[i++] * std::sin(j * t);
    return 2.0 / kPi * acc;
}

/// Tie values eps*p_k separating the argmin bands, indexed by segment.
std::vector<double> argmin_tie_values(const PenaltyModel& model) {
    if (model.mode() == PenaltyMode::Linear) {
        return {model.epsilon() * model.alpha()};
    }
    std::vector<double> ties = segment_slopes(model);
    for (double& p : ties) p *= model.epsilon();
    return ties;
}

/// Level index of the argmin value (left endpoint index on flat ties).
std::size_t argmin_level_index(const ControlSet& set, const HamiltonianArgmin& am) {
    return set.nearest_level(am.value);
}

/// Root of mu(t) - tie on [lo, hi] by bisection, assuming a sign change.
double bisect_crossing(const HarmonicSpec& spec, const std::vector<double>& terminal, double tie,
                       double lo, double hi, double tol) {
    double flo = switching_function(spec, terminal, lo) - tie;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = switching_function(spec, terminal, mid) - tie;
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// -----------------------------------------------------------------------------
// DiscreteControl
// -----------------------------------------------------------------------------

DiscreteControl::DiscreteControl(std::vector<double> v, TimeGrid g)
    : values(std::move(v)), grid(std::move(g)) {
    if (values.size() != grid.size()) {
        throw std::invalid_argument("control length must match the grid node count");
    }
    for (double& u : values) {
        if (std::abs(u) > 1.0 + 1e-9) {
            throw std::invalid_argument("control values must lie in [-1, 1]");
        }
        u = clip_box(u);
    }
}

// -----------------------------------------------------------------------------
// DiscretizedProblem
// -----------------------------------------------------------------------------

DiscretizedProblem::DiscretizedProblem(const ProblemSpec& spec, const TimeGrid& grid)
    : spec_(spec),
      grid_(grid),
      map_(spec.harmonics, grid),
      weights_(grid.trapezoid_weights()),
      x0_(spec.initial_state()) {}

void DiscretizedProblem::set_initial_state(std::vector<double> x0) {
    if (x0.size() != map_.state_dim()) throw std::invalid_argument("initial state dimension mismatch");
    x0_ = std::move(x0);
}

std::vector<double> DiscretizedProblem::terminal_state(const std::vector<double>& u) const {
    return map_.terminal(x0_, u);
}

double DiscretizedProblem::penalty_term(const std::vector<double>& u) const {
    const PenaltyModel& model = spec_.penalty;
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        acc += weights_[k] * optimizer_penalty_value(model, u[k]);
    }
    return model.epsilon() * acc;
}

double DiscretizedProblem::objective(const std::vector<double>& u) const {
    const std::vector<double> x = terminal_state(u);
    double quad = 0.0;
    for (double v : x) quad += v * v;
    return 0.5 * quad + penalty_term(u);
}

double DiscretizedProblem::objective_and_gradient(const std::vector<double>& u,
                                                  std::vector<double>& grad) const {
    const PenaltyModel& model = spec_.penalty;
    const std::vector<double> x = terminal_state(u);
    double quad = 0.0;
    for (double v : x) quad += v * v;

    grad = map_.apply_transpose(x);
    grad.resize(u.size(), 0.0);  // last node has no dynamics column
    double pen = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        pen += weights_[k] * optimizer_penalty_value(model, u[k]);
        grad[k] += model.epsilon() * weights_[k] * optimizer_penalty_derivative(model, u[k]);
    }
    return 0.5 * quad + model.epsilon() * pen;
}

double DiscretizedProblem::objective_exact(const std::vector<double>& u) const {
    const PenaltyModel& model = spec_.penalty;
    const std::vector<double> x = terminal_state(u);
    double quad = 0.0;
    for (double v : x) quad += v * v;
    double pen = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        pen += weights_[k] * exact_penalty_value(model, u[k]);
    }
    return 0.5 * quad + model.epsilon() * pen;
}

// -----------------------------------------------------------------------------
// Free-function wrappers
// -----------------------------------------------------------------------------

std::pair<double, std::vector<double>> objective_and_gradient(const ProblemSpec& spec,
                                                              const DiscreteControl& u) {
    DiscretizedProblem problem(spec, u.grid);
    std::vector<double> grad;
    const double value = problem.objective_and_gradient(u.values, grad);
    return {value, std::move(grad)};
}

double objective_exact(const ProblemSpec& spec, const DiscreteControl& u) {
    return DiscretizedProblem(spec, u.grid).objective_exact(u.values);
}

// -----------------------------------------------------------------------------
// solve
// -----------------------------------------------------------------------------

SolveReport solve(const ProblemSpec& spec, const TimeGrid& grid,
                  const std::optional<DiscreteControl>& init) {
    const SolverOptions& opts = spec.options;
    DiscretizedProblem problem(spec, grid);
    const std::size_t n = grid.size();

    std::vector<double> u;
    if (init.has_value()) {
        if (init->values.size() != n) throw std::invalid_argument("warm start length mismatch");
        u = init->values;
    } else {
        const HamiltonianArgmin am = penalty_minimizer(spec.penalty);
        const double start = am.flat ? 0.5 * (am.flat_lo + am.flat_hi) : am.value;
        u.assign(n, start);
    }
    for (double& v : u) v = clip_box(v);

    std::vector<double> grad;
    double value = problem.objective_and_gradient(u, grad);

    auto stationarity = [&](const std::vector<double>& uu, const std::vector<double>& g) {
        double r = 0.0;
        for (std::size_t i = 0; i < uu.size(); ++i) {
            r = std::max(r, std::abs(uu[i] - clip_box(uu[i] - g[i])));
        }
        return r;
    };

    double grad_inf = 0.0;
    for (double g : grad) grad_inf = std::max(grad_inf, std::abs(g));
    double bb_step = 1.0 / std::max(grad_inf, 1e-12);

    SolveReport report{DiscreteControl(u, grid)};
    report.monotone_descent = true;

    std::vector<double> direction(n), trial(n), grad_new(n);
    double residual = stationarity(u, grad);
    int iter = 0;
    bool converged = residual <= opts.stationarity_tol;

    while (!converged && iter < opts.max_iters) {
        ++iter;
        double gd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            direction[i] = clip_box(u[i] - bb_step * grad[i]) - u[i];
            gd += grad[i] * direction[i];
        }
        if (gd >= 0.0) break;  // no descent direction left at this scale

        double step = 1.0;
        double trial_value = 0.0;
        bool accepted = false;
        while (step >= 1e-18) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = clip_box(u[i] + step * direction[i]);
            trial_value = problem.objective(trial);
            if (trial_value <= value + 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const double new_value = problem.objective_and_gradient(trial, grad_new);
        if (new_value > value + 1e-12) report.monotone_descent = false;

        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = trial[i] - u[i];
            const double y = grad_new[i] - grad[i];
            ss += s * s;
            sy += s * y;
        }
        bb_step = (sy > 1e-30) ? std::clamp(ss / sy, 1e-10, 1e12) : 1e12;

        u.swap(trial);
        grad.swap(grad_new);
        value = new_value;
        residual = stationarity(u, grad);
        converged = residual <= opts.stationarity_tol;
    }

    report.control = DiscreteControl(u, grid);
    report.iterations = iter;
    report.converged = converged;
    report.stationarity = residual;
    report.terminal_state = problem.terminal_state(u);
    double quad = 0.0;
    for (double v : report.terminal_state) quad += v * v;
    report.terminal_residual = std::sqrt(quad);
    report.objective = problem.objective_exact(u);

    Extraction extraction = extract_staircase(report.control, spec, report.terminal_state);
    report.snap_fraction = extraction.snap_fraction;
    report.extraction_reliable = extraction.reliable;
    report.extracted = std::move(extraction.signal);
    report.pmp_agreement = pmp_agreement(spec, report.control, report.terminal_state, opts.snap_tol);
    report.pmp_switch_angles = pmp_reconstruct(spec, report.terminal_state, grid).switch_angles;
    return report;
}

// -----------------------------------------------------------------------------
// Pontryagin reconstruction
// -----------------------------------------------------------------------------

PmpReconstruction pmp_reconstruct(const ProblemSpec& spec, const std::vector<double>& terminal_state,
                                  const TimeGrid& grid) {
    if (terminal_state.size() != spec.harmonics.dimension()) {
        throw std::invalid_argument("terminal state dimension mismatch");
    }
    const PenaltyModel& model = spec.penalty;
    const ControlSet& set = model.set();
    const std::vector<double> ties = argmin_tie_values(model);

    PmpReconstruction rec;
    rec.control.resize(grid.size());
    std::vector<std::size_t> level_idx(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double mu = switching_function(spec.harmonics, terminal_state, grid.node(k));
        const HamiltonianArgmin am = hamiltonian_argmin(model, mu);
        rec.control[k] = am.value;
        level_idx[k] = argmin_level_index(set, am);
    }

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const std::size_t a = level_idx[k];
        const std::size_t b = level_idx[k + 1];
        if (a == b) continue;
        const std::size_t lo_level = std::min(a, b);
        const std::size_t hi_level = std::max(a, b);
        // Linear models have a single tie; piecewise models cross one tie per
        // intermediate boundary.
        if (model.mode() == PenaltyMode::Linear) {
            rec.switch_angles.push_back(bisect_crossing(spec.harmonics, terminal_state, ties[0],
                                                        grid.node(k), grid.node(k + 1),
                                                        spec.options.bisection_tol));
        } else {
            for (std::size_t s = lo_level; s < hi_level; ++s) {
                const double f_lo = switching_function(spec.harmonics, terminal_state, grid.node(k)) - ties[s];
                const double f_hi = switching_function(spec.harmonics, terminal_state, grid.node(k + 1)) - ties[s];
                if ((f_lo <= 0.0) != (f_hi <= 0.0)) {
                    rec.switch_angles.push_back(bisect_crossing(spec.harmonics, terminal_state, ties[s],
                                                                grid.node(k), grid.node(k + 1),
                                                                spec.options.bisection_tol));
                }
            }
        }
    }
    std::sort(rec.switch_angles.begin(), rec.switch_angles.end());
    return rec;
}

double pmp_agreement(const ProblemSpec& spec, const DiscreteControl& control,
                     const std::vector<double>& terminal_state, double tol) {
    const PenaltyModel& model = spec.penalty;
    std::size_t matches = 0;
    for (std::size_t k = 0; k < control.grid.size(); ++k) {
        const double mu = switching_function(spec.harmonics, terminal_state, control.grid.node(k));
        const HamiltonianArgmin am = hamiltonian_argmin(model, mu);
        const double u = control.values[k];
        const bool ok = am.flat ? (u >= am.flat_lo - tol && u <= am.flat_hi + tol)
                                : std::abs(u - am.value) <= tol;
        if (ok) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(control.grid.size());
}

// -----------------------------------------------------------------------------
// Staircase extraction
// -----------------------------------------------------------------------------

namespace {

struct LevelRun {
    std::size_t level;     // control-set index
    std::size_t first;     // first grid node of the run
    std::size_t last;      // last grid node of the run
};

std::vector<LevelRun> snap_runs(const DiscreteControl& control, const ControlSet& set,
                                double snap_tol, double& snap_fraction) {
    const std::size_t n = control.grid.size();
    std::size_t snapped = 0;
    std::vector<LevelRun> runs;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = set.nearest_level(control.values[k]);
        if (std::abs(control.values[k] - set.level(j)) <= snap_tol) ++snapped;
        if (!runs.empty() && runs.back().level == j) {
            runs.back().last = k;
        } else {
            runs.push_back({j, k, k});
        }
    }
    snap_fraction = static_cast<double>(snapped) / static_cast<double>(n);
    return runs;
}

/// Fallback angles for a transition of `count` levels inside one panel,
/// evenly distributed.
void panel_fallback_angles(double t_lo, double t_hi, std::size_t count, std::vector<double>& out) {
    for (std::size_t r = 0; r < count; ++r) {
        out.push_back(t_lo + (t_hi - t_lo) * static_cast<double>(r + 1) / static_cast<double>(count + 1));
    }
}

Extraction build_extraction(const DiscreteControl& control, const ControlSet& set, double snap_tol,
                            double snap_threshold, bool insert_intermediate,
                            const ProblemSpec* spec, const std::vector<double>* terminal_state) {
    double snap_fraction = 0.0;
    const std::vector<LevelRun> runs = snap_runs(control, set, snap_tol, snap_fraction);

    std::vector<double> waveform;
    std::vector<double> angles;
    waveform.push_back(set.level(runs.front().level));

    const std::vector<double> ties = (spec != nullptr && spec->penalty.mode() != PenaltyMode::Linear)
                                         ? argmin_tie_values(spec->penalty)
                                         : std::vector<double>{};

    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        const std::size_t a = runs[r].level;
        const std::size_t b = runs[r + 1].level;
        const double t_lo = control.grid.node(runs[r].last);
        const double t_hi = control.grid.node(runs[r + 1].first);
        const std::size_t jump = (a < b) ? b - a : a - b;

        std::vector<double> panel_angles;
        if (spec != nullptr && terminal_state != nullptr) {
            // Refine through the PMP switching function; one crossing per
            // intermediate level boundary.
            bool complete = true;
            const std::size_t lo_level = std::min(a, b);
            for (std::size_t s = 0; s < jump; ++s) {
                const double tie = (spec->penalty.mode() == PenaltyMode::Linear)
                                       ? spec->penalty.epsilon() * spec->penalty.alpha()
                                       : ties[lo_level + s];
                const double f_lo = switching_function(spec->harmonics, *terminal_state, t_lo) - tie;
                const double f_hi = switching_function(spec->harmonics, *terminal_state, t_hi) - tie;
                if ((f_lo <= 0.0) == (f_hi <= 0.0)) {
                    complete = false;
                    break;
                }
                panel_angles.push_back(bisect_crossing(spec->harmonics, *terminal_state, tie, t_lo,
                                                       t_hi, spec->options.bisection_tol));
            }
            if (complete) {
                std::sort(panel_angles.begin(), panel_angles.end());
            } else {
                panel_angles.clear();
            }
        }
        if (panel_angles.empty()) {
            if (insert_intermediate && jump > 1) {
                panel_fallback_angles(t_lo, t_hi, jump, panel_angles);
            } else {
                panel_angles.push_back(0.5 * (t_lo + t_hi));
            }
        }

        if (insert_intermediate && jump > 1 && panel_angles.size() == jump) {
            const int dir = (b > a) ? 1 : -1;
            for (std::size_t s = 1; s <= jump; ++s) {
                waveform.push_back(set.level(static_cast<std::size_t>(static_cast<long>(a) + dir * static_cast<long>(s))));
            }
            angles.insert(angles.end(), panel_angles.begin(), panel_angles.end());
        } else {
            waveform.push_back(set.level(b));
            angles.push_back(panel_angles.front());
        }
    }

    // Angles must stay strictly increasing; repair rare refinement glitches
    // by pulling offenders back onto their panel midpoints in order.
    for (std::size_t i = 1; i < angles.size(); ++i) {
        if (angles[i] - angles[i - 1] < kMinAngleSeparation) {
            angles[i] = angles[i - 1] + kMinAngleSeparation * 2.0;
        }
    }

    Extraction ex{StaircaseSignal(std::move(waveform), std::move(angles)), snap_fraction,
                  snap_fraction >= snap_threshold};
    return ex;
}

}  // namespace

Extraction extract_staircase(const DiscreteControl& control, const ControlSet& set, double snap_tol,
                             double snap_threshold) {
    if (!(snap_tol > 0.0)) throw std::invalid_argument("snap tolerance must be positive");
    return build_extraction(control, set, snap_tol, snap_threshold, false, nullptr, nullptr);
}

Extraction extract_staircase(const DiscreteControl& control, const ProblemSpec& spec,
                             const std::vector<double>& terminal_state) {
    return build_extraction(control, spec.control_set(), spec.options.snap_tol,
                            spec.options.snap_threshold, true, &spec, &terminal_state);
}

}  // namespace shmopt
