#pragma once

// Penalty family for the control: the parabola P(u) = alpha*(u-beta)^2, its
// piecewise-affine interpolant over the control-set levels, the segment
// slopes, a tanh-window smooth approximation with analytic derivative, and
// the pointwise Hamiltonian argmin that drives both the PMP reconstruction
// and the staircase-structure predicates.

#include <vector>

#include "shmopt/signal.hpp"

namespace shmopt {

enum class PenaltyMode {
    Linear,                // L(u) = alpha * u (bilevel / bang-bang runs)
    PiecewiseAffine,       // exact interpolant of the parabola
    SmoothPiecewiseAffine  // tanh-window smoothing of the interpolant
};

// =============================================================================
// PenaltyModel
// =============================================================================

class PenaltyModel {
public:
    PenaltyModel(ControlSet set, PenaltyMode mode, double alpha, double beta,
                 double epsilon, double theta);

    [[nodiscard]] const ControlSet& set() const { return set_; }
    [[nodiscard]] PenaltyMode mode() const { return mode_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] double epsilon() const { return epsilon_; }
    [[nodiscard]] double theta() const { return theta_; }

    /// P(u) = alpha * (u - beta)^2.
    [[nodiscard]] double parabola(double u) const;

    /// Number of interpolation segments (L - 1).
    [[nodiscard]] std::size_t segment_count() const { return set_.size() - 1; }

private:
    ControlSet set_;
    PenaltyMode mode_;
    double alpha_;
    double beta_;
    double epsilon_;
    double theta_;
};

// =============================================================================
// Operations
// =============================================================================

/// Affine interpolant of the parabola between (u_k, P(u_k)) and
/// (u_{k+1}, P(u_{k+1})), evaluated at u. Segments are 0-based:
/// segment k spans [levels[k], levels[k+1]], k in [0, L-2].
[[nodiscard]] double lambda_segment(const PenaltyModel& model, std::size_t k, double u);

/// The penalty in the model's own mode: alpha*u (linear), the exact
/// interpolant (piecewise), or the tanh-smoothed interpolant (smooth).
/// Throws std::domain_error for |u| > 1.
[[nodiscard]] double penalty_value(const PenaltyModel& model, double u);

/// The exact penalty used by verification and extraction regardless of mode:
/// alpha*u for linear models, the piecewise interpolant otherwise.
[[nodiscard]] double exact_penalty_value(const PenaltyModel& model, double u);

/// Chord slopes p_k = (P(u_{k+1}) - P(u_k)) / (u_{k+1} - u_k), 0-based,
/// nondecreasing. Throws for linear mode.
[[nodiscard]] std::vector<double> segment_slopes(const PenaltyModel& model);

/// Tanh-window smoothing L^theta(u) = sum_k lambda_k(u) chi^theta_k(u) with
/// chi^theta_k(u) = (tanh(theta(u - u_k)) + tanh(theta(u_{k+1} - u))) / 2.
/// Defined on all of R; linear models return alpha*u.
[[nodiscard]] double smooth_value(const PenaltyModel& model, double u);

/// Exact analytic derivative of smooth_value.
[[nodiscard]] double smooth_derivative(const PenaltyModel& model, double u);

/// Pointwise minimizer of J(u, mu) = epsilon * L(u) - mu * u over [-1, 1].
/// At the finitely many ties mu == epsilon * p_k the argmin is a whole
/// segment, reported explicitly; `value` is then the left endpoint.
struct HamiltonianArgmin {
    double value = 0.0;
    bool flat = false;
    double flat_lo = 0.0;
    double flat_hi = 0.0;
};

[[nodiscard]] HamiltonianArgmin hamiltonian_argmin(const PenaltyModel& model, double mu);

/// True iff the exact penalty has a unique minimizer on [-1, 1]:
/// alpha != 0 (linear) or no zero chord slope (piecewise).
[[nodiscard]] bool has_unique_minimizer(const PenaltyModel& model);

/// Minimizer of the exact penalty on [-1, 1]; a flat segment when the
/// minimizer is not unique.
[[nodiscard]] HamiltonianArgmin penalty_minimizer(const PenaltyModel& model);

/// max over [-1, 1] of |exact penalty| (the constant in the terminal-residual
/// bound).
[[nodiscard]] double penalty_max_abs(const PenaltyModel& model);

}  // namespace shmopt
