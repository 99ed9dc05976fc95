#include "shmopt/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shmopt {

namespace {

// tanh saturates to exactly +-1.0 in double precision beyond ~19.06.
double saturating_tanh(double x) {
    if (x >= 20.0) return 1.0;
    if (x <= -20.0) return -1.0;
    return std::tanh(x);
}

// sech^2(x) = 1 - tanh^2(x), zero once tanh has saturated.
double sech_squared(double x) {
    const double t = saturating_tanh(x);
    return 1.0 - t * t;
}

}  // namespace

PenaltyModel::PenaltyModel(ControlSet set, PenaltyMode mode, double alpha, double beta,
                           double epsilon, double theta)
    : set_(std::move(set)), mode_(mode), alpha_(alpha), beta_(beta), epsilon_(epsilon), theta_(theta) {
    if (!(epsilon_ > 0.0)) throw std::invalid_argument("penalty weight epsilon must be positive");
    if (mode_ == PenaltyMode::Linear) {
        if (alpha_ == 0.0) throw std::invalid_argument("linear penalty requires alpha != 0");
    } else {
        if (!(alpha_ > 0.0)) throw std::invalid_argument("piecewise penalty requires alpha > 0");
        if (!(theta_ > 0.0)) throw std::invalid_argument("smoothing parameter theta must be positive");
    }
}

double PenaltyModel::parabola(double u) const {
    const double d = u - beta_;
    return alpha_ * d * d;
}

double lambda_segment(const PenaltyModel& model, std::size_t k, double u) {
    const auto& levels = model.set().levels();
    if (k + 1 >= levels.size()) throw std::invalid_argument("segment index out of range");
    const double lo = levels[k];
    const double hi = levels[k + 1];
    return ((u - lo) * model.parabola(hi) + (hi - u) * model.parabola(lo)) / (hi - lo);
}

double exact_penalty_value(const PenaltyModel& model, double u) {
    if (model.mode() == PenaltyMode::Linear) return model.alpha() * u;
    const auto& levels = model.set().levels();
    if (u >= levels.back()) return model.parabola(levels.back());
    const auto it = std::upper_bound(levels.begin(), levels.end(), u);
    const std::size_t k = (it == levels.begin()) ? 0 : static_cast<std::size_t>(it - levels.begin()) - 1;
    return lambda_segment(model, std::min(k, levels.size() - 2), u);
}

double penalty_value(const PenaltyModel& model, double u) {
    if (!(std::abs(u) <= 1.0)) throw std::domain_error("penalty_value: |u| must not exceed 1");
    switch (model.mode()) {
        case PenaltyMode::Linear:
        case PenaltyMode::PiecewiseAffine:
            return exact_penalty_value(model, u);
        case PenaltyMode::SmoothPiecewiseAffine:
            return smooth_value(model, u);
    }
    return 0.0;  // unreachable
}

std::vector<double> segment_slopes(const PenaltyModel& model) {
    if (model.mode() == PenaltyMode::Linear) {
        throw std::invalid_argument("segment slopes are defined for piecewise modes only");
    }
    const auto& levels = model.set().levels();
    std::vector<double> p(levels.size() - 1);
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        p[k] = (model.parabola(levels[k + 1]) - model.parabola(levels[k])) / (levels[k + 1] - levels[k]);
    }
    return p;
}

double smooth_value(const PenaltyModel& model, double u) {
    if (model.mode() == PenaltyMode::Linear) return model.alpha() * u;
    const auto& levels = model.set().levels();
    const double theta = model.theta();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const double window = 0.5 * (saturating_tanh(theta * (u - levels[k])) +
                                     saturating_tanh(theta * (levels[k + 1] - u)));
        if (window != 0.0) acc += lambda_segment(model, k, u) * window;
    }
    return acc;
}

double smooth_derivative(const PenaltyModel& model, double u) {
    if (model.mode() == PenaltyMode::Linear) return model.alpha();
    const auto& levels = model.set().levels();
    const double theta = model.theta();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const double lo = levels[k];
        const double hi = levels[k + 1];
        const double window = 0.5 * (saturating_tanh(theta * (u - lo)) +
                                     saturating_tanh(theta * (hi - u)));
        const double window_slope = 0.5 * theta * (sech_squared(theta * (u - lo)) -
                                                   sech_squared(theta * (hi - u)));
        const double slope = (model.parabola(hi) - model.parabola(lo)) / (hi - lo);
        if (window != 0.0) acc += slope * window;
        if (window_slope != 0.0) acc += lambda_segment(model, k, u) * window_slope;
    }
    return acc;
}

HamiltonianArgmin hamiltonian_argmin(const PenaltyModel& model, double mu) {
    HamiltonianArgmin result;
    const double eps = model.epsilon();
    if (model.mode() == PenaltyMode::Linear) {
        const double tie = eps * model.alpha();
        if (mu == tie) {
            result.flat = true;
            result.flat_lo = -1.0;
            result.flat_hi = 1.0;
            result.value = -1.0;
        } else {
            result.value = (mu < tie) ? -1.0 : 1.0;
        }
        return result;
    }
    const auto& levels = model.set().levels();
    const std::vector<double> p = segment_slopes(model);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (mu == eps * p[k]) {
            result.flat = true;
            result.flat_lo = levels[k];
            result.flat_hi = levels[k + 1];
            result.value = levels[k];
            return result;
        }
    }
    if (mu < eps * p.front()) {
        result.value = levels.front();
    } else if (mu > eps * p.back()) {
        result.value = levels.back();
    } else {
        // unique k with eps*p_{k-1} < mu < eps*p_k
        std::size_t k = 1;
        while (k < p.size() && mu > eps * p[k]) ++k;
        result.value = levels[k];
    }
    return result;
}

bool has_unique_minimizer(const PenaltyModel& model) {
    if (model.mode() == PenaltyMode::Linear) return model.alpha() != 0.0;
    for (double p : segment_slopes(model)) {
        if (p == 0.0) return false;
    }
    return true;
}

HamiltonianArgmin penalty_minimizer(const PenaltyModel& model) {
    // The minimizer of L alone is the Hamiltonian argmin at mu = 0.
    return hamiltonian_argmin(model, 0.0);
}

double penalty_max_abs(const PenaltyModel& model) {
    if (model.mode() == PenaltyMode::Linear) return std::abs(model.alpha());
    double best = 0.0;
    for (double u : model.set().levels()) {
        best = std::max(best, std::abs(model.parabola(u)));
    }
    return best;
}

}  // namespace shmopt
