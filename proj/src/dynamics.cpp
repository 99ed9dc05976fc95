#include "shmopt/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace shmopt {

DynamicsSpec::DynamicsSpec(HarmonicSpec s, std::vector<double> x0)
    : spec(std::move(s)), initial_state(std::move(x0)) {
    if (initial_state.size() != spec.dimension()) {
        throw std::invalid_argument("initial state dimension must equal N_a + N_b");
    }
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("time grid needs at least two nodes");
    if (nodes_.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
    if (nodes_.back() != kPi) throw std::invalid_argument("time grid must end at pi");
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
        if (!(nodes_[k] < nodes_[k + 1])) {
            throw std::invalid_argument("time grid nodes must be strictly increasing");
        }
    }
}

std::vector<double> TimeGrid::trapezoid_weights() const {
    std::vector<double> w(nodes_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
        const double half = 0.5 * step(k);
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

TimeGrid TimeGrid::uniform(std::size_t count) {
    if (count < 2) throw std::invalid_argument("uniform grid needs at least two nodes");
    std::vector<double> nodes(count);
    for (std::size_t k = 0; k < count; ++k) {
        nodes[k] = kPi * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    nodes.front() = 0.0;
    nodes.back() = kPi;
    return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::from_step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("grid step must be positive");
    std::vector<double> nodes;
    for (double t = 0.0; t < kPi - kMinAngleSeparation; t += dt) nodes.push_back(t);
    nodes.push_back(kPi);
    return TimeGrid(std::move(nodes));
}

std::vector<double> basis_vector(const HarmonicSpec& spec, double t) {
    std::vector<double> d;
    d.reserve(spec.dimension());
    for (int j : spec.cos_indices()) d.push_back(std::cos(j * t));
    for (int j : spec.sin_indices()) d.push_back(std::sin(j * t));
    return d;
}

std::vector<double> terminal_state_exact(const DynamicsSpec& dyn, const StaircaseSignal& signal) {
    auto [a, b] = fourier_closed_form(signal, dyn.spec);
    std::vector<double> x = dyn.initial_state;
    for (std::size_t i = 0; i < a.size(); ++i) x[i] -= a[i];
    for (std::size_t i = 0; i < b.size(); ++i) x[a.size() + i] -= b[i];
    return x;
}

EulerResult euler_integrate(const DynamicsSpec& dyn, const TimeGrid& grid,
                            const std::vector<double>& control) {
    if (control.size() != grid.size()) {
        throw std::invalid_argument("control length must match the grid node count");
    }
    EulerResult result;
    result.trajectory.reserve(grid.size());
    std::vector<double> x = dyn.initial_state;
    result.trajectory.push_back(x);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const std::vector<double> d = basis_vector(dyn.spec, grid.node(k));
        const double c = grid.step(k) * 2.0 / kPi * control[k];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * d[i];
        result.trajectory.push_back(x);
    }
    result.terminal = x;
    return result;
}

TerminalMap::TerminalMap(const HarmonicSpec& spec, const TimeGrid& grid)
    : rows_(spec.dimension()), cols_(grid.size() - 1), data_(rows_ * cols_) {
    for (std::size_t k = 0; k < cols_; ++k) {
        const std::vector<double> d = basis_vector(spec, grid.node(k));
        const double c = -2.0 / kPi * grid.step(k);
        double* col = data_.data() + k * rows_;
        for (std::size_t i = 0; i < rows_; ++i) col[i] = c * d[i];
    }
}

std::vector<double> TerminalMap::terminal(const std::vector<double>& x0,
                                          const std::vector<double>& control) const {
    if (x0.size() != rows_) throw std::invalid_argument("x0 dimension mismatch");
    if (control.size() < cols_) throw std::invalid_argument("control too short for terminal map");
    std::vector<double> x = x0;
    for (std::size_t k = 0; k < cols_; ++k) {
        const double u = control[k];
        const double* col = data_.data() + k * rows_;
        for (std::size_t i = 0; i < rows_; ++i) x[i] += col[i] * u;
    }
    return x;
}

std::vector<double> TerminalMap::apply_transpose(const std::vector<double>& x) const {
    if (x.size() != rows_) throw std::invalid_argument("state dimension mismatch");
    std::vector<double> g(cols_);
    for (std::size_t k = 0; k < cols_; ++k) {
        const double* col = data_.data() + k * rows_;
        double acc = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) acc += col[i] * x[i];
        g[k] = acc;
    }
    return g;
}

}  // namespace shmopt
