#pragma once

// The controlled linear ODE x'(t) = -(2/pi) D(t) u(t) whose terminal state
// carries the selected Fourier coefficients: basis assembly, the exact
// linear terminal map, and forward Euler integration on a time grid.

#include <vector>

#include "shmopt/signal.hpp"

namespace shmopt {

// =============================================================================
// DynamicsSpec / TimeGrid
// =============================================================================

/// Harmonic selection plus the initial state x_0 = [a_T; b_T].
struct DynamicsSpec {
    HarmonicSpec spec;
    std::vector<double> initial_state;

    DynamicsSpec(HarmonicSpec s, std::vector<double> x0);
};

/// Partition 0 = t_1 < t_2 < ... < t_{N_t} = pi.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> nodes);

    [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] double node(std::size_t k) const { return nodes_[k]; }
    [[nodiscard]] double step(std::size_t k) const { return nodes_[k + 1] - nodes_[k]; }

    /// Trapezoid quadrature weights over the grid (size N_t).
    [[nodiscard]] std::vector<double> trapezoid_weights() const;

    /// Uniform grid with `count` nodes.
    static TimeGrid uniform(std::size_t count);

    /// Nodes 0, dt, 2*dt, ... plus the endpoint pi. With dt = 0.1 this is
    /// the coarse partition {0, 0.1, ..., 3.1, pi}.
    static TimeGrid from_step(double dt);

private:
    std::vector<double> nodes_;
};

// =============================================================================
// Operations
// =============================================================================

/// D(t) = [cos(e_a^1 t) ... cos(e_a^{N_a} t), sin(e_b^1 t) ... sin(e_b^{N_b} t)].
[[nodiscard]] std::vector<double> basis_vector(const HarmonicSpec& spec, double t);

/// Exact terminal state x(pi) = x_0 - [a(signal); b(signal)] of the reversed
/// dynamics under the given staircase control. Zero iff the signal meets the
/// targets stacked in x_0.
[[nodiscard]] std::vector<double> terminal_state_exact(const DynamicsSpec& dyn,
                                                       const StaircaseSignal& signal);

struct EulerResult {
    /// States x_1 ... x_{N_t}, each of dimension N_a + N_b.
    std::vector<std::vector<double>> trajectory;
    std::vector<double> terminal;
};

/// Explicit Euler on the grid: x_{k+1} = x_k - dt_k (2/pi) D(t_k) u_k.
/// `control` must provide one entry per grid node; the final entry does not
/// enter the dynamics.
[[nodiscard]] EulerResult euler_integrate(const DynamicsSpec& dyn, const TimeGrid& grid,
                                          const std::vector<double>& control);

/// Dense terminal map: terminal = x_0 + B * u[0 .. N_t-2] with
/// B[:,k] = -(2/pi) dt_k D(t_k), stored column-major as flat data.
class TerminalMap {
public:
    TerminalMap(const HarmonicSpec& spec, const TimeGrid& grid);

    [[nodiscard]] std::size_t state_dim() const { return rows_; }
    [[nodiscard]] std::size_t control_dim() const { return cols_; }

    /// column k of B (length state_dim).
    [[nodiscard]] const double* column(std::size_t k) const { return data_.data() + k * rows_; }

    /// x_0 + B * u (ignores control entries beyond control_dim).
    [[nodiscard]] std::vector<double> terminal(const std::vector<double>& x0,
                                               const std::vector<double>& control) const;

    /// g = B^T * x, length control_dim.
    [[nodiscard]] std::vector<double> apply_transpose(const std::vector<double>& x) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

}  // namespace shmopt
