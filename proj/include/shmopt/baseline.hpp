#pragma once

// Classical fixed-waveform approach: optimize the switching angles of a
// prescribed waveform against target coefficients, enumerate admissible
// waveforms, and scan (waveform, target) grids for solvability.

#include <cstdint>
#include <vector>

#include "shmopt/signal.hpp"

namespace shmopt {

// =============================================================================
// Types
// =============================================================================

/// A fixed level sequence s_0 ... s_M; the switching angles are free.
struct WaveformCandidate {
    std::vector<double> levels;
};

struct BaselineResult {
    std::vector<double> angles;
    double optimal_value = 0.0;
    bool solved = false;
    /// Smallest objective seen across the restart initializations (before
    /// descent); the final value never exceeds it.
    double best_initial_value = 0.0;
};

struct BaselineOptions {
    int restarts = 50;
    int max_iters = 2000;
    /// V below this counts as an exact SHM solution.
    double solvable_tol = 1e-8;
    /// Minimum admissible gap between consecutive angles (and to 0 / pi).
    double min_gap = 1e-7;
    double stationarity_tol = 1e-12;
    std::uint64_t seed = 20220913;
    int workers = 0;  // 0 = hardware concurrency (scan only)
};

// =============================================================================
// Operations
// =============================================================================

/// V = ||a(angles) - a_T||^2 + ||b(angles) - b_T||^2 for the fixed waveform,
/// plus the analytic gradient with respect to the angles. Throws when the
/// angles are not strictly ordered inside (0, pi).
[[nodiscard]] std::pair<double, std::vector<double>>
angle_objective(const WaveformCandidate& waveform, const std::vector<double>& angles,
                const HarmonicSpec& spec, const FourierTargets& targets);

/// Multistart projected descent over the ordered-angle set (angles are
/// optimized as cumulative sums of positive increments). Returns the best
/// restart.
[[nodiscard]] BaselineResult optimize_angles(const WaveformCandidate& waveform,
                                             const HarmonicSpec& spec, const FourierTargets& targets,
                                             const BaselineOptions& opts = {});

/// All waveforms of exactly M switches that move only between adjacent
/// levels of the set. Throws when the candidate count exceeds `budget`,
/// naming the count.
[[nodiscard]] std::vector<WaveformCandidate>
enumerate_waveforms(const ControlSet& set, std::size_t switches, std::size_t budget = 100000);

/// optimize_angles for every (waveform, target) pair, row-major by waveform.
[[nodiscard]] std::vector<std::vector<BaselineResult>>
solvable_set_scan(const std::vector<WaveformCandidate>& waveforms, const HarmonicSpec& spec,
                  const std::vector<FourierTargets>& target_grid, const BaselineOptions& opts = {});

}  // namespace shmopt
