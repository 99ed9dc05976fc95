#pragma once

// Staircase signals on [0, pi) with half-wave symmetric extension to
// [0, 2*pi), their Fourier coefficients (closed form and trapezoid
// quadrature) and the staircase-property predicate.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace shmopt {

inline constexpr double kPi = 3.14159265358979323846;

/// Minimum admissible gap between switching angles (and to 0 / pi).
/// Anything closer is a zero-width step up to floating-point noise.
inline constexpr double kMinAngleSeparation = 1e-9;

// =============================================================================
// ControlSet
// =============================================================================

/// The finite set of admissible signal levels u_1 < ... < u_L with
/// u_1 = -1 and u_L = +1.
class ControlSet {
public:
    explicit ControlSet(std::vector<double> levels);

    [[nodiscard]] const std::vector<double>& levels() const { return levels_; }
    [[nodiscard]] std::size_t size() const { return levels_.size(); }
    [[nodiscard]] double level(std::size_t k) const { return levels_[k]; }

    /// Index of the level closest to u (ties resolve to the lower index).
    [[nodiscard]] std::size_t nearest_level(double u) const;

    /// True if u coincides with some level up to `tol`.
    [[nodiscard]] bool contains(double u, double tol = 1e-12) const;

    static ControlSet bilevel() { return ControlSet({-1.0, 1.0}); }
    static ControlSet bang_off_bang() { return ControlSet({-1.0, 0.0, 1.0}); }

private:
    std::vector<double> levels_;
};

// =============================================================================
// StaircaseSignal
// =============================================================================

/// Piecewise constant signal on [0, pi): level waveform[m] on
/// [angles[m-1], angles[m]) with the implicit boundaries angle 0 and pi.
/// The [pi, 2*pi) half is produced on demand by half-wave antisymmetry.
class StaircaseSignal {
public:
    /// waveform has M+1 levels, angles has M strictly increasing entries
    /// in (0, pi); consecutive levels must differ.
    StaircaseSignal(std::vector<double> waveform, std::vector<double> angles);

    [[nodiscard]] const std::vector<double>& waveform() const { return waveform_; }
    [[nodiscard]] const std::vector<double>& angles() const { return angles_; }
    [[nodiscard]] std::size_t switch_count() const { return angles_.size(); }

    /// Value at t in [0, 2*pi). Steps are right-continuous: at t == angles[m]
    /// the value is already waveform[m+1]. For t in [pi, 2*pi) returns
    /// -value(t - pi). Throws std::domain_error outside [0, 2*pi).
    [[nodiscard]] double evaluate(double t) const;

private:
    std::vector<double> waveform_;
    std::vector<double> angles_;
};

// =============================================================================
// Harmonic bookkeeping
// =============================================================================

/// The requested cosine and sine harmonic indices (all odd, increasing).
class HarmonicSpec {
public:
    HarmonicSpec(std::vector<int> cos_indices, std::vector<int> sin_indices);

    [[nodiscard]] const std::vector<int>& cos_indices() const { return cos_indices_; }
    [[nodiscard]] const std::vector<int>& sin_indices() const { return sin_indices_; }
    [[nodiscard]] std::size_t cos_count() const { return cos_indices_.size(); }
    [[nodiscard]] std::size_t sin_count() const { return sin_indices_.size(); }
    /// Stacked state dimension (cosine block first, then sine block).
    [[nodiscard]] std::size_t dimension() const { return cos_indices_.size() + sin_indices_.size(); }

private:
    std::vector<int> cos_indices_;
    std::vector<int> sin_indices_;
};

/// Target values for the coefficients selected by a HarmonicSpec.
struct FourierTargets {
    std::vector<double> a;
    std::vector<double> b;

    /// Stacked [a; b] vector.
    [[nodiscard]] std::vector<double> stacked() const;
};

/// Throws std::invalid_argument unless the target lengths match `spec`.
void validate_targets(const HarmonicSpec& spec, const FourierTargets& targets);

// =============================================================================
// Operations
// =============================================================================

/// Fourier coefficients of the staircase signal for the requested indices,
/// a_j = (2/(j*pi)) * sum_m s_m (sin(j phi_{m+1}) - sin(j phi_m)),
/// b_j = (2/(j*pi)) * sum_m s_m (cos(j phi_m) - cos(j phi_{m+1})).
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>>
fourier_closed_form(const StaircaseSignal& signal, const HarmonicSpec& spec);

/// Trapezoid approximation of a_j = (2/pi) Int_0^pi u(t) cos(j t) dt and the
/// sine analogue, sampling u at `nodes` uniform points on [0, pi]. The final
/// node samples the left limit u(pi^-), so piecewise constant inputs defined
/// on [0, pi) integrate consistently.
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>>
fourier_quadrature(const std::function<double(double)>& u, const HarmonicSpec& spec,
                   std::size_t nodes);

/// True iff no control-set level lies strictly between any two consecutive
/// waveform values. Throws if some waveform value is not a member of `set`.
[[nodiscard]] bool is_staircase(const StaircaseSignal& signal, const ControlSet& set);

}  // namespace shmopt
