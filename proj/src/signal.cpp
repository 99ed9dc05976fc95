#include "shmopt/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shmopt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

// -----------------------------------------------------------------------------
// ControlSet
// -----------------------------------------------------------------------------

ControlSet::ControlSet(std::vector<double> levels) : levels_(std::move(levels)) {
    require(levels_.size() >= 2, "control set needs at least two levels");
    require(levels_.front() == -1.0, "control set must start at -1");
    require(levels_.back() == 1.0, "control set must end at +1");
    for (std::size_t k = 0; k + 1 < levels_.size(); ++k) {
        require(levels_[k] < levels_[k + 1], "control set levels must be strictly increasing");
    }
}

std::size_t ControlSet::nearest_level(double u) const {
    std::size_t best = 0;
    double best_dist = std::abs(u - levels_[0]);
    for (std::size_t k = 1; k < levels_.size(); ++k) {
        const double d = std::abs(u - levels_[k]);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return best;
}

bool ControlSet::contains(double u, double tol) const {
    return std::abs(u - levels_[nearest_level(u)]) <= tol;
}

// -----------------------------------------------------------------------------
// StaircaseSignal
// -----------------------------------------------------------------------------

StaircaseSignal::StaircaseSignal(std::vector<double> waveform, std::vector<double> angles)
    : waveform_(std::move(waveform)), angles_(std::move(angles)) {
    require(!waveform_.empty(), "waveform must not be empty");
    require(waveform_.size() == angles_.size() + 1, "waveform needs exactly one more level than angles");
    double prev = 0.0;
    for (double phi : angles_) {
        require(phi - prev >= kMinAngleSeparation, "switching angles must be strictly increasing with separation >= 1e-9");
        prev = phi;
    }
    require(angles_.empty() || kPi - angles_.back() >= kMinAngleSeparation, "last switching angle must stay below pi");
    for (std::size_t m = 0; m + 1 < waveform_.size(); ++m) {
        require(waveform_[m] != waveform_[m + 1], "consecutive waveform levels must differ");
    }
}

double StaircaseSignal::evaluate(double t) const {
    if (!(t >= 0.0 && t < 2.0 * kPi)) throw std::domain_error("evaluate: t must lie in [0, 2*pi)");
    double sign = 1.0;
    if (t >= kPi) {
        t -= kPi;
        sign = -1.0;
    }
    // Right-continuous steps: index = number of angles <= t.
    const auto it = std::upper_bound(angles_.begin(), angles_.end(), t);
    const auto idx = static_cast<std::size_t>(it - angles_.begin());
    return sign * waveform_[idx];
}

// -----------------------------------------------------------------------------
// HarmonicSpec / FourierTargets
// -----------------------------------------------------------------------------

HarmonicSpec::HarmonicSpec(std::vector<int> cos_indices, std::vector<int> sin_indices)
    : cos_indices_(std::move(cos_indices)), sin_indices_(std::move(sin_indices)) {
    auto check = [](const std::vector<int>& idx, const char* which) {
        int prev = 0;
        for (int j : idx) {
            if (j <= 0 || j % 2 == 0) {
                throw std::invalid_argument(std::string(which) +
                                            " harmonic indices must be odd positive integers");
            }
            if (j <= prev) {
                throw std::invalid_argument(std::string(which) +
                                            " harmonic indices must be strictly increasing");
            }
            prev = j;
        }
    };
    check(cos_indices_, "cos");
    check(sin_indices_, "sin");
}

std::vector<double> FourierTargets::stacked() const {
    std::vector<double> x(a);
    x.insert(x.end(), b.begin(), b.end());
    return x;
}

void validate_targets(const HarmonicSpec& spec, const FourierTargets& targets) {
    require(targets.a.size() == spec.cos_count(), "a-target length must match the cosine index count");
    require(targets.b.size() == spec.sin_count(), "b-target length must match the sine index count");
}

// -----------------------------------------------------------------------------
// Fourier coefficients
// -----------------------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>>
fourier_closed_form(const StaircaseSignal& signal, const HarmonicSpec& spec) {
    const auto& s = signal.waveform();
    const auto& phi = signal.angles();
    const std::size_t segments = s.size();

    auto segment_bounds = [&](std::size_t m) {
        const double lo = (m == 0) ? 0.0 : phi[m - 1];
        const double hi = (m == segments - 1) ? kPi : phi[m];
        return std::pair<double, double>{lo, hi};
    };

    std::vector<double> a(spec.cos_count());
    std::vector<double> b(spec.sin_count());
    for (std::size_t i = 0; i < spec.cos_count(); ++i) {
        const double j = spec.cos_indices()[i];
        double acc = 0.0;
        for (std::size_t m = 0; m < segments; ++m) {
            const auto [lo, hi] = segment_bounds(m);
            acc += s[m] * (std::sin(j * hi) - std::sin(j * lo));
        }
        a[i] = 2.0 / (j * kPi) * acc;
    }
    for (std::size_t i = 0; i < spec.sin_count(); ++i) {
        const double j = spec.sin_indices()[i];
        double acc = 0.0;
        for (std::size_t m = 0; m < segments; ++m) {
            const auto [lo, hi] = segment_bounds(m);
            acc += s[m] * (std::cos(j * lo) - std::cos(j * hi));
        }
        b[i] = 2.0 / (j * kPi) * acc;
    }
    return {std::move(a), std::move(b)};
}

std::pair<std::vector<double>, std::vector<double>>
fourier_quadrature(const std::function<double(double)>& u, const HarmonicSpec& spec,
                   std::size_t nodes) {
    require(nodes >= 2, "quadrature needs at least two nodes");
    const double h = kPi / static_cast<double>(nodes - 1);
    const double t_last = std::nextafter(kPi, 0.0);

    std::vector<double> samples(nodes);
    std::vector<double> ts(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double t = std::min(static_cast<double>(i) * h, kPi);
        ts[i] = t;
        samples[i] = u(std::min(t, t_last));
    }

    std::vector<double> a(spec.cos_count());
    std::vector<double> b(spec.sin_count());
    auto trapezoid = [&](auto integrand) {
        double acc = 0.5 * (integrand(0) + integrand(nodes - 1));
        for (std::size_t i = 1; i + 1 < nodes; ++i) acc += integrand(i);
        return acc * h * 2.0 / kPi;
    };
    for (std::size_t i = 0; i < spec.cos_count(); ++i) {
        const double j = spec.cos_indices()[i];
        a[i] = trapezoid([&](std::size_t k) { return samples[k] * std::cos(j * ts[k]); });
    }
    for (std::size_t i = 0; i < spec.sin_count(); ++i) {
        const double j = spec.sin_indices()[i];
        b[i] = trapezoid([&](std::size_t k) { return samples[k] * std::sin(j * ts[k]); });
    }
    return {std::move(a), std::move(b)};
}

bool is_staircase(const StaircaseSignal& signal, const ControlSet& set) {
    const auto& s = signal.waveform();
    for (double level : s) {
        if (!set.contains(level)) {
            throw std::invalid_argument("waveform level is not a member of the control set");
        }
    }
    for (std::size_t m = 0; m + 1 < s.size(); ++m) {
        const double lo = std::min(s[m], s[m + 1]);
        const double hi = std::max(s[m], s[m + 1]);
        for (double u : set.levels()) {
            if (u > lo + 1e-15 && u < hi - 1e-15) return false;
        }
    }
    return true;
}

}  // namespace shmopt
