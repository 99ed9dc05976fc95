#include "shmopt/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace shmopt {

namespace {

/// Coefficients of the fixed waveform at the given (ordered) angles.
void coefficients(const WaveformCandidate& waveform, const std::vector<double>& angles,
                  const HarmonicSpec& spec, std::vector<double>& a, std::vector<double>& b) {
    const auto& s = waveform.levels;
    const std::size_t segments = s.size();
    auto bound = [&](std::size_t m) { return (m == 0) ? 0.0 : (m == segments) ? kPi : angles[m - 1]; };
    a.assign(spec.cos_count(), 0.0);
    b.assign(spec.sin_count(), 0.0);
    for (std::size_t i = 0; i < spec.cos_count(); ++i) {
        const double j = spec.cos_indices()[i];
        double acc = 0.0;
        for (std::size_t m = 0; m < segments; ++m) {
            acc += s[m] * (std::sin(j * bound(m + 1)) - std::sin(j * bound(m)));
        }
        a[i] = 2.0 / (j * kPi) * acc;
    }
    for (std::size_t i = 0; i < spec.sin_count(); ++i) {
        const double j = spec.sin_indices()[i];
        double acc = 0.0;
        for (std::size_t m = 0; m < segments; ++m) {
            acc += s[m] * (std::cos(j * bound(m)) - std::cos(j * bound(m + 1)));
        }
        b[i] = 2.0 / (j * kPi) * acc;
    }
}

/// Project v onto {d : d_i >= gap, sum(d) <= limit} (Euclidean).
void project_increments(std::vector<double>& v, double gap, double limit) {
    double sum = 0.0;
    for (double& x : v) {
        x = std::max(x, gap);
        sum += x;
    }
    if (sum <= limit) return;
    // Waterfill: find tau with sum_i max(v_i - tau, gap) = limit.
    double lo = 0.0;
    double hi = 0.0;
    for (double x : v) hi = std::max(hi, x - gap);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
        const double tau = 0.5 * (lo + hi);
        double s = 0.0;
        for (double x : v) s += std::max(x - tau, gap);
        if (s > limit) {
            lo = tau;
        } else {
            hi = tau;
        }
    }
    const double tau = 0.5 * (lo + hi);
    for (double& x : v) x = std::max(x - tau, gap);
}

std::vector<double> increments_to_angles(const std::vector<double>& d) {
    std::vector<double> phi(d.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        acc += d[i];
        phi[i] = acc;
    }
    return phi;
}

BaselineResult descend_from(const WaveformCandidate& waveform, const HarmonicSpec& spec,
                            const FourierTargets& targets, std::vector<double> d,
                            const BaselineOptions& opts) {
    const std::size_t m = d.size();
    const double limit = kPi - opts.min_gap;
    project_increments(d, opts.min_gap, limit);

    auto eval = [&](const std::vector<double>& dd, std::vector<double>* grad_d) {
        const std::vector<double> phi = increments_to_angles(dd);
        auto [value, grad_phi] = angle_objective(waveform, phi, spec, targets);
        if (grad_d != nullptr) {
            grad_d->assign(m, 0.0);
            double suffix = 0.0;
            for (std::size_t i = m; i-- > 0;) {
                suffix += grad_phi[i];
                (*grad_d)[i] = suffix;
            }
        }
        return value;
    };

    std::vector<double> grad(m), grad_new(m), direction(m), trial(m);
    double value = eval(d, &grad);
    const double initial_value = value;

    double grad_inf = 0.0;
    for (double g : grad) grad_inf = std::max(grad_inf, std::abs(g));
    double bb_step = 1.0 / std::max(grad_inf, 1e-12);

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        if (value <= 1e-4 * opts.solvable_tol) break;

        trial = d;
        for (std::size_t i = 0; i < m; ++i) trial[i] -= grad[i];
        project_increments(trial, opts.min_gap, limit);
        double res = 0.0;
        for (std::size_t i = 0; i < m; ++i) res = std::max(res, std::abs(trial[i] - d[i]));
        if (res <= opts.stationarity_tol) break;

        trial = d;
        for (std::size_t i = 0; i < m; ++i) trial[i] -= bb_step * grad[i];
        project_increments(trial, opts.min_gap, limit);
        double gd = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            direction[i] = trial[i] - d[i];
            gd += grad[i] * direction[i];
        }
        if (gd >= 0.0) break;

        double step = 1.0;
        double trial_value = 0.0;
        bool accepted = false;
        while (step >= 1e-18) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = d[i] + step * direction[i];
            trial_value = eval(trial, nullptr);
            if (trial_value <= value + 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        trial_value = eval(trial, &grad_new);
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double s = trial[i] - d[i];
            const double y = grad_new[i] - grad[i];
            ss += s * s;
            sy += s * y;
        }
        bb_step = (sy > 1e-30) ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
        d.swap(trial);
        grad.swap(grad_new);
        value = trial_value;
    }

    BaselineResult result;
    result.angles = increments_to_angles(d);
    result.optimal_value = value;
    result.solved = value <= opts.solvable_tol;
    result.best_initial_value = initial_value;
    return result;
}

}  // namespace

std::pair<double, std::vector<double>>
angle_objective(const WaveformCandidate& waveform, const std::vector<double>& angles,
                const HarmonicSpec& spec, const FourierTargets& targets) {
    if (waveform.levels.size() != angles.size() + 1) {
        throw std::invalid_argument("waveform needs exactly one more level than angles");
    }
    validate_targets(spec, targets);
    double prev = 0.0;
    for (double phi : angles) {
        if (!(phi > prev)) throw std::domain_error("angles must be strictly increasing inside (0, pi)");
        prev = phi;
    }
    if (!angles.empty() && !(angles.back() < kPi)) {
        throw std::domain_error("angles must stay strictly below pi");
    }

    std::vector<double> a, b;
    coefficients(waveform, angles, spec, a, b);

    double value = 0.0;
    std::vector<double> resid_a(a.size()), resid_b(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        resid_a[i] = a[i] - targets.a[i];
        value += resid_a[i] * resid_a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        resid_b[i] = b[i] - targets.b[i];
        value += resid_b[i] * resid_b[i];
    }

    // dV/dphi_m = 2 sum_j r_j * da_j/dphi_m + 2 sum_j r_j * db_j/dphi_m with
    // da_j/dphi_m = (2/pi)(s_{m-1} - s_m) cos(j phi_m),
    // db_j/dphi_m = (2/pi)(s_{m-1} - s_m) sin(j phi_m).
    std::vector<double> grad(angles.size(), 0.0);
    for (std::size_t m = 0; m < angles.size(); ++m) {
        const double ds = waveform.levels[m] - waveform.levels[m + 1];
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            acc += 2.0 * resid_a[i] * (2.0 / kPi) * ds * std::cos(spec.cos_indices()[i] * angles[m]);
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            acc += 2.0 * resid_b[i] * (2.0 / kPi) * ds * std::sin(spec.sin_indices()[i] * angles[m]);
        }
        grad[m] = acc;
    }
    return {value, std::move(grad)};
}

BaselineResult optimize_angles(const WaveformCandidate& waveform, const HarmonicSpec& spec,
                               const FourierTargets& targets, const BaselineOptions& opts) {
    const std::size_t m = waveform.levels.size() - 1;
    if (m < 1) throw std::invalid_argument("waveform needs at least one switch");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uniform(opts.min_gap, kPi - opts.min_gap);

    BaselineResult best;
    best.optimal_value = std::numeric_limits<double>::infinity();
    best.best_initial_value = std::numeric_limits<double>::infinity();

    for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
        std::vector<double> phi(m);
        if (r == 0) {
            // Deterministic evenly spaced start, then random restarts.
            for (std::size_t i = 0; i < m; ++i) {
                phi[i] = kPi * static_cast<double>(i + 1) / static_cast<double>(m + 1);
            }
        } else {
            for (double& x : phi) x = uniform(rng);
            std::sort(phi.begin(), phi.end());
        }
        std::vector<double> d(m);
        double prev = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            d[i] = phi[i] - prev;
            prev = phi[i];
        }
        BaselineResult candidate = descend_from(waveform, spec, targets, std::move(d), opts);
        best.best_initial_value = std::min(best.best_initial_value, candidate.best_initial_value);
        if (candidate.optimal_value < best.optimal_value) {
            best.angles = candidate.angles;
            best.optimal_value = candidate.optimal_value;
            best.solved = candidate.solved;
        }
        if (best.optimal_value <= 1e-4 * opts.solvable_tol) break;
    }
    return best;
}

std::vector<WaveformCandidate> enumerate_waveforms(const ControlSet& set, std::size_t switches,
                                                   std::size_t budget) {
    if (switches < 1) throw std::invalid_argument("waveform enumeration needs at least one switch");
    const std::size_t levels = set.size();

    // Count adjacent-move sequences first; refuse oversized requests.
    std::vector<double> dp(levels, 1.0);
    for (std::size_t step = 0; step < switches; ++step) {
        std::vector<double> next(levels, 0.0);
        for (std::size_t v = 0; v < levels; ++v) {
            if (v > 0) next[v] += dp[v - 1];
            if (v + 1 < levels) next[v] += dp[v + 1];
        }
        dp.swap(next);
    }
    double count = 0.0;
    for (double c : dp) count += c;
    if (count > static_cast<double>(budget)) {
        std::ostringstream msg;
        msg << "waveform enumeration would produce " << count << " candidates, over the budget of "
            << budget;
        throw std::invalid_argument(msg.str());
    }

    std::vector<WaveformCandidate> result;
    result.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> path;
    auto dfs = [&](auto&& self, std::size_t v) -> void {
        path.push_back(v);
        if (path.size() == switches + 1) {
            WaveformCandidate w;
            w.levels.reserve(path.size());
            for (std::size_t idx : path) w.levels.push_back(set.level(idx));
            result.push_back(std::move(w));
        } else {
            if (v > 0) self(self, v - 1);
            if (v + 1 < levels) self(self, v + 1);
        }
        path.pop_back();
    };
    for (std::size_t v = 0; v < levels; ++v) dfs(dfs, v);
    return result;
}

std::vector<std::vector<BaselineResult>>
solvable_set_scan(const std::vector<WaveformCandidate>& waveforms, const HarmonicSpec& spec,
                  const std::vector<FourierTargets>& target_grid, const BaselineOptions& opts) {
    std::vector<std::vector<BaselineResult>> table(waveforms.size());
    for (auto& row : table) row.resize(target_grid.size());
    if (waveforms.empty() || target_grid.empty()) return table;

    const std::size_t cells = waveforms.size() * target_grid.size();
    unsigned workers = opts.workers > 0 ? static_cast<unsigned>(opts.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(cells));

    auto run_cell = [&](std::size_t cell) {
        const std::size_t w = cell / target_grid.size();
        const std::size_t t = cell % target_grid.size();
        BaselineOptions cell_opts = opts;
        cell_opts.seed = opts.seed + 1000003ULL * w + t;  // scheduling-independent
        table[w][t] = optimize_angles(waveforms[w], spec, target_grid[t], cell_opts);
    };

    if (workers <= 1) {
        for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t cell = w; cell < cells; cell += workers) run_cell(cell);
            });
        }
        for (auto& th : pool) th.join();
    }
    return table;
}

}  // namespace shmopt
