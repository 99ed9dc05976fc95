#include "shmopt/sweep.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace shmopt {

FourierTargets TargetPattern::at(double m) const {
    FourierTargets t;
    t.a.reserve(pattern_a.size());
    t.b.reserve(pattern_b.size());
    for (double p : pattern_a) t.a.push_back(m * p);
    for (double p : pattern_b) t.b.push_back(m * p);
    return t;
}

SweepSpec::SweepSpec(ProblemSpec b, TimeGrid g, TargetPattern p, std::vector<double> ms)
    : base(std::move(b)), grid(std::move(g)), pattern(std::move(p)), m_values(std::move(ms)) {
    if (m_values.empty()) throw std::invalid_argument("sweep needs at least one m value");
    const bool increasing = m_values.size() < 2 || m_values[1] > m_values[0];
    for (std::size_t i = 0; i + 1 < m_values.size(); ++i) {
        const bool ok = increasing ? m_values[i + 1] > m_values[i] : m_values[i + 1] < m_values[i];
        if (!ok) throw std::invalid_argument("sweep m values must be strictly monotone");
    }
    if (pattern.pattern_a.size() != base.harmonics.cos_count() ||
        pattern.pattern_b.size() != base.harmonics.sin_count()) {
        throw std::invalid_argument("target pattern lengths must match the harmonic spec");
    }
}

double control_l1_distance(const DiscreteControl& a, const DiscreteControl& b) {
    if (a.grid.size() != b.grid.size()) {
        throw std::invalid_argument("controls must live on a common grid");
    }
    const std::vector<double> w = a.grid.trapezoid_weights();
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k] * std::abs(a.values[k] - b.values[k]);
    }
    return acc;
}

SweepResult run_sweep(const SweepSpec& spec) {
    SweepResult result;
    result.rows.resize(spec.m_values.size());

    auto solve_row = [&](std::size_t i, const std::optional<DiscreteControl>& init) {
        SweepRow& row = result.rows[i];
        row.m = spec.m_values[i];
        try {
            ProblemSpec problem(spec.base.harmonics, spec.pattern.at(row.m), spec.base.penalty,
                                spec.base.options);
            row.report = solve(problem, spec.grid, init);
        } catch (const std::exception& e) {
            row.report.reset();
            row.error = e.what();
        }
    };

    if (spec.warm_start) {
        std::optional<DiscreteControl> previous;
        for (std::size_t i = 0; i < spec.m_values.size(); ++i) {
            solve_row(i, previous);
            if (!result.rows[i].failed()) previous = result.rows[i].report->control;
        }
    } else {
        const std::size_t n = spec.m_values.size();
        unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                            : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
        if (workers <= 1) {
            for (std::size_t i = 0; i < n; ++i) solve_row(i, std::nullopt);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    for (std::size_t i = w; i < n; i += workers) solve_row(i, std::nullopt);
                });
            }
            for (auto& th : pool) th.join();
        }
    }

    for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
        const SweepRow& lhs = result.rows[i];
        const SweepRow& rhs = result.rows[i + 1];
        if (lhs.failed() || rhs.failed()) {
            result.consecutive_l1.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            result.consecutive_l1.push_back(
                control_l1_distance(lhs.report->control, rhs.report->control));
        }
    }
    return result;
}

ContinuityReport continuity_report(const SweepResult& result) {
    if (result.rows.size() < 2) {
        throw std::invalid_argument("continuity report needs at least two sweep rows");
    }
    ContinuityReport report;
    report.gaps = result.consecutive_l1;
    double sum = 0.0;
    std::size_t finite = 0;
    for (double g : report.gaps) {
        if (std::isnan(g)) continue;
        report.max_gap = std::max(report.max_gap, g);
        sum += g;
        ++finite;
    }
    report.mean_gap = finite > 0 ? sum / static_cast<double>(finite) : 0.0;
    return report;
}

}  // namespace shmopt
