// Command-line front end: solve, sweep, baseline, verify, fourier.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure
// (non-convergence or failed verification checks).

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "shmopt/presets.hpp"
#include "shmopt/serialize.hpp"

namespace fs = std::filesystem;
using shmopt::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = ".";
    int workers = -1;  // -1: keep config value
};

json load_config(const CommonArgs& args) {
    if (!args.preset.empty() && !args.config_path.empty()) {
        throw shmopt::ConfigError("give either --config or --preset, not both");
    }
    if (!args.preset.empty()) return shmopt::preset_config(args.preset);
    if (!args.config_path.empty()) return shmopt::load_json_file(args.config_path);
    throw shmopt::ConfigError("missing --config PATH or --preset NAME");
}

/// SHM_OPT_SEED wins over the config seed.
void apply_seed_override(std::uint64_t& seed) {
    const char* env = std::getenv("SHM_OPT_SEED");
    if (env == nullptr) return;
    try {
        seed = std::stoull(env);
    } catch (const std::exception&) {
        throw shmopt::ConfigError("SHM_OPT_SEED must be an unsigned integer");
    }
}

fs::path prepare_out_dir(const CommonArgs& args) {
    fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    shmopt::write_text_file(path.string(), j.dump(2) + "\n");
}

int run_solve(const CommonArgs& args) {
    json config_json = load_config(args);
    shmopt::RunConfig config = shmopt::parse_run_config(config_json);
    apply_seed_override(config.seed);
    if (args.workers >= 0) config.workers = args.workers;

    const shmopt::FourierTargets targets = config.solve_targets();
    const shmopt::ProblemSpec spec = config.problem_spec(targets);
    const shmopt::TimeGrid grid = config.grid.build();

    shmopt::RunConfig echo = config;
    echo.targets = targets;  // record the concrete targets of this run
    const shmopt::SolveReport report = shmopt::solve(spec, grid);

    const fs::path dir = prepare_out_dir(args);
    write_json(dir / "report.json", shmopt::report_to_json(echo, report));
    shmopt::write_text_file((dir / "control.csv").string(), shmopt::control_csv(report.control));
    if (report.extracted.has_value()) {
        write_json(dir / "signal.json", shmopt::signal_to_json(*report.extracted, spec.control_set()));
    }

    std::cout << "solve: converged=" << (report.converged ? "yes" : "no")
              << " iterations=" << report.iterations
              << " residual=" << report.terminal_residual
              << " snap_fraction=" << report.snap_fraction
              << " pmp_agreement=" << report.pmp_agreement << "\n";
    return report.converged ? kExitOk : kExitNumerical;
}

int run_sweep(const CommonArgs& args) {
    json config_json = load_config(args);
    shmopt::RunConfig config = shmopt::parse_run_config(config_json);
    apply_seed_override(config.seed);
    if (args.workers >= 0) config.workers = args.workers;
    if (config.m_values.empty()) throw shmopt::ConfigError("sweep needs a non-empty m_values list");
    if (!config.pattern.has_value()) throw shmopt::ConfigError("sweep needs an m_pattern");

    const shmopt::FourierTargets placeholder = config.pattern->at(config.m_values.front());
    shmopt::SweepSpec sweep_spec(config.problem_spec(placeholder), config.grid.build(),
                                 *config.pattern, config.m_values);
    sweep_spec.warm_start = config.warm_start;
    sweep_spec.workers = config.workers;

    const shmopt::SweepResult result = shmopt::run_sweep(sweep_spec);

    const fs::path dir = prepare_out_dir(args);
    shmopt::write_text_file((dir / "policy.csv").string(), shmopt::policy_csv(result));
    write_json(dir / "continuity.json", shmopt::continuity_to_json(result));
    write_json(dir / "sweep.json", shmopt::sweep_summary_to_json(config, result));

    std::size_t converged = 0;
    std::size_t unreliable = 0;
    for (const auto& row : result.rows) {
        if (!row.failed() && row.report->converged) ++converged;
        if (!row.failed() && !row.report->extraction_reliable) ++unreliable;
    }
    std::cout << "sweep: rows=" << result.rows.size() << " converged=" << converged
              << " unreliable_extractions=" << unreliable << "\n";
    return converged == result.rows.size() ? kExitOk : kExitNumerical;
}

int run_baseline(const CommonArgs& args) {
    json config_json = load_config(args);
    shmopt::BaselineConfig config = shmopt::parse_baseline_config(config_json);
    apply_seed_override(config.options.seed);
    if (args.workers >= 0) config.options.workers = args.workers;

    const std::vector<shmopt::WaveformCandidate> waveforms =
        shmopt::enumerate_waveforms(config.control_set, config.switches, config.budget);
    const auto table =
        shmopt::solvable_set_scan(waveforms, config.harmonics, config.target_grid, config.options);

    const fs::path dir = prepare_out_dir(args);
    shmopt::write_text_file((dir / "scan.csv").string(), shmopt::scan_csv(table));

    std::size_t solved = 0;
    for (const auto& row : table) {
        for (const auto& cell : row) {
            if (cell.solved) ++solved;
        }
    }
    std::cout << "baseline: waveforms=" << waveforms.size() << " targets=" << config.target_grid.size()
              << " solved_cells=" << solved << "\n";
    return kExitOk;
}

int run_verify(const std::string& report_path, const CommonArgs& args) {
    const shmopt::ReportDocument doc = shmopt::report_from_json(shmopt::load_json_file(report_path));
    const shmopt::RunConfig& config = doc.config;
    const shmopt::FourierTargets targets = config.solve_targets();
    const shmopt::ProblemSpec spec = config.problem_spec(targets);

    json out;
    bool all_pass = true;

    // Staircase property of the extracted signal.
    bool staircase_ok = false;
    if (doc.extracted.has_value()) {
        try {
            staircase_ok = shmopt::is_staircase(*doc.extracted, spec.control_set());
        } catch (const std::invalid_argument&) {
            staircase_ok = false;  // levels outside the set
        }
    }
    out["staircase"] = staircase_ok;
    all_pass = all_pass && staircase_ok;

    // Fourier coefficients of the extracted signal against the targets.
    if (doc.extracted.has_value()) {
        auto [a, b] = shmopt::fourier_closed_form(*doc.extracted, spec.harmonics);
        double residual_sq = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            residual_sq += (a[i] - targets.a[i]) * (a[i] - targets.a[i]);
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            residual_sq += (b[i] - targets.b[i]) * (b[i] - targets.b[i]);
        }
        out["extracted_fourier"] = json{{"a", a}, {"b", b}};
        out["extracted_residual"] = std::sqrt(residual_sq);
    }

    // Terminal residual of the reported control against the bound
    // ||x(pi)||^2 <= 2 * 4*eps*pi*max|L| (the factor 2 absorbs the grid).
    const std::vector<double> terminal =
        shmopt::DiscretizedProblem(spec, doc.control.grid).terminal_state(doc.control.values);
    double residual_sq = 0.0;
    for (double v : terminal) residual_sq += v * v;
    const double bound = 2.0 * 4.0 * spec.penalty.epsilon() * shmopt::kPi *
                         shmopt::penalty_max_abs(spec.penalty);
    out["terminal_residual"] = std::sqrt(residual_sq);
    out["residual_bound"] = std::sqrt(bound);
    const bool bound_ok = residual_sq <= bound;
    out["residual_bound_ok"] = bound_ok;
    all_pass = all_pass && bound_ok;

    // Agreement with the Pontryagin reconstruction.
    const double agreement =
        shmopt::pmp_agreement(spec, doc.control, terminal, spec.options.snap_tol);
    out["pmp_agreement"] = agreement;
    const bool pmp_ok = agreement >= 0.98;
    out["pmp_agreement_ok"] = pmp_ok;
    all_pass = all_pass && pmp_ok;

    out["converged"] = doc.converged;
    all_pass = all_pass && doc.converged;
    out["all_pass"] = all_pass;

    const fs::path dir = prepare_out_dir(args);
    write_json(dir / "verification.json", out);
    std::cout << "verify: all_pass=" << (all_pass ? "true" : "false") << "\n";
    return all_pass ? kExitOk : kExitNumerical;
}

int run_fourier(const std::string& signal_path, int max_harmonic, const CommonArgs& args) {
    if (max_harmonic < 1) throw shmopt::ConfigError("--max-harmonic must be at least 1");
    const shmopt::SignalDocument doc = shmopt::signal_from_json(shmopt::load_json_file(signal_path));
    std::vector<int> indices;
    for (int j = 1; j <= max_harmonic; j += 2) indices.push_back(j);
    const shmopt::HarmonicSpec spec(indices, indices);
    auto [a, b] = shmopt::fourier_closed_form(doc.signal, spec);

    json out{{"indices", indices}, {"a", a}, {"b", b}};
    const fs::path dir = prepare_out_dir(args);
    write_json(dir / "fourier.json", out);

    std::cout << "j,a_j,b_j\n";
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::cout << indices[i] << "," << a[i] << "," << b[i] << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Staircase modulation signal synthesis via penalized optimal control"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string report_path;
    std::string signal_path;
    int max_harmonic = 31;

    auto add_common = [&](CLI::App* cmd, bool with_config) {
        if (with_config) {
            cmd->add_option("--config", args.config_path, "configuration JSON path");
            cmd->add_option("--preset", args.preset, "built-in configuration name");
        }
        cmd->add_option("--out", args.out_dir, "output directory (default: current)");
        cmd->add_option("--workers", args.workers, "worker threads (default: from config)");
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one target and extract the staircase signal");
    add_common(solve_cmd, true);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "solve a sweep over the modulation index m");
    add_common(sweep_cmd, true);
    CLI::App* baseline_cmd = app.add_subcommand("baseline", "fixed-waveform switching-angle scan");
    add_common(baseline_cmd, true);
    CLI::App* verify_cmd = app.add_subcommand("verify", "re-check a solve report");
    verify_cmd->add_option("report", report_path, "report.json path")->required();
    add_common(verify_cmd, false);
    CLI::App* fourier_cmd = app.add_subcommand("fourier", "spectrum of a staircase signal JSON");
    fourier_cmd->add_option("signal", signal_path, "signal.json path")->required();
    fourier_cmd->add_option("--max-harmonic", max_harmonic, "largest odd harmonic (default 31)");
    add_common(fourier_cmd, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(args);
        if (sweep_cmd->parsed()) return run_sweep(args);
        if (baseline_cmd->parsed()) return run_baseline(args);
        if (verify_cmd->parsed()) return run_verify(report_path, args);
        if (fourier_cmd->parsed()) return run_fourier(signal_path, max_harmonic, args);
    } catch (const shmopt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
