// Experiment runner for the two-link arm PID toolkit.
//
//   armtune simulate [--config F] [--out DIR] [--gains <path|baseline|6 csv values>]
//   armtune tune     [--config F] [--out DIR] [--seed N]
//   armtune compare  [--config F] [--out DIR] [--seed N] [--gains <path|baseline|...>]
//
// Exit codes: 0 success, 1 config or I/O error, 2 diverged simulation,
// 3 comparison regression (tuned ISE not strictly below baseline).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "armtune/armtune.hpp"

namespace fs = std::filesystem;
using namespace armtune;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitRegression = 3;

ExperimentConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) {
        ExperimentConfig c;
        validate_config(c);
        return c;
    }
    return load_config(config_path);
}

PidGains resolve_gains(const std::string& source, const ExperimentConfig& cfg) {
    if (source.empty() || source == "baseline") return cfg.baseline_gains;
    if (source.find(',') != std::string::npos) {
        std::array<double, 6> vals{};
        std::istringstream ss(source);
        std::string cell;
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(ss, cell, ',')) {
                throw ParseError(0, "--gains", "expected six comma-separated values");
            }
            try {
                std::size_t used = 0;
                vals[i] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError(0, "--gains", "bad gain value '" + cell + "'");
            }
        }
        if (std::getline(ss, cell, ',')) {
            throw ParseError(0, "--gains", "expected exactly six values");
        }
        return PidGains::from_array(vals);
    }
    return read_gains_file(source);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

fs::path prepare_out_dir(const ExperimentConfig& cfg, const std::string& out_override) {
    fs::path dir = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
    fs::create_directories(dir);
    return dir;
}

void print_metrics_line(const std::string& label, const SimResult& r) {
    std::cout << label << ": ise=" << fmt_g17(r.ise) << (r.diverged ? " (diverged)" : "")
              << "\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_override,
                 const std::string& gains_source) {
    const ExperimentConfig cfg = load_or_default(config_path);
    const PidGains gains = resolve_gains(gains_source, cfg);
    const fs::path dir = prepare_out_dir(cfg, out_override);

    const SimResult res = simulate(cfg.robot, gains, cfg.sim);
    {
        auto out = open_out(dir / "trajectory.csv");
        write_trajectory_csv(res, out);
    }
    {
        auto out = open_out(dir / "metrics.txt");
        write_metrics(res, cfg.sim, out);
    }
    print_metrics_line("simulate", res);
    std::cout << "wrote " << (dir / "trajectory.csv").string() << ", "
              << (dir / "metrics.txt").string() << "\n";
    return res.diverged ? kExitDiverged : kExitOk;
}

GaReport tune_and_write(const ExperimentConfig& cfg, const fs::path& dir) {
    const GaReport rep = run_ga(cfg.ga, cfg.robot, cfg.sim);
    {
        auto out = open_out(dir / "ga_history.csv");
        write_history_csv(rep, out);
    }
    {
        auto out = open_out(dir / "best_gains");
        write_gains(rep.best.decode(), out);
    }
    std::cout << "tune: " << rep.generations_run << " generations, terminated by "
              << (rep.terminated_by == Termination::stall ? "stall" : "max_generations")
              << ", best fitness " << fmt_g17(*rep.best.fitness) << "\n";
    return rep;
}

int cmd_tune(const std::string& config_path, const std::string& out_override,
             std::optional<std::uint64_t> seed) {
    ExperimentConfig cfg = load_or_default(config_path);
    if (seed) cfg.ga.seed = *seed;
    const fs::path dir = prepare_out_dir(cfg, out_override);
    tune_and_write(cfg, dir);
    std::cout << "wrote " << (dir / "ga_history.csv").string() << ", "
              << (dir / "best_gains").string() << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_override,
                std::optional<std::uint64_t> seed, const std::string& gains_source) {
    ExperimentConfig cfg = load_or_default(config_path);
    if (seed) cfg.ga.seed = *seed;
    const fs::path dir = prepare_out_dir(cfg, out_override);

    PidGains tuned;
    if (gains_source.empty()) {
        tuned = tune_and_write(cfg, dir).best.decode();
    } else {
        tuned = resolve_gains(gains_source, cfg);
    }

    // Both controllers run under the same SimConfig instance.
    ComparisonReport rep;
    rep.baseline = simulate(cfg.robot, cfg.baseline_gains, cfg.sim);
    rep.tuned = simulate(cfg.robot, tuned, cfg.sim);

    {
        auto out = open_out(dir / "trajectory_baseline.csv");
        write_trajectory_csv(rep.baseline, out);
    }
    {
        auto out = open_out(dir / "trajectory_tuned.csv");
        write_trajectory_csv(rep.tuned, out);
    }
    {
        auto out = open_out(dir / "comparison.txt");
        write_comparison(rep, out);
    }
    print_metrics_line("baseline", rep.baseline);
    print_metrics_line("ga-tuned", rep.tuned);
    std::cout << "wrote " << (dir / "comparison.txt").string() << "\n";
    return rep.tuned_wins_ise() ? kExitOk : kExitRegression;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-link manipulator PID simulation and GA tuning"};
    app.require_subcommand(1);

    std::string config_path, out_override, gains_source;
    std::optional<std::uint64_t> seed;

    auto* sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
    sim->add_option("--config", config_path, "experiment config file");
    sim->add_option("--out", out_override, "output directory (overrides config)");
    sim->add_option("--seed", seed, "RNG seed (accepted for interface parity; unused here)");
    sim->add_option("--gains", gains_source,
                    "'baseline', a gains file path, or six comma-separated values");

    auto* tune = app.add_subcommand("tune", "Optimize the PID gains with the GA");
    tune->add_option("--config", config_path, "experiment config file");
    tune->add_option("--out", out_override, "output directory (overrides config)");
    tune->add_option("--seed", seed, "RNG seed (overrides config)");

    auto* cmp = app.add_subcommand("compare", "Baseline vs GA-tuned comparison");
    cmp->add_option("--config", config_path, "experiment config file");
    cmp->add_option("--out", out_override, "output directory (overrides config)");
    cmp->add_option("--seed", seed, "RNG seed (overrides config)");
    cmp->add_option("--gains", gains_source,
                    "tuned gains source; omit to run the GA inline");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_override, gains_source);
        if (tune->parsed()) return cmd_tune(config_path, out_override, seed);
        if (cmp->parsed()) return cmd_compare(config_path, out_override, seed, gains_source);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
