#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "armtune/errors.hpp"
#include "armtune/ga.hpp"
#include "armtune/pid.hpp"
#include "armtune/simulate.hpp"

namespace armtune {

/// Everything one experiment needs: plant, simulation, GA settings, the
/// reference controller, and where to put output files. Defaults reproduce
/// the stock two-link regulation task end to end.
struct ExperimentConfig {
    RobotParams robot;
    SimConfig sim;
    GaConfig ga;
    PidGains baseline_gains{30.0, 20.0, 12.0, 32.0, 30.0, 22.0};
    std::string output_dir = "out";
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(const std::string& key, int line, std::string_view v) {
    const std::string buf(v);
    char* end = nullptr;
    const double x = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0') {
        throw ParseError(line, key, "expected a number, got '" + buf + "'");
    }
    return x;
}

inline unsigned long long parse_uint(const std::string& key, int line, std::string_view v) {
    unsigned long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError(line, key, "expected a nonnegative integer, got '" + std::string(v) + "'");
    }
    return x;
}

inline std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Validate every invariant, throwing ValidationError naming the first
/// violated field.
inline void validate_config(const ExperimentConfig& c) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ValidationError(msg);
    };
    require(c.robot.m1 > 0, "robot.m1 must be > 0");
    require(c.robot.m2 > 0, "robot.m2 must be > 0");
    require(c.robot.l1 > 0, "robot.l1 must be > 0");
    require(c.robot.l2 > 0, "robot.l2 must be > 0");
    require(c.robot.g > 0, "robot.g must be > 0");
    require(c.robot.b1 >= 0, "robot.b1 must be >= 0");
    require(c.robot.b2 >= 0, "robot.b2 must be >= 0");
    require(c.sim.dt > 0, "sim.dt must be > 0");
    require(c.sim.t_final >= c.sim.dt, "sim.t_final must be >= sim.dt");
    require(c.sim.blowup_limit > 0, "sim.blowup_limit must be > 0");
    require(c.sim.record_stride >= 1, "sim.record_stride must be >= 1");
    require(!c.sim.torque_limit || *c.sim.torque_limit > 0, "sim.torque_limit must be > 0");
    require(c.ga.pop_size >= 2, "ga.pop_size must be >= 2");
    require(c.ga.max_generations >= 1, "ga.max_generations must be >= 1");
    require(c.ga.crossover_rate >= 0 && c.ga.crossover_rate <= 1,
            "ga.crossover_rate must be in [0, 1]");
    require(c.ga.mutation_rate >= 0 && c.ga.mutation_rate <= 1,
            "ga.mutation_rate must be in [0, 1]");
    require(c.ga.elite_count < c.ga.pop_size, "ga.elite_count must be < ga.pop_size");
    require(c.ga.stall_generations >= 1, "ga.stall_generations must be >= 1");
    require(c.ga.stall_tolerance >= 0, "ga.stall_tolerance must be >= 0");
    for (const auto& b : c.ga.gene_bounds) {
        require(b.lo <= b.hi, "ga.gene_lo must be <= ga.gene_hi");
    }
    require(c.ga.penalty_fitness >
                2.0 * c.sim.blowup_limit * c.sim.blowup_limit * c.sim.t_final,
            "ga.penalty_fitness must exceed the achievable ISE bound "
            "(2 * blowup_limit^2 * t_final)");
    require(c.baseline_gains.valid(), "baseline gains must be finite and >= 0");
    require(!c.output_dir.empty(), "output_dir must not be empty");
}

/// Parse the `key = value` experiment format. Blank lines and '#' comments
/// are skipped, missing keys keep their defaults, unknown keys are an error.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string raw;
    int lineno = 0;
    bool gene_lo_set = false, gene_hi_set = false;
    double gene_lo = 0.0, gene_hi = 0.0;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(lineno, "", "expected 'key = value'");
        }
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "", "missing key before '='");
        if (val.empty()) throw ParseError(lineno, key, "missing value");

        auto num = [&] { return detail::parse_double(key, lineno, val); };
        auto uint = [&] { return detail::parse_uint(key, lineno, val); };

        if (key == "robot.m1") c.robot.m1 = num();
        else if (key == "robot.m2") c.robot.m2 = num();
        else if (key == "robot.l1") c.robot.l1 = num();
        else if (key == "robot.l2") c.robot.l2 = num();
        else if (key == "robot.g") c.robot.g = num();
        else if (key == "robot.b1") c.robot.b1 = num();
        else if (key == "robot.b2") c.robot.b2 = num();
        else if (key == "sim.dt") c.sim.dt = num();
        else if (key == "sim.t_final") c.sim.t_final = num();
        else if (key == "sim.q0_1") c.sim.q0[0] = num();
        else if (key == "sim.q0_2") c.sim.q0[1] = num();
        else if (key == "sim.qd_1") c.sim.qd[0] = num();
        else if (key == "sim.qd_2") c.sim.qd[1] = num();
        else if (key == "sim.qdot0_1") c.sim.qdot0[0] = num();
        else if (key == "sim.qdot0_2") c.sim.qdot0[1] = num();
        else if (key == "sim.blowup_limit") c.sim.blowup_limit = num();
        else if (key == "sim.torque_limit") c.sim.torque_limit = num();
        else if (key == "sim.record_stride") c.sim.record_stride = static_cast<std::size_t>(uint());
        else if (key == "ga.pop_size") c.ga.pop_size = static_cast<std::size_t>(uint());
        else if (key == "ga.max_generations") c.ga.max_generations = static_cast<std::size_t>(uint());
        else if (key == "ga.crossover_rate") c.ga.crossover_rate = num();
        else if (key == "ga.mutation_rate") c.ga.mutation_rate = num();
        else if (key == "ga.gene_lo") { gene_lo = num(); gene_lo_set = true; }
        else if (key == "ga.gene_hi") { gene_hi = num(); gene_hi_set = true; }
        else if (key == "ga.elite_count") c.ga.elite_count = static_cast<std::size_t>(uint());
        else if (key == "ga.seed") c.ga.seed = uint();
        else if (key == "ga.stall_generations") c.ga.stall_generations = static_cast<std::size_t>(uint());
        else if (key == "ga.stall_tolerance") c.ga.stall_tolerance = num();
        else if (key == "ga.penalty_fitness") c.ga.penalty_fitness = num();
        else if (key == "baseline.kp1") c.baseline_gains.kp1 = num();
        else if (key == "baseline.ki1") c.baseline_gains.ki1 = num();
        else if (key == "baseline.kd1") c.baseline_gains.kd1 = num();
        else if (key == "baseline.kp2") c.baseline_gains.kp2 = num();
        else if (key == "baseline.ki2") c.baseline_gains.ki2 = num();
        else if (key == "baseline.kd2") c.baseline_gains.kd2 = num();
        else if (key == "output_dir") c.output_dir = std::string(val);
        else throw ParseError(lineno, key, "unknown key");
    }

    for (auto& b : c.ga.gene_bounds) {
        if (gene_lo_set) b.lo = gene_lo;
        if (gene_hi_set) b.hi = gene_hi;
    }
    // One penalty knob: diverged simulations report the GA penalty as ISE.
    c.sim.divergence_penalty = c.ga.penalty_fitness;

    validate_config(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "", "cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Emit every key; parse_config(save_config(c)) reproduces c exactly
/// (doubles are written with 17 significant digits).
inline std::string save_config(const ExperimentConfig& c) {
    using detail::g17;
    std::ostringstream out;
    out << "robot.m1 = " << g17(c.robot.m1) << "\n";
    out << "robot.m2 = " << g17(c.robot.m2) << "\n";
    out << "robot.l1 = " << g17(c.robot.l1) << "\n";
    out << "robot.l2 = " << g17(c.robot.l2) << "\n";
    out << "robot.g = " << g17(c.robot.g) << "\n";
    out << "robot.b1 = " << g17(c.robot.b1) << "\n";
    out << "robot.b2 = " << g17(c.robot.b2) << "\n";
    out << "sim.dt = " << g17(c.sim.dt) << "\n";
    out << "sim.t_final = " << g17(c.sim.t_final) << "\n";
    out << "sim.q0_1 = " << g17(c.sim.q0[0]) << "\n";
    out << "sim.q0_2 = " << g17(c.sim.q0[1]) << "\n";
    out << "sim.qd_1 = " << g17(c.sim.qd[0]) << "\n";
    out << "sim.qd_2 = " << g17(c.sim.qd[1]) << "\n";
    out << "sim.qdot0_1 = " << g17(c.sim.qdot0[0]) << "\n";
    out << "sim.qdot0_2 = " << g17(c.sim.qdot0[1]) << "\n";
    out << "sim.blowup_limit = " << g17(c.sim.blowup_limit) << "\n";
    if (c.sim.torque_limit) out << "sim.torque_limit = " << g17(*c.sim.torque_limit) << "\n";
    out << "sim.record_stride = " << c.sim.record_stride << "\n";
    out << "ga.pop_size = " << c.ga.pop_size << "\n";
    out << "ga.max_generations = " << c.ga.max_generations << "\n";
    out << "ga.crossover_rate = " << g17(c.ga.crossover_rate) << "\n";
    out << "ga.mutation_rate = " << g17(c.ga.mutation_rate) << "\n";
    out << "ga.gene_lo = " << g17(c.ga.gene_bounds[0].lo) << "\n";
    out << "ga.gene_hi = " << g17(c.ga.gene_bounds[0].hi) << "\n";
    out << "ga.elite_count = " << c.ga.elite_count << "\n";
    out << "ga.seed = " << c.ga.seed << "\n";
    out << "ga.stall_generations = " << c.ga.stall_generations << "\n";
    out << "ga.stall_tolerance = " << g17(c.ga.stall_tolerance) << "\n";
    out << "ga.penalty_fitness = " << g17(c.ga.penalty_fitness) << "\n";
    out << "baseline.kp1 = " << g17(c.baseline_gains.kp1) << "\n";
    out << "baseline.ki1 = " << g17(c.baseline_gains.ki1) << "\n";
    out << "baseline.kd1 = " << g17(c.baseline_gains.kd1) << "\n";
    out << "baseline.kp2 = " << g17(c.baseline_gains.kp2) << "\n";
    out << "baseline.ki2 = " << g17(c.baseline_gains.ki2) << "\n";
    out << "baseline.kd2 = " << g17(c.baseline_gains.kd2) << "\n";
    out << "output_dir = " << c.output_dir << "\n";
    return out.str();
}

}  // namespace armtune
