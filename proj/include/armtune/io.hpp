#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "armtune/errors.hpp"
#include "armtune/ga.hpp"
#include "armtune/simulate.hpp"

namespace armtune {

inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* kTrajectoryHeader = "t,q1,q2,qd1,qd2,e1,e2,tau1,tau2";

inline void write_trajectory_csv(const SimResult& r, std::ostream& out) {
    out << kTrajectoryHeader << "\n";
    for (const auto& s : r.samples) {
        out << fmt_g17(s.t) << ',' << fmt_g17(s.q[0]) << ',' << fmt_g17(s.q[1]) << ','
            << fmt_g17(r.qd[0]) << ',' << fmt_g17(r.qd[1]) << ',' << fmt_g17(s.e[0]) << ','
            << fmt_g17(s.e[1]) << ',' << fmt_g17(s.tau[0]) << ',' << fmt_g17(s.tau[1]) << "\n";
    }
}

/// Parse a trajectory CSV back into rows of 9 doubles (header checked).
inline std::vector<std::array<double, 9>> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) {
        throw ParseError(1, "", "bad trajectory header");
    }
    std::vector<std::array<double, 9>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, 9> row{};
        std::istringstream ss(line);
        std::string cell;
        for (int i = 0; i < 9; ++i) {
            if (!std::getline(ss, cell, ',')) throw ParseError(lineno, "", "short row");
            row[i] = std::stod(cell);
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_history_csv(const GaReport& rep, std::ostream& out) {
    out << "generation,best_fitness,mean_fitness\n";
    for (std::size_t i = 0; i < rep.history.size(); ++i) {
        out << (i + 1) << ',' << fmt_g17(rep.history[i].best_fitness) << ','
            << fmt_g17(rep.history[i].mean_fitness) << "\n";
    }
}

/// Gains file: six labeled values, one per line, kp1..kd2.
inline void write_gains(const PidGains& g, std::ostream& out) {
    const char* names[6] = {"kp1", "ki1", "kd1", "kp2", "ki2", "kd2"};
    const auto vals = g.as_array();
    for (int i = 0; i < 6; ++i) out << names[i] << " = " << fmt_g17(vals[i]) << "\n";
}

inline PidGains read_gains(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string name, eq;
        double value = 0.0;
        if (line.empty()) continue;
        if (!(ss >> name >> eq >> value) || eq != "=") {
            throw ParseError(lineno, name, "expected '<gain> = <value>'");
        }
        kv[name] = value;
    }
    const char* names[6] = {"kp1", "ki1", "kd1", "kp2", "ki2", "kd2"};
    std::array<double, 6> vals{};
    for (int i = 0; i < 6; ++i) {
        auto it = kv.find(names[i]);
        if (it == kv.end()) throw ParseError(0, names[i], "missing gain");
        vals[i] = it->second;
    }
    return PidGains::from_array(vals);
}

inline PidGains read_gains_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "", "cannot open gains file '" + path + "'");
    return read_gains(in);
}

inline void write_metrics(const SimResult& r, const SimConfig& cfg, std::ostream& out) {
    out << "ise = " << fmt_g17(r.ise) << "\n";
    out << "diverged = " << (r.diverged ? "true" : "false") << "\n";
    for (int j = 0; j < 2; ++j) {
        const auto& m = r.metrics[j];
        out << "overshoot_j" << (j + 1) << "_pct = " << fmt_g17(m.overshoot_pct) << "\n";
        out << "settling_j" << (j + 1) << "_s = " << fmt_g17(m.settling_time) << "\n";
        out << "sse_j" << (j + 1) << " = " << fmt_g17(m.steady_state_error) << "\n";
    }
    out << "torque_limit = " << (cfg.torque_limit ? fmt_g17(*cfg.torque_limit) : "none") << "\n";
}

/// Side-by-side metrics of two controllers simulated under one SimConfig.
struct ComparisonReport {
    SimResult baseline;
    SimResult tuned;

    bool tuned_wins_ise() const { return tuned.ise < baseline.ise; }
};

namespace detail {

// Lower is better for every metric in the report; NaN (diverged) never wins.
inline const char* winner(double base, double tuned) {
    if (std::isnan(base) && std::isnan(tuned)) return "tie";
    if (std::isnan(base)) return "ga-tuned";
    if (std::isnan(tuned)) return "baseline";
    if (tuned < base) return "ga-tuned";
    if (base < tuned) return "baseline";
    return "tie";
}

}  // namespace detail

inline void write_comparison(const ComparisonReport& rep, std::ostream& out) {
    out << "metric,baseline,ga-tuned,winner\n";
    auto row = [&](const std::string& name, double base, double tuned) {
        out << name << ',' << fmt_g17(base) << ',' << fmt_g17(tuned) << ','
            << detail::winner(base, tuned) << "\n";
    };
    row("ise", rep.baseline.ise, rep.tuned.ise);
    for (int j = 0; j < 2; ++j) {
        const auto& b = rep.baseline.metrics[j];
        const auto& t = rep.tuned.metrics[j];
        const std::string suffix = "_j" + std::to_string(j + 1);
        row("overshoot_pct" + suffix, b.overshoot_pct, t.overshoot_pct);
        row("settling_s" + suffix, b.settling_time, t.settling_time);
        row("sse" + suffix, b.steady_state_error, t.steady_state_error);
    }
}

}  // namespace armtune
