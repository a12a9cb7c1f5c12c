#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "armtune/dynamics.hpp"
#include "armtune/errors.hpp"
#include "armtune/integrate.hpp"
#include "armtune/pid.hpp"

namespace armtune {

/// Closed-loop simulation setup. Defaults reproduce the two-link regulation
/// task: drive (pi, pi/2) to the setpoint (pi/2, pi) over 10 s at 1 kHz.
struct SimConfig {
    double dt = 1e-3;       // integration step [s]
    double t_final = 10.0;  // horizon [s]
    Vec2 q0{M_PI, M_PI / 2.0};
    Vec2 qd{M_PI / 2.0, M_PI};
    Vec2 qdot0{0.0, 0.0};
    double blowup_limit = 1e3;          // abort when any |q| or |qdot| exceeds this
    std::optional<double> torque_limit; // symmetric clamp [N·m]; unset = unclamped
    std::size_t record_stride = 1;      // keep every k-th sample
    double divergence_penalty = 1e9;    // ise reported for diverged runs

    bool valid() const {
        return dt > 0.0 && t_final >= dt && blowup_limit > 0.0 && record_stride >= 1 &&
               divergence_penalty > 0.0 && all_finite(q0) && all_finite(qd) &&
               all_finite(qdot0) && (!torque_limit || *torque_limit > 0.0);
    }
};

// Augmented closed-loop state: q1, q2, q1', q2', ie1, ie2, ise accumulator.
using AugState = std::array<double, 7>;

struct SimSample {
    double t;
    Vec2 q;
    Vec2 qdot;
    Vec2 e;
    Vec2 tau;
};

struct JointMetrics {
    double overshoot_pct = 0.0;     // peak excursion beyond the setpoint, % of the step
    double settling_time = 0.0;     // first time after which |e| stays in the 2% band; +inf if never
    double steady_state_error = 0.0;// mean |e| over the final 10% of the horizon
};

struct SimResult {
    std::vector<SimSample> samples;
    Vec2 qd{0.0, 0.0};
    double ise = 0.0;
    bool diverged = false;
    std::array<JointMetrics, 2> metrics{};
};

namespace detail {

inline Vec2 control_torque(const PidGains& g, const SimConfig& cfg, const AugState& y) {
    const JointState s{{y[0], y[1]}, {y[2], y[3]}};
    const auto [e, edot] = error_signals(cfg.qd, s);
    Vec2 tau = pid_torque(g, PidState{y[4], y[5]}, e, edot);
    if (cfg.torque_limit) {
        tau[0] = std::clamp(tau[0], -*cfg.torque_limit, *cfg.torque_limit);
        tau[1] = std::clamp(tau[1], -*cfg.torque_limit, *cfg.torque_limit);
    }
    return tau;
}

inline AugState closed_loop_deriv(const RobotParams& p, const PidGains& g,
                                  const SimConfig& cfg, const AugState& y) {
    const JointState s{{y[0], y[1]}, {y[2], y[3]}};
    const auto [e, edot] = error_signals(cfg.qd, s);
    const Vec2 tau = control_torque(g, cfg, y);
    const Vec2 acc = forward_dynamics(p, s, tau);
    return {y[2], y[3], acc[0], acc[1], e[0], e[1], e[0] * e[0] + e[1] * e[1]};
}

}  // namespace detail

/// Advance the augmented state one RK4 step under PID-in-the-loop dynamics.
/// Throws NonFiniteState if a stage derivative comes out non-finite.
inline AugState rk4_step(const RobotParams& p, const PidGains& g, const SimConfig& cfg,
                         const AugState& state, double dt) {
    bool bad = false;
    auto f = [&](double, const AugState& y) {
        AugState d = detail::closed_loop_deriv(p, g, cfg, y);
        for (double v : d) {
            if (!std::isfinite(v)) bad = true;
        }
        return d;
    };
    AugState next;
    try {
        next = rk4_advance(f, state, 0.0, dt);
    } catch (const NonFiniteInput&) {
        // A stage state too large for the dynamics counts as a non-finite
        // derivative evaluation.
        throw NonFiniteState("rk4_step: non-finite stage state");
    }
    if (bad) throw NonFiniteState("rk4_step: non-finite derivative");
    return next;
}

/// Fixed-step closed-loop run. The horizon is discretized into
/// n = round(t_final/dt) whole steps; the ISE is the RK4-integrated
/// accumulator, and overshoot/settling/steady-state metrics are tracked at
/// full rate regardless of the record stride.
inline SimResult simulate(const RobotParams& p, const PidGains& g, const SimConfig& cfg) {
    if (!cfg.valid()) throw InvalidConfig("simulate: invalid SimConfig");
    if (!p.valid()) throw InvalidConfig("simulate: invalid RobotParams");
    if (!g.valid()) throw InvalidConfig("simulate: gains must be finite and nonnegative");

    const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(cfg.t_final / cfg.dt)));

    SimResult res;
    res.qd = cfg.qd;
    res.samples.reserve(n / cfg.record_stride + 2);

    AugState y{cfg.q0[0], cfg.q0[1], cfg.qdot0[0], cfg.qdot0[1], 0.0, 0.0, 0.0};

    const Vec2 step{cfg.qd[0] - cfg.q0[0], cfg.qd[1] - cfg.q0[1]};
    const Vec2 band{0.02 * std::abs(step[0]), 0.02 * std::abs(step[1])};
    std::array<long long, 2> last_violation{-1, -1};
    Vec2 peak{0.0, 0.0};
    Vec2 sse_sum{0.0, 0.0};
    std::size_t sse_count = 0;
    const std::size_t sse_start = n - n / 10;  // states with t >= ~0.9 t_final

    auto observe = [&](std::size_t state_idx) {
        // state_idx in [0, n]; time = state_idx * dt
        const Vec2 e{cfg.qd[0] - y[0], cfg.qd[1] - y[1]};
        for (int j = 0; j < 2; ++j) {
            if (std::abs(e[j]) > band[j]) last_violation[j] = static_cast<long long>(state_idx);
            if (step[j] != 0.0) {
                const double beyond = (y[j] - cfg.qd[j]) * (step[j] > 0.0 ? 1.0 : -1.0);
                peak[j] = std::max(peak[j], beyond);
            }
        }
        if (state_idx >= sse_start) {
            sse_sum[0] += std::abs(e[0]);
            sse_sum[1] += std::abs(e[1]);
            ++sse_count;
        }
    };
    auto record = [&](std::size_t state_idx) {
        const Vec2 e{cfg.qd[0] - y[0], cfg.qd[1] - y[1]};
        const Vec2 tau = detail::control_torque(g, cfg, y);
        res.samples.push_back({static_cast<double>(state_idx) * cfg.dt,
                               {y[0], y[1]}, {y[2], y[3]}, e, tau});
    };

    observe(0);
    record(0);

    for (std::size_t i = 0; i < n; ++i) {
        try {
            y = rk4_step(p, g, cfg, y, cfg.dt);
        } catch (const NonFiniteState&) {
            res.diverged = true;
        }
        const bool finite = std::isfinite(y[0]) && std::isfinite(y[1]) &&
                            std::isfinite(y[2]) && std::isfinite(y[3]);
        if (!finite || std::abs(y[0]) > cfg.blowup_limit || std::abs(y[1]) > cfg.blowup_limit ||
            std::abs(y[2]) > cfg.blowup_limit || std::abs(y[3]) > cfg.blowup_limit) {
            res.diverged = true;
        }
        if (res.diverged) break;

        observe(i + 1);
        if ((i + 1) % cfg.record_stride == 0 || i + 1 == n) record(i + 1);
    }

    if (res.diverged) {
        res.ise = cfg.divergence_penalty;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (auto& m : res.metrics) m = {nan, nan, nan};
        return res;
    }

    res.ise = y[6];
    for (int j = 0; j < 2; ++j) {
        auto& m = res.metrics[j];
        m.overshoot_pct = step[j] != 0.0 ? std::max(0.0, peak[j]) / std::abs(step[j]) * 100.0 : 0.0;
        if (last_violation[j] < 0) {
            m.settling_time = 0.0;
        } else if (last_violation[j] == static_cast<long long>(n)) {
            m.settling_time = std::numeric_limits<double>::infinity();
        } else {
            m.settling_time = static_cast<double>(last_violation[j] + 1) * cfg.dt;
        }
        m.steady_state_error = sse_sum[j] / static_cast<double>(std::max<std::size_t>(sse_count, 1));
    }
    return res;
}

}  // namespace armtune
