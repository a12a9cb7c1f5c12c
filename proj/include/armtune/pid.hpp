#pragma once

#include <array>

#include "armtune/dynamics.hpp"

namespace armtune {

/// Six PID gains, one (Kp, Ki, Kd) triple per joint. Nonnegative by contract.
struct PidGains {
    double kp1 = 0.0, ki1 = 0.0, kd1 = 0.0;
    double kp2 = 0.0, ki2 = 0.0, kd2 = 0.0;

    std::array<double, 6> as_array() const { return {kp1, ki1, kd1, kp2, ki2, kd2}; }

    static PidGains from_array(const std::array<double, 6>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }

    bool valid() const {
        for (double v : as_array()) {
            if (!(v >= 0.0) || !std::isfinite(v)) return false;
        }
        return true;
    }
};

/// Controller memory: the accumulated error integrals. Advanced by the
/// integrator (d(ie)/dt = e), not by pid_torque.
struct PidState {
    double ie1 = 0.0;
    double ie2 = 0.0;
};

/// Per-joint PID law: tau_i = kp_i e_i + ki_i ie_i + kd_i edot_i.
/// Pure; the joints are fully decoupled.
inline Vec2 pid_torque(const PidGains& g, const PidState& st, const Vec2& e, const Vec2& edot) {
    return {g.kp1 * e[0] + g.ki1 * st.ie1 + g.kd1 * edot[0],
            g.kp2 * e[1] + g.ki2 * st.ie2 + g.kd2 * edot[1]};
}

/// Tracking error and its derivative for a constant setpoint:
/// e = qd - q, edot = -q' (exact, since qd' = 0).
inline std::pair<Vec2, Vec2> error_signals(const Vec2& qd, const JointState& s) {
    return {{qd[0] - s.q[0], qd[1] - s.q[1]}, {-s.qdot[0], -s.qdot[1]}};
}

}  // namespace armtune
