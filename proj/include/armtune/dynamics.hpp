#pragma once

#include <array>
#include <cmath>

#include "armtune/errors.hpp"

namespace armtune {

using Vec2 = std::array<double, 2>;

inline bool all_finite(const Vec2& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]);
}

/// Physical parameters of the two-link arm. Point masses at the link tips,
/// viscous joint friction (zero by default).
struct RobotParams {
    double m1 = 5.0;   // link 1 mass [kg]
    double m2 = 5.0;   // link 2 mass [kg]
    double l1 = 0.34;  // link 1 length [m]
    double l2 = 0.34;  // link 2 length [m]
    double g = 9.81;   // gravitational acceleration [m/s^2]
    double b1 = 0.0;   // joint 1 viscous friction [N·m·s/rad]
    double b2 = 0.0;   // joint 2 viscous friction [N·m·s/rad]

    bool valid() const {
        return m1 > 0 && m2 > 0 && l1 > 0 && l2 > 0 && g > 0 && b1 >= 0 && b2 >= 0;
    }
};

/// Joint angles and angular velocities at one instant.
struct JointState {
    Vec2 q{0.0, 0.0};     // [rad]
    Vec2 qdot{0.0, 0.0};  // [rad/s]
};

/// 2x2 real matrix with a closed-form solve; plenty for this model, where
/// det M(q) = m1*m2*l1^2*l2^2 + m2^2*l1^2*l2^2*sin^2(q2) is bounded away
/// from zero for any positive masses and lengths.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
    }

    // Cramer's rule; caller guarantees det != 0.
    Vec2 solve(const Vec2& rhs) const {
        const double d = det();
        return {(a22 * rhs[0] - a12 * rhs[1]) / d, (a11 * rhs[1] - a21 * rhs[0]) / d};
    }
};

/// Inertia matrix M(q). Symmetric by construction, positive definite for
/// valid parameters.
///
///   M11 = (m1+m2)l1^2 + m2 l2^2 + 2 m2 l1 l2 cos(q2)
///   M12 = M21 = m2 l2^2 + m2 l1 l2 cos(q2)
///   M22 = m2 l2^2
inline Mat2 mass_matrix(const RobotParams& p, const Vec2& q) {
    const double c2 = std::cos(q[1]);
    const double m12 = p.m2 * p.l2 * p.l2 + p.m2 * p.l1 * p.l2 * c2;
    Mat2 m;
    m.a11 = (p.m1 + p.m2) * p.l1 * p.l1 + p.m2 * p.l2 * p.l2 + 2.0 * p.m2 * p.l1 * p.l2 * c2;
    m.a12 = m12;
    m.a21 = m12;
    m.a22 = p.m2 * p.l2 * p.l2;
    return m;
}

/// Coriolis/centripetal generalized forces, as the complete velocity-product
/// vector (already multiplied through by the joint velocities):
///
///   C1 = -m2 l1 l2 sin(q2) (2 q1' q2' + q2'^2)
///   C2 = +m2 l1 l2 sin(q2) q1'^2
///
/// C2 is the Euler-Lagrange completion of this M(q); with it the model
/// conserves energy (q' . C == 1/2 q' . dM/dt . q' for all states).
inline Vec2 coriolis_vector(const RobotParams& p, const JointState& s) {
    const double k = p.m2 * p.l1 * p.l2 * std::sin(s.q[1]);
    const double w1 = s.qdot[0];
    const double w2 = s.qdot[1];
    return {-k * (2.0 * w1 * w2 + w2 * w2), k * w1 * w1};
}

/// Gravity generalized forces; the gradient of the potential
/// (m1+m2) g l1 cos(q1) + m2 g l2 cos(q1+q2), so q = 0 is the upright,
/// torque-free configuration.
inline Vec2 gravity_vector(const RobotParams& p, const Vec2& q) {
    const double s1 = std::sin(q[0]);
    const double s12 = std::sin(q[0] + q[1]);
    return {-(p.m1 + p.m2) * p.l1 * p.g * s1 - p.m2 * p.l2 * p.g * s12,
            -p.m2 * p.l2 * p.g * s12};
}

/// Viscous joint friction B q'.
inline Vec2 friction(const RobotParams& p, const Vec2& qdot) {
    return {p.b1 * qdot[0], p.b2 * qdot[1]};
}

/// Joint accelerations from M(q) q'' + C(q,q') + G(q) + F(q') = tau,
/// solved with the closed-form 2x2 inverse.
inline Vec2 forward_dynamics(const RobotParams& p, const JointState& s, const Vec2& tau) {
    if (!all_finite(s.q) || !all_finite(s.qdot) || !all_finite(tau)) {
        throw NonFiniteInput("forward_dynamics: non-finite state or torque");
    }
    const Vec2 c = coriolis_vector(p, s);
    const Vec2 g = gravity_vector(p, s.q);
    const Vec2 f = friction(p, s.qdot);
    const Vec2 rhs{tau[0] - c[0] - g[0] - f[0], tau[1] - c[1] - g[1] - f[1]};
    return mass_matrix(p, s.q).solve(rhs);
}

/// Total mechanical energy, KE + PE. The PE zero is at the horizontal; its
/// gradient is gravity_vector, which makes this the conserved quantity of
/// the frictionless unforced model.
inline double total_energy(const RobotParams& p, const JointState& s) {
    const Mat2 m = mass_matrix(p, s.q);
    const Vec2 mv = m * s.qdot;
    const double ke = 0.5 * (s.qdot[0] * mv[0] + s.qdot[1] * mv[1]);
    const double pe = (p.m1 + p.m2) * p.g * p.l1 * std::cos(s.q[0]) +
                      p.m2 * p.g * p.l2 * std::cos(s.q[0] + s.q[1]);
    return ke + pe;
}

}  // namespace armtune
