#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "armtune/integrate.hpp"
#include "armtune/simulate.hpp"

using namespace armtune;
using Catch::Approx;

namespace {

const RobotParams kParams{};
const PidGains kBaseline{30.0, 20.0, 12.0, 32.0, 30.0, 22.0};
const PidGains kNoControl{};

// Free swing (zero gains => zero torque) advanced with the closed-loop stepper.
AugState swing_to(double t_end, double dt, const Vec2& q0) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_final = t_end;
    AugState y{q0[0], q0[1], 0.0, 0.0, 0.0, 0.0, 0.0};
    const auto n = static_cast<long long>(std::llround(t_end / dt));
    for (long long i = 0; i < n; ++i) y = rk4_step(kParams, kNoControl, cfg, y, dt);
    return y;
}

double state_error(const AugState& a, const AugState& b) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("rk4_step leaves the torque-free upright equilibrium alone") {
    SimConfig cfg;
    cfg.q0 = {0.0, 0.0};
    cfg.qd = {0.0, 0.0};
    const AugState y0{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const AugState y1 = rk4_step(kParams, kNoControl, cfg, y0, 1e-3);
    CHECK(y1 == y0);
}

TEST_CASE("generic RK4 integrates an injected stub plant exactly") {
    // Constant error pair (1,1): d(ise)/dt = 2, so ise(2 s) = 4.
    auto stub = [](double, const std::array<double, 1>& y) -> std::array<double, 1> {
        (void)y;
        const double e1 = 1.0, e2 = 1.0;
        return {e1 * e1 + e2 * e2};
    };
    std::array<double, 1> y{0.0};
    const double dt = 1e-3;
    for (int i = 0; i < 2000; ++i) y = rk4_advance(stub, y, i * dt, dt);
    CHECK(y[0] == Approx(4.0).margin(1e-9));
}

TEST_CASE("integrator shows 4th-order convergence on the free swing") {
    const Vec2 q0{M_PI / 4.0, 0.0};
    const AugState ref = swing_to(1.0, 1e-6, q0);
    const double err_coarse = state_error(swing_to(1.0, 1e-3, q0), ref);
    const double err_fine = state_error(swing_to(1.0, 5e-4, q0), ref);
    const double ratio = err_coarse / err_fine;
    INFO("err(1e-3)=" << err_coarse << " err(5e-4)=" << err_fine << " ratio=" << ratio);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("free swing conserves energy to 1e-6 over 5 s") {
    SimConfig cfg;
    cfg.q0 = {M_PI / 4.0, 0.0};
    cfg.t_final = 5.0;
    const SimResult r = simulate(kParams, kNoControl, cfg);
    REQUIRE_FALSE(r.diverged);
    const auto& last = r.samples.back();
    const double e0 = total_energy(kParams, {cfg.q0, cfg.qdot0});
    const double eT = total_energy(kParams, {last.q, last.qdot});
    CHECK(std::abs(eT - e0) / std::abs(e0) <= 1e-6);
}

TEST_CASE("starting at a torque-free setpoint gives zero ISE") {
    SimConfig cfg;
    cfg.q0 = {0.0, 0.0};
    cfg.qd = {0.0, 0.0};
    cfg.t_final = 2.0;
    const SimResult r = simulate(kParams, kBaseline, cfg);
    REQUIRE_FALSE(r.diverged);
    CHECK(r.ise == 0.0);
    CHECK(r.metrics[0].overshoot_pct == 0.0);
    CHECK(r.metrics[1].overshoot_pct == 0.0);
    CHECK(r.metrics[0].settling_time == 0.0);
    CHECK(r.metrics[1].settling_time == 0.0);
}

TEST_CASE("uncontrolled overdamped arm keeps the initial error") {
    RobotParams p = kParams;
    p.b1 = 400.0;
    p.b2 = 400.0;
    SimConfig cfg;
    cfg.t_final = 0.5;
    const SimResult r = simulate(p, kNoControl, cfg);
    REQUIRE_FALSE(r.diverged);
    CHECK(r.ise > 0.0);
    // No control authority: the arm barely creeps, so steady-state error
    // stays close to |qd - q0| = pi/2 on both joints.
    CHECK(r.metrics[0].steady_state_error == Approx(M_PI / 2.0).epsilon(0.10));
    CHECK(r.metrics[1].steady_state_error == Approx(M_PI / 2.0).epsilon(0.10));
}

TEST_CASE("simulation is deterministic") {
    SimConfig cfg;
    cfg.t_final = 2.0;
    const SimResult a = simulate(kParams, kBaseline, cfg);
    const SimResult b = simulate(kParams, kBaseline, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    CHECK(a.ise == b.ise);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].q == b.samples[i].q);
        CHECK(a.samples[i].qdot == b.samples[i].qdot);
        CHECK(a.samples[i].tau == b.samples[i].tau);
    }
}

TEST_CASE("ISE grows with the horizon") {
    SimConfig short_cfg;
    short_cfg.t_final = 2.0;
    SimConfig long_cfg;
    long_cfg.t_final = 4.0;
    const double ise_short = simulate(kParams, kBaseline, short_cfg).ise;
    const double ise_long = simulate(kParams, kBaseline, long_cfg).ise;
    CHECK(ise_long >= ise_short);
}

TEST_CASE("work-energy balance under control") {
    SimConfig cfg;  // default 10 s at 1 kHz, frictionless plant
    const SimResult r = simulate(kParams, kBaseline, cfg);
    REQUIRE_FALSE(r.diverged);

    double work = 0.0;
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        const auto& a = r.samples[i - 1];
        const auto& b = r.samples[i];
        const double pa = a.qdot[0] * a.tau[0] + a.qdot[1] * a.tau[1];
        const double pb = b.qdot[0] * b.tau[0] + b.qdot[1] * b.tau[1];
        work += 0.5 * (b.t - a.t) * (pa + pb);
    }
    const double e0 = total_energy(kParams, {cfg.q0, cfg.qdot0});
    const auto& last = r.samples.back();
    const double eT = total_energy(kParams, {last.q, last.qdot});
    CHECK(std::abs(eT - e0 - work) <= 1e-4 * std::max(std::abs(e0), 1.0));
}

TEST_CASE("diverged runs report the penalty and nothing else") {
    SimConfig cfg;
    cfg.blowup_limit = 5.0;  // the uncontrolled swing passes 5 rad/s quickly
    const SimResult r = simulate(kParams, kNoControl, cfg);
    REQUIRE(r.diverged);
    CHECK(r.ise == cfg.divergence_penalty);
    for (const auto& m : r.metrics) {
        CHECK(std::isnan(m.overshoot_pct));
        CHECK(std::isnan(m.settling_time));
        CHECK(std::isnan(m.steady_state_error));
    }
}

TEST_CASE("torque clamp bounds every recorded input") {
    SimConfig cfg;
    cfg.t_final = 2.0;
    cfg.torque_limit = 10.0;
    const SimResult r = simulate(kParams, kBaseline, cfg);
    for (const auto& s : r.samples) {
        CHECK(std::abs(s.tau[0]) <= 10.0);
        CHECK(std::abs(s.tau[1]) <= 10.0);
    }
}

TEST_CASE("record stride controls the sample count") {
    SimConfig cfg;
    cfg.t_final = 1.0;  // 1000 steps
    cfg.record_stride = 7;
    const SimResult r = simulate(kParams, kBaseline, cfg);
    // t=0, every 7th step, plus the off-stride final step.
    CHECK(r.samples.size() == 1 + 142 + 1);
    CHECK(r.samples.back().t == Approx(1.0));
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        CHECK(r.samples[i].t > r.samples[i - 1].t);
    }

    cfg.record_stride = 1;
    CHECK(simulate(kParams, kBaseline, cfg).samples.size() == 1001);
}

TEST_CASE("invalid configurations are rejected") {
    SimConfig bad;
    bad.dt = 0.0;
    CHECK_THROWS_AS(simulate(kParams, kBaseline, bad), InvalidConfig);

    bad = SimConfig{};
    bad.t_final = bad.dt / 2.0;
    CHECK_THROWS_AS(simulate(kParams, kBaseline, bad), InvalidConfig);

    bad = SimConfig{};
    bad.blowup_limit = -1.0;
    CHECK_THROWS_AS(simulate(kParams, kBaseline, bad), InvalidConfig);

    bad = SimConfig{};
    bad.record_stride = 0;
    CHECK_THROWS_AS(simulate(kParams, kBaseline, bad), InvalidConfig);

    PidGains negative;
    negative.kp1 = -1.0;
    CHECK_THROWS_AS(simulate(kParams, negative, SimConfig{}), InvalidConfig);
}
