#include "vfo_adr/scenarios.hpp"
#include "vfo_adr/simulation.hpp"

#include <catch_amalgamated.hpp>

using namespace vfo_adr;
using Catch::Matchers::WithinAbs;

namespace {

ScenarioConfig short_run(ScenarioConfig c, double horizon) {
    c.horizon = horizon;
    c.metric_t1 = 0.0;
    c.metric_t2 = horizon;
    return c;
}

}  // namespace

TEST_CASE("path-following error") {
    const PathSpec helix = make_helix_path();
    const Vec3 p(0, 1, 0);
    const PathFrame f = evaluate_frame(helix, p);
    Vec6 eta;
    eta << p, 0.0, std::atan(-0.25), 0.0;
    const PathFollowingError aligned = path_following_error(eta, helix, f);
    CHECK(aligned.e.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(aligned.position_norm() < 1e-15);

    eta(5) = -kTwoPi - 0.1;
    const PathFollowingError wound = path_following_error(eta, helix, f);
    CHECK_THAT(wound.e(4), WithinAbs(kTwoPi + 0.1, 1e-15));
    CHECK_THAT(wound.e_2pi(4), WithinAbs(0.1, 1e-14));

    eta(5) = -kPi;  // exactly pi maps to +pi
    CHECK_THAT(path_following_error(eta, helix, f).e_2pi(4), WithinAbs(kPi, 1e-15));
}

TEST_CASE("heading discrepancies vanish on the path") {
    const PathSpec helix = make_helix_path();
    const VfoGains g;
    const PathFrame f = evaluate_frame(helix, Vec3(0, 1, 0));
    const Vec3 field = convergence_field_longitudinal(f, g, helix.desired_speed(), Vec3::Zero());
    AuxiliaryState st;
    const AuxiliaryOrientation a = auxiliary_orientation(field, helix.strategy, st);
    const HeadingDiscrepancy h = yaw_pitch_discrepancies(f, field, a.yaw, helix, g, Vec3::Zero());
    CHECK_THAT(h.yaw, WithinAbs(0.0, 1e-15));
    CHECK_THAT(h.pitch, WithinAbs(0.0, 1e-15));
    CHECK_THAT(h.yaw_bound, WithinAbs(0.0, 1e-15));

    SECTION("closed-form pitch discrepancy equals the angle difference off the path") {
        const Vec3 p(0.1, 0.9, 0.05);
        const PathFrame q = evaluate_frame(helix, p);
        const Vec3 fp = convergence_field_longitudinal(q, g, helix.desired_speed(), Vec3::Zero());
        AuxiliaryState s2;
        const AuxiliaryOrientation aux = auxiliary_orientation(fp, helix.strategy, s2);
        const HeadingDiscrepancy d = yaw_pitch_discrepancies(q, fp, aux.yaw, helix, g, Vec3::Zero());
        const DesiredOrientation des = desired_orientation(helix, q);
        CHECK_THAT(d.pitch, WithinAbs(des.pitch - aux.pitch, 1e-12));
        CHECK_THAT(d.yaw, WithinAbs(des.yaw - aux.yaw, 1e-12));
        CHECK(std::abs(d.yaw) <= d.yaw_bound);
    }
}

TEST_CASE("ground-truth disturbance") {
    PlantConfig pc;
    pc.inertia = Mat6::Identity() * 4.0;
    pc.linear_damping = Vec6::Constant(2.0);
    pc.coriolis = false;
    const VehiclePlant plant = build_plant(pc);
    CHECK(ground_truth_disturbance(plant, Vec6::Zero(), Vec6::Zero(), Vec6::Zero(), 0.0, Vec6::Zero(),
                                   Vec6::Constant(0.25))
              .isZero(0.0));

    SECTION("one-DoF hand-derived value") {
        // surge with exact model b_hat = 1/m: d = eta_c'' + (rho u + tau*) / m
        pc.disturbance = {{0, 0.3, 0.0, kPi / 2.0}};
        const VehiclePlant p = build_plant(pc);
        Vec6 nu = Vec6::Zero(), tau = Vec6::Zero(), acc = Vec6::Zero();
        nu(0) = 0.5;
        tau(0) = 1.0;
        acc(0) = 0.1;
        const Vec6 d = ground_truth_disturbance(p, Vec6::Zero(), nu, tau, 0.0, acc, Vec6::Constant(0.25));
        CHECK_THAT(d(0), WithinAbs(0.1 + (2.0 * 0.5 + 0.3) / 4.0, 1e-15));
        CHECK(d.tail<5>().isZero(1e-15));
    }
}

TEST_CASE("metrics of a constant series") {
    SimulationTrace tr;
    for (int i = 0; i <= 100; ++i) {
        TraceSample s;
        s.t = 0.1 * i;
        s.eta = s.nu = s.eta_c = s.tau = s.eps = s.eps_hat = s.d = s.d_hat = Vec6::Zero();
        s.nu_c = Vec6::Zero();
        s.nu_c(0) = 0.2;
        s.applied_tau = Vec6::Zero();
        s.applied_tau(3) = -0.7;
        s.xhat = Vec18::Zero();
        s.e << 0.3, 0.4, 0.0, 0.0, 0.0;
        s.e_2pi = s.e;
        s.e_a = Vec2(0.1, -0.2);
        tr.samples.push_back(s);
    }
    const Metrics m = compute_metrics(tr, 2.0, 8.0);
    CHECK_THAT(m.sup_e_p, WithinAbs(0.5, 1e-15));
    CHECK_THAT(m.avg_e_p, WithinAbs(0.5, 1e-14));
    CHECK_THAT(m.sup_e_2pi, WithinAbs(0.5, 1e-15));
    CHECK_THAT(m.avg_abs_e_theta_a, WithinAbs(0.1, 1e-14));
    CHECK_THAT(m.avg_abs_e_psi_a, WithinAbs(0.2, 1e-14));
    CHECK_THAT(m.avg_nu_c, WithinAbs(0.2, 1e-14));
    CHECK_THAT(m.avg_applied_tau, WithinAbs(0.7, 1e-14));
    CHECK(m.max_commanded_velocity == 0.2);
    CHECK(m.max_applied_force == 0.7);
    CHECK_THROWS_AS(compute_metrics(tr, 20.0, 30.0), EmptyWindow);
}

TEST_CASE("trapezoidal average of a ramp") {
    SimulationTrace tr;
    for (int i = 0; i <= 10; ++i) {
        TraceSample s;
        s.t = i;
        s.eta = s.nu = s.eta_c = s.tau = s.eps = s.eps_hat = s.d = s.d_hat = s.nu_c = s.applied_tau = Vec6::Zero();
        s.xhat = Vec18::Zero();
        s.e << static_cast<double>(i), 0, 0, 0, 0;
        s.e_2pi = s.e;
        s.e_a = Vec2::Zero();
        tr.samples.push_back(s);
    }
    const Metrics m = compute_metrics(tr, 0.0, 10.0);
    CHECK_THAT(m.avg_e_p, WithinAbs(5.0, 1e-14));
    CHECK(m.sup_e_p == 10.0);
}

TEST_CASE("scenario config invariants") {
    ScenarioConfig c = scenario_a();
    CHECK_NOTHROW(c.check());
    c.initial_eta(4) = 2.0;
    CHECK_THROWS_AS(c.check(), InvalidArgument);
    c = scenario_a();
    c.observer_bandwidths(2) = -5.0;
    CHECK_THROWS_AS(c.check(), InvalidArgument);
    c = scenario_a();
    c.metric_t2 = 200.0;
    CHECK_THROWS_AS(c.check(), InvalidArgument);
}

TEST_CASE("open-loop run keeps the vehicle at rest") {
    // controller inhibited for the whole horizon, no disturbance, nu(0) = 0
    ScenarioConfig c = short_run(scenario_a(), 2.0);
    c.inhibit_until = 10.0;
    const SimulationTrace tr = run_scenario(c);
    REQUIRE(tr.completed());
    REQUIRE(tr.samples.size() == 2001);
    for (const auto& s : tr.samples) {
        CHECK(s.eta == c.initial_eta);
        CHECK(s.applied_tau.isZero(0.0));
        CHECK(s.eta.allFinite());
    }
    CHECK(tr.samples.back().e == tr.samples.front().e);
}

TEST_CASE("scenario A short run converges toward the path") {
    const ScenarioConfig c = short_run(scenario_a(), 10.0);
    const SimulationTrace tr = run_scenario(c);
    REQUIRE(tr.completed());
    CHECK(tr.samples.size() == 10001);
    CHECK(tr.samples.front().t == 0.0);
    CHECK(tr.samples.back().t == 10.0);
    const double e0 = tr.samples.front().e.head<2>().norm();
    const double e1 = tr.samples.back().e.head<2>().norm();
    CHECK(e1 < 0.1 * e0);
    // inhibition window: no force before t = 1 s
    for (const auto& s : tr.samples) {
        if (s.t < 1.0) CHECK(s.applied_tau.isZero(0.0));
    }
    // sway and heave are never actuated
    for (const auto& s : tr.samples) {
        CHECK(s.applied_tau(1) == 0.0);
        CHECK(s.applied_tau(2) == 0.0);
    }
}

TEST_CASE("runs are deterministic") {
    const ScenarioConfig c = short_run(scenario_b(), 3.0);
    const SimulationTrace a = run_scenario(c), b = run_scenario(c);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        REQUIRE(a.samples[i].eta == b.samples[i].eta);
        REQUIRE(a.samples[i].xhat == b.samples[i].xhat);
    }
}

TEST_CASE("singular attitude ends the run with a fault status") {
    ScenarioConfig c = short_run(scenario_a(), 2.0);
    c.singularity_margin = 1.5;  // admissible pitch |theta| < pi/2 - 1.5 ~ 0.07
    const SimulationTrace tr = run_scenario(c);
    CHECK(tr.status == RunStatus::SingularAttitude);
    CHECK_FALSE(tr.fault.empty());
    CHECK(tr.samples.size() < 2001);
}
