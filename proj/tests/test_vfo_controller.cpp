#include "vfo_adr/vfo_controller.hpp"

#include <catch_amalgamated.hpp>

using namespace vfo_adr;
using Catch::Matchers::WithinAbs;

TEST_CASE("longitudinal field") {
    const PathSpec helix = make_helix_path();
    const VfoGains g;
    const PathFrame on = evaluate_frame(helix, Vec3(0, 1, 0));

    const Vec3 h = convergence_field_longitudinal(on, g, 0.1, Vec3::Zero());
    CHECK((h - 0.1 * on.tangent).norm() < 1e-16);
    CHECK_THAT(h.x(), WithinAbs(0.0970, 5e-5));
    CHECK_THAT(h.y(), WithinAbs(0.0, 1e-16));
    CHECK_THAT(h.z(), WithinAbs(0.0243, 5e-5));

    SECTION("off the path the normals pull toward it") {
        const Vec3 p(0.2, 1.1, 0.0);
        const PathFrame f = evaluate_frame(helix, p);
        const Vec3 field = convergence_field_longitudinal(f, g, 0.1, Vec3::Zero());
        // s1 = -0.2, s2 = -0.1; hand-evaluated oracle
        const Vec3 n1 = Vec3(1, 0, -4) / std::sqrt(17.0), n2(0, 1, 0);
        const Vec3 expect = 0.1 * f.tangent + 2.0 * (-0.2 * n1 - 0.1 * n2);
        CHECK((field - expect).norm() < 1e-15);
        // moving along the field reduces |s|
        const PathFrame next = evaluate_frame(helix, p + 1e-4 * field);
        CHECK(next.s.norm() < f.s.norm());
    }
    SECTION("compensation term") {
        const Vec3 eps(0.3, -0.1, 0.2);
        VfoGains off = g;
        off.delta_p = 0.0;
        CHECK(convergence_field_longitudinal(on, off, 0.1, eps) == convergence_field_longitudinal(on, off, 0.1, Vec3::Zero()));
        CHECK((convergence_field_longitudinal(on, g, 0.1, eps) - h - 0.75 * eps).norm() < 1e-16);
    }
}

TEST_CASE("longitudinal field rate matches finite differences") {
    const PathSpec helix = make_helix_path();
    const VfoGains g;
    const Vec3 p(0.3, 0.7, 0.2), v(0.1, -0.2, 0.3);
    const Vec3 eps(0.01, 0.02, -0.03), eps_dot(0.1, 0.0, -0.2);
    auto field = [&](double t) {
        return convergence_field_longitudinal(evaluate_frame(helix, p + t * v), g, helix.desired_speed(),
                                              eps + t * eps_dot);
    };
    const double h = 1e-5;
    const Vec3 fd = (field(h) - field(-h)) / (2 * h);
    const Vec3 an = convergence_field_longitudinal_rate(helix, evaluate_frame(helix, p), p, v, g, eps_dot);
    CHECK((fd - an).norm() < 1e-8);
}

TEST_CASE("auxiliary orientation") {
    AuxiliaryState st;
    CHECK_THROWS_AS(auxiliary_orientation(Vec3(0, 0, 1), 1, st), NoPriorState);

    const AuxiliaryOrientation a = auxiliary_orientation(Vec3(1, 0, 0), 1, st);
    CHECK(a.pitch == 0.0);
    CHECK(a.yaw == 0.0);
    CHECK_FALSE(a.frozen);

    AuxiliaryState s2;
    const AuxiliaryOrientation b = auxiliary_orientation(0.1 * Vec3(4, 0, 1) / std::sqrt(17.0), 1, s2);
    const PathSpec helix = make_helix_path();
    const DesiredOrientation d = desired_orientation(helix, evaluate_frame(helix, Vec3(0, 1, 0)));
    CHECK_THAT(b.yaw, WithinAbs(d.yaw, 1e-15));
    CHECK_THAT(b.pitch, WithinAbs(d.pitch, 1e-15));
    CHECK_THAT(b.pitch, WithinAbs(-0.2450, 1e-4));
}

TEST_CASE("auxiliary yaw stays continuous across pi") {
    AuxiliaryState st;
    const double first = auxiliary_orientation(Vec3(-1, 0.1, 0), 1, st).yaw;
    const double second = auxiliary_orientation(Vec3(-1, -0.1, 0), 1, st).yaw;
    CHECK_THAT(first, WithinAbs(kPi - std::atan(0.1), 1e-15));
    CHECK_THAT(second, WithinAbs(kPi + std::atan(0.1), 1e-14));

    // full turns accumulate
    double yaw = second;
    for (int k = 1; k <= 40; ++k) {
        const double a = kPi + std::atan(0.1) + k * kTwoPi / 20.0;
        yaw = auxiliary_orientation(Vec3(std::cos(a), std::sin(a), 0), 1, st).yaw;
    }
    CHECK_THAT(yaw, WithinAbs(kPi + std::atan(0.1) + 2 * kTwoPi, 1e-12));
}

TEST_CASE("auxiliary orientation holds while the horizontal field vanishes") {
    AuxiliaryState st;
    const AuxiliaryOrientation a = auxiliary_orientation(Vec3(0.5, 0.5, -0.2), 1, st);
    const AuxiliaryOrientation held = auxiliary_orientation(Vec3(1e-4, 0.0, 1.0), 1, st);
    CHECK(held.frozen);
    CHECK(st.frozen);
    CHECK(held.yaw == a.yaw);
    CHECK(held.pitch == a.pitch);
    CHECK_THROWS_AS(auxiliary_orientation_derivative(Vec3(1e-4, 0, 1), Vec3::Ones(), 0.0), FrozenState);
    CHECK_FALSE(auxiliary_orientation(Vec3(0.5, 0.5, -0.2), 1, st).frozen);
}

TEST_CASE("backward strategy flips the auxiliary heading") {
    AuxiliaryState st;
    const AuxiliaryOrientation a = auxiliary_orientation(Vec3(1, 0, 0.2), -1, st);
    CHECK_THAT(a.yaw, WithinAbs(-kPi, 1e-15));
    CHECK_THAT(a.pitch, WithinAbs(std::atan(0.2), 1e-15));
}

TEST_CASE("auxiliary orientation derivative") {
    const AuxiliaryRates zero = auxiliary_orientation_derivative(Vec3(0.3, 0.4, 0.1), Vec3::Zero(), std::atan2(0.4, 0.3));
    CHECK(zero.pitch_rate == 0.0);
    CHECK(zero.yaw_rate == 0.0);

    const AuxiliaryRates r = auxiliary_orientation_derivative(Vec3(1, 0, 0), Vec3(0, 1, 0), 0.0);
    CHECK_THAT(r.yaw_rate, WithinAbs(1.0, 1e-15));
    CHECK_THAT(r.pitch_rate, WithinAbs(0.0, 1e-15));

    SECTION("finite differences of the closed-form angles") {
        const Vec3 h0(0.3, -0.4, 0.25), hd(-0.2, 0.1, 0.3);
        auto yaw = [&](double t) { const Vec3 h = h0 + t * hd; return std::atan2(h.y(), h.x()); };
        auto pitch = [&](double t) {
            const Vec3 h = h0 + t * hd;
            return std::atan(-h.z() / std::hypot(h.x(), h.y()));
        };
        const double dt = 1e-6;
        const AuxiliaryRates a = auxiliary_orientation_derivative(h0, hd, yaw(0));
        CHECK_THAT(a.yaw_rate, WithinAbs((yaw(dt) - yaw(-dt)) / (2 * dt), 1e-8));
        CHECK_THAT(a.pitch_rate, WithinAbs((pitch(dt) - pitch(-dt)) / (2 * dt), 1e-8));
    }
}

TEST_CASE("angular field") {
    const VfoGains g;
    CHECK(convergence_field_angular(0.0, 0.0, 0.0, 0.0, Vec3::Zero(), g, Vec2::Zero()).isZero(0.0));
    const Vec2 h = convergence_field_angular(0.1, -0.2, 0.0, 0.0, Vec3::Zero(), g, Vec2::Zero());
    CHECK_THAT(h(0), WithinAbs(0.4, 1e-15));
    CHECK_THAT(h(1), WithinAbs(-0.8, 1e-15));
    const Vec2 c = convergence_field_angular(0.3, 0.5, 0.0, 0.0, Vec3(0, 0.3, 0.5), g, Vec2(0.05, 0.05));
    CHECK_THAT(c(0), WithinAbs(0.05, 1e-15));
    CHECK_THAT(c(1), WithinAbs(0.05, 1e-15));
    const Vec2 ff = convergence_field_angular(0.0, 0.0, 0.7, -0.3, Vec3::Zero(), g, Vec2::Zero());
    CHECK(ff == Vec2(0.7, -0.3));
}

TEST_CASE("commanded velocities") {
    const CommandedVelocity a = commanded_velocities(Vec3(1, 2, 3), Vec2(0.1, 0.2), Vec3::Zero());
    CHECK(a.u == 1.0);
    CHECK(a.v == 0.0);
    CHECK(a.w == 0.0);
    CHECK(a.p == 0.0);
    CHECK(a.q == 0.1);
    CHECK(a.r == 0.2);

    const CommandedVelocity b = commanded_velocities(Vec3(1, 0, -1), Vec2::Zero(), Vec3(0, kPi / 4, 0));
    CHECK_THAT(b.u, WithinAbs(std::sqrt(2.0), 1e-15));

    const CommandedVelocity c = commanded_velocities(Vec3::Zero(), Vec2(0, 2), Vec3(0, kPi / 3, 0));
    CHECK_THAT(c.r, WithinAbs(1.0, 1e-15));

    // u_c is the projection of the field on the body x axis
    const Vec3 att(0.4, -0.3, 1.1), field(0.2, -0.5, 0.7);
    const double u = commanded_velocities(field, Vec2::Zero(), att).u;
    CHECK_THAT(u, WithinAbs(rotation_matrix(att).col(0).dot(field), 1e-15));
}

TEST_CASE("roll stabilizer") {
    const VfoGains g;
    CHECK(roll_stabilizer(Vec3::Zero(), 0.3, 0.7, g) == 0.0);
    CHECK_THAT(roll_stabilizer(Vec3(0, kPi / 4, 0), 0.0, 1.0, g), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(roll_stabilizer(Vec3(0.1, 0, 0), 0.0, 0.0, g), WithinAbs(-0.5, 1e-15));

    SECTION("commanded roll-angle rate equals the feedback term") {
        const Vec3 att(0.3, 0.4, 0.0);
        const double q = 0.2, r = -0.6;
        const double p = roll_stabilizer(att, q, r, g);
        const Vec3 rates = angular_velocity_transform(att) * Vec3(p, q, r);
        CHECK_THAT(rates(0), WithinAbs(-5.0 * 0.3, 1e-15));
    }
    SECTION("custom feedback") {
        const RollFeedback sat = [](const Vec3& a) { return -std::clamp(a.x(), -0.1, 0.1); };
        CHECK_THAT(roll_stabilizer(Vec3(1.0, 0, 0), 0, 0, g, sat), WithinAbs(-0.1, 1e-15));
    }
}

TEST_CASE("velocity scaling") {
    const VelocityLimits lim;
    Vec6 within;
    within << 1, 0, 0, 0.5, -0.3, 0.2;
    CHECK(limit_magnitude(within, lim) == within);

    Vec6 big = Vec6::Zero();
    big(0) = 16.0;
    big(4) = 2.0;
    const Vec6 m = limit_magnitude(big, lim);
    CHECK(m(0) == 8.0);
    CHECK(m(4) == 1.0);  // common factor preserves direction

    Vec6 target = Vec6::Zero();
    target(0) = 8.0;
    const Vec6 r = scale_commanded_velocities(target, Vec6::Zero(), 0.001, lim);
    CHECK_THAT(r(0), WithinAbs(0.002, 1e-18));
    CHECK(limit_rate(within, within, 0.001, lim) == within);
    CHECK_THROWS_AS(limit_rate(within, within, -1.0, lim), InvalidArgument);
}

TEST_CASE("gain invariants") {
    VfoGains g;
    g.delta_p = 1.0;
    CHECK_THROWS_AS(g.check(), InvalidArgument);
    g = VfoGains{};
    g.k_p = 0.0;
    CHECK_THROWS_AS(g.check(), InvalidArgument);
    g = VfoGains{};
    g.delta_o = 1.0;
    CHECK_NOTHROW(g.check());
}
