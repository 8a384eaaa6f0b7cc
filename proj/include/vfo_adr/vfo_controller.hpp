#pragma once

// Outer (kinematic) loop: the modified convergence vector field, the
// auxiliary orientation it induces, and the commanded pseudovelocities for a
// torpedo-like vehicle (no commanded sway or heave).

#include "vfo_adr/common.hpp"
#include "vfo_adr/path_geometry.hpp"
#include "vfo_adr/rigid_body.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace vfo_adr {

struct VfoGains {
    double k_p = 2.0;
    double k_theta = 4.0;
    double k_psi = 4.0;
    double k_phi = 5.0;
    double delta_p = 0.75;  // in [0, 1)
    double delta_o = 1.0;   // in [0, 1]

    void check() const {
        if (!(k_p > 0.0) || !(k_theta > 0.0) || !(k_psi > 0.0) || !(k_phi > 0.0)) {
            throw InvalidArgument("VFO gains must be positive");
        }
        if (!(delta_p >= 0.0 && delta_p < 1.0)) throw InvalidArgument("delta_p must lie in [0, 1)");
        if (!(delta_o >= 0.0 && delta_o <= 1.0)) throw InvalidArgument("delta_o must lie in [0, 1]");
    }
};

/// h_p + delta_p * eps_hat_p, where h_p = u_d t + k_p (s1 n1 + s2 n2).
inline Vec3 convergence_field_longitudinal(const PathFrame& frame, const VfoGains& gains,
                                           double desired_speed, const Vec3& eps_hat_p) {
    const Vec3 h = desired_speed * frame.tangent +
                   gains.k_p * (frame.s(0) * frame.normals[0] + frame.s(1) * frame.normals[1]);
    return h + gains.delta_p * eps_hat_p;
}

/// Time derivative of the longitudinal field. `position_rate` is whichever
/// estimate of the position velocity the caller trusts.
inline Vec3 convergence_field_longitudinal_rate(const PathSpec& path, const PathFrame& frame,
                                                const Vec3& position, const Vec3& position_rate,
                                                const VfoGains& gains, const Vec3& eps_hat_p_dot) {
    const FrameRates r = frame_time_derivatives(path, frame, position, position_rate);
    const Vec3 h_dot = path.desired_speed() * r.tangent_dot +
                       gains.k_p * (r.s_dot(0) * frame.normals[0] + frame.s(0) * r.normal_dots[0] +
                                    r.s_dot(1) * frame.normals[1] + frame.s(1) * r.normal_dots[1]);
    return h_dot + gains.delta_p * eps_hat_p_dot;
}

// ---------------------------------------------------------------------------
// Auxiliary orientation
// ---------------------------------------------------------------------------

/// Returns the representative of `angle` + 2 pi k closest to `reference`.
inline double unwrap_near(double angle, double reference) {
    const double k = std::round((reference - angle) / kTwoPi);
    return angle + k * kTwoPi;
}

struct HeldOrientation {
    double pitch = 0.0;
    double yaw = 0.0;
    double pitch_rate = 0.0;
    double yaw_rate = 0.0;
};

/// Mutable state of the outer loop: the continuous yaw accumulator and the
/// last well-defined auxiliary orientation, held while the field's
/// horizontal projection vanishes.
struct AuxiliaryState {
    double freeze_epsilon = 1e-6;
    bool seeded = false;
    double yaw_continuous = 0.0;
    HeldOrientation last{};
    bool frozen = false;
};

struct AuxiliaryOrientation {
    double pitch = 0.0;
    double yaw = 0.0;  // on the continuous accumulator
    bool frozen = false;
};

inline double horizontal_field_sq(const Vec3& field) {
    return field.x() * field.x() + field.y() * field.y();
}

/// Computes (theta_a, psi_a) and advances `state`'s yaw accumulator.
/// Only the orientation part of `state.last` is refreshed here; the caller
/// stores the matching rates once they are known.
inline AuxiliaryOrientation auxiliary_orientation(const Vec3& field, int strategy, AuxiliaryState& state) {
    if (horizontal_field_sq(field) < state.freeze_epsilon) {
        if (!state.seeded) {
            throw NoPriorState("auxiliary orientation indeterminate on first evaluation");
        }
        state.frozen = true;
        return {state.last.pitch, state.last.yaw, true};
    }
    const double xi = strategy;
    double yaw = std::atan2(xi * field.y(), xi * field.x());
    if (state.seeded) {
        yaw = unwrap_near(yaw, state.yaw_continuous);
    } else {
        yaw = atan2_half_open(xi * field.y(), xi * field.x());
    }
    const double pitch =
        std::atan(-field.z() / (field.x() * std::cos(yaw) + field.y() * std::sin(yaw)));
    state.yaw_continuous = yaw;
    state.seeded = true;
    state.frozen = false;
    state.last.pitch = pitch;
    state.last.yaw = yaw;
    return {pitch, yaw, false};
}

struct AuxiliaryRates {
    double pitch_rate = 0.0;
    double yaw_rate = 0.0;
};

inline AuxiliaryRates auxiliary_orientation_derivative(const Vec3& field, const Vec3& field_rate,
                                                       double yaw_a, double freeze_epsilon = 1e-6) {
    const double hxy = horizontal_field_sq(field);
    if (hxy < freeze_epsilon) throw FrozenState("auxiliary orientation rate indeterminate");
    const double hx = field.x(), hy = field.y(), hz = field.z();
    const double dx = field_rate.x(), dy = field_rate.y(), dz = field_rate.z();
    const double c = std::cos(yaw_a), s = std::sin(yaw_a);

    AuxiliaryRates r;
    r.yaw_rate = (dy * hx - dx * hy) / hxy;
    const double proj = hx * c + hy * s;
    const double proj_rate = dx * c + dy * s - hx * r.yaw_rate * s + hy * r.yaw_rate * c;
    const double beta2 = dz * proj - hz * proj_rate;
    const double beta3 = hz * hz + proj * proj;
    r.pitch_rate = -beta2 / beta3;
    return r;
}

/// Angular part of the modified field: feedforward rates + K_a e_a + delta_o eps_hat_o.
inline Vec2 convergence_field_angular(double pitch_a, double yaw_a, double pitch_rate_a,
                                      double yaw_rate_a, const Vec3& attitude, const VfoGains& gains,
                                      const Vec2& eps_hat_o) {
    const Vec2 e_a(wrap_to_pi_half_open(pitch_a - attitude.y()), yaw_a - attitude.z());
    return Vec2(pitch_rate_a + gains.k_theta * e_a(0), yaw_rate_a + gains.k_psi * e_a(1)) +
           gains.delta_o * eps_hat_o;
}

// ---------------------------------------------------------------------------
// Commanded pseudovelocities
// ---------------------------------------------------------------------------

struct CommandedVelocity {
    double u = 0.0;
    double v = 0.0;  // always zero
    double w = 0.0;  // always zero
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;

    Vec6 to_vector() const {
        Vec6 n;
        n << u, v, w, p, q, r;
        return n;
    }
};

/// u_c, q_c, r_c from the modified field; p_c is left at zero.
inline CommandedVelocity commanded_velocities(const Vec3& field_p, const Vec2& field_o, const Vec3& attitude) {
    const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
    const double cpsi = std::cos(attitude.z()), spsi = std::sin(attitude.z());
    CommandedVelocity c;
    c.u = field_p.x() * cth * cpsi + field_p.y() * cth * spsi - field_p.z() * sth;
    c.q = field_o(0);
    c.r = field_o(1) * cth;
    return c;
}

/// Roll feedback f_phi; receives the attitude and returns a roll-rate term.
using RollFeedback = std::function<double(const Vec3& attitude)>;

inline RollFeedback proportional_roll_feedback(double k_phi) {
    return [k_phi](const Vec3& attitude) { return -k_phi * attitude.x(); };
}

inline double roll_stabilizer(const Vec3& attitude, double q_c, double r_c, const VfoGains& gains,
                              const RollFeedback& feedback = {}) {
    const double f = feedback ? feedback(attitude) : -gains.k_phi * attitude.x();
    const double sphi = std::sin(attitude.x()), cphi = std::cos(attitude.x());
    const double tth = std::tan(attitude.y());
    return f - sphi * tth * q_c - cphi * tth * r_c;
}

struct VelocityLimits {
    Vec6 magnitude = Vec6::Constant(8.0);  // m/s and rad/s
    Vec6 rate = Vec6::Constant(2.0);       // per second

    void check() const {
        if (!(magnitude.array() > 0.0).all() || !(rate.array() > 0.0).all()) {
            throw InvalidArgument("velocity limits must be positive");
        }
    }
};

/// Scales the whole vector by one factor <= 1 so every component fits its limit.
inline Vec6 limit_magnitude(const Vec6& commanded, const VelocityLimits& limits) {
    double factor = 1.0;
    for (int i = 0; i < 6; ++i) {
        const double a = std::abs(commanded(i));
        if (a > limits.magnitude(i)) factor = std::min(factor, limits.magnitude(i) / a);
    }
    return commanded * factor;
}

inline Vec6 limit_rate(const Vec6& target, const Vec6& previous, double dt, const VelocityLimits& limits) {
    if (!(dt >= 0.0)) throw InvalidArgument("dt must be non-negative");
    Vec6 out;
    for (int i = 0; i < 6; ++i) {
        const double step = limits.rate(i) * dt;
        out(i) = previous(i) + std::clamp(target(i) - previous(i), -step, step);
    }
    return out;
}

inline Vec6 scale_commanded_velocities(const Vec6& commanded, const Vec6& previous, double dt,
                                       const VelocityLimits& limits) {
    return limit_rate(limit_magnitude(commanded, limits), previous, dt, limits);
}

}  // namespace vfo_adr
