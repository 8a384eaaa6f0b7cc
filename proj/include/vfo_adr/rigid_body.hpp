#pragma once

// Kinematics and ground-truth dynamics of a 6-DoF rigid body described by
// global position, RPY Euler angles and body-frame pseudovelocities.

#include "vfo_adr/common.hpp"

#include <functional>
#include <utility>

namespace vfo_adr {

/// Minimum admissible |cos(pitch)|.
inline constexpr double kDefaultSingularityMargin = 1e-6;

struct Configuration {
    Vec3 position = Vec3::Zero();  // x, y, z in {G} [m]
    Vec3 attitude = Vec3::Zero();  // roll, pitch, yaw [rad]

    static Configuration from_vector(const Vec6& eta) {
        return {eta.head<3>(), eta.tail<3>()};
    }
    Vec6 to_vector() const {
        Vec6 v;
        v << position, attitude;
        return v;
    }
};

struct Pseudovelocity {
    Vec3 linear = Vec3::Zero();   // u, v, w [m/s]
    Vec3 angular = Vec3::Zero();  // p, q, r [rad/s]

    static Pseudovelocity from_vector(const Vec6& nu) {
        return {nu.head<3>(), nu.tail<3>()};
    }
    Vec6 to_vector() const {
        Vec6 v;
        v << linear, angular;
        return v;
    }
};

inline Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return s;
}

/// Body-to-global rotation for RPY angles (Rz(yaw) * Ry(pitch) * Rx(roll)).
inline Mat3 rotation_matrix(const Vec3& attitude) {
    const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
    const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
    const double cpsi = std::cos(attitude.z()), spsi = std::sin(attitude.z());
    Mat3 r;
    r << cpsi * cth, cpsi * sphi * sth - cphi * spsi, cpsi * cphi * sth + sphi * spsi,
         spsi * cth, spsi * sphi * sth + cphi * cpsi, spsi * cphi * sth - sphi * cpsi,
         -sth, sphi * cth, cphi * cth;
    return r;
}

inline void check_pitch(double pitch, double margin) {
    if (!std::isfinite(pitch)) throw NonFiniteState("pitch angle is not finite");
    if (std::abs(std::cos(pitch)) < margin) {
        throw SingularAttitude("pitch " + std::to_string(pitch) +
                               " rad is within the singularity margin of +-pi/2");
    }
}

/// Maps body angular rates (p, q, r) to Euler-angle rates.
inline Mat3 angular_velocity_transform(const Vec3& attitude,
                                       double margin = kDefaultSingularityMargin) {
    check_pitch(attitude.y(), margin);
    const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
    const double cth = std::cos(attitude.y()), tth = std::tan(attitude.y());
    Mat3 t;
    t << 1.0, sphi * tth, cphi * tth,
         0.0, cphi, -sphi,
         0.0, sphi / cth, cphi / cth;
    return t;
}

/// Closed-form inverse of angular_velocity_transform.
inline Mat3 angular_velocity_transform_inverse(const Vec3& attitude,
                                               double margin = kDefaultSingularityMargin) {
    check_pitch(attitude.y(), margin);
    const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
    const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
    Mat3 t;
    t << 1.0, 0.0, -sth,
         0.0, cphi, sphi * cth,
         0.0, -sphi, cphi * cth;
    return t;
}

inline Mat6 jacobian(const Vec3& attitude, double margin = kDefaultSingularityMargin) {
    Mat6 j = Mat6::Zero();
    j.topLeftCorner<3, 3>() = rotation_matrix(attitude);
    j.bottomRightCorner<3, 3>() = angular_velocity_transform(attitude, margin);
    return j;
}

inline Mat6 jacobian_inverse(const Vec3& attitude, double margin = kDefaultSingularityMargin) {
    Mat6 j = Mat6::Zero();
    j.topLeftCorner<3, 3>() = rotation_matrix(attitude).transpose();
    j.bottomRightCorner<3, 3>() = angular_velocity_transform_inverse(attitude, margin);
    return j;
}

/// Time derivative of the jacobian along the motion given by body rates.
inline Mat6 jacobian_derivative(const Vec3& attitude, const Vec3& body_rates,
                                double margin = kDefaultSingularityMargin) {
    const Mat3 t = angular_velocity_transform(attitude, margin);
    const Vec3 euler_rates = t * body_rates;
    const double cphi = std::cos(attitude.x()), sphi = std::sin(attitude.x());
    const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
    const double tth = sth / cth, sec2 = 1.0 / (cth * cth);

    Mat3 d_roll;
    d_roll << 0.0, cphi * tth, -sphi * tth,
              0.0, -sphi, -cphi,
              0.0, cphi / cth, -sphi / cth;
    Mat3 d_pitch;
    d_pitch << 0.0, sphi * sec2, cphi * sec2,
               0.0, 0.0, 0.0,
               0.0, sphi * sth * sec2, cphi * sth * sec2;

    Mat6 jd = Mat6::Zero();
    jd.topLeftCorner<3, 3>() = rotation_matrix(attitude) * skew(body_rates);
    jd.bottomRightCorner<3, 3>() = d_roll * euler_rates.x() + d_pitch * euler_rates.y();
    return jd;
}

// ---------------------------------------------------------------------------
// Plant
// ---------------------------------------------------------------------------

/// Rigid-body Coriolis/centripetal matrix derived from a 6x6 inertia matrix.
inline Mat6 rigid_body_coriolis(const Mat6& inertia, const Vec6& nu) {
    const Vec3 a1 = inertia.topRows<3>() * nu;
    const Vec3 a2 = inertia.bottomRows<3>() * nu;
    Mat6 c = Mat6::Zero();
    c.topRightCorner<3, 3>() = -skew(a1);
    c.bottomLeftCorner<3, 3>() = -skew(a1);
    c.bottomRightCorner<3, 3>() = -skew(a2);
    return c;
}

using DisturbanceFn = std::function<Vec6(double)>;
using RestoringFn = std::function<Vec6(const Vec6&)>;

struct PlantParameters {
    Mat6 inertia = Mat6::Identity();
    Vec6 linear_damping = Vec6::Ones();  // diagonal of the damping matrix
    Vec6 actuation = Vec6::Ones();       // diagonal of the 0/1 input matrix
    bool coriolis = true;
    RestoringFn restoring;               // empty means zero restoring forces
    DisturbanceFn external_disturbance;  // global-frame, empty means none
};

/// Ground-truth vehicle model. Validated on construction, immutable after.
class VehiclePlant {
public:
    explicit VehiclePlant(PlantParameters params) : p_(std::move(params)) {
        if (!p_.inertia.allFinite() || !p_.inertia.isApprox(p_.inertia.transpose(), 1e-12)) {
            throw InvalidArgument("inertia matrix must be finite and symmetric");
        }
        Eigen::LLT<Mat6> llt(p_.inertia);
        if (llt.info() != Eigen::Success) {
            throw InvalidArgument("inertia matrix must be positive definite");
        }
        inertia_inverse_ = llt.solve(Mat6::Identity());
        for (int i = 0; i < 6; ++i) {
            if (!(p_.linear_damping(i) > 0.0)) {
                throw InvalidArgument("linear damping coefficients must be positive");
            }
            const double g = p_.actuation(i);
            if (g != 0.0 && g != 1.0) {
                throw InvalidArgument("actuation entries must be 0 or 1");
            }
        }
        for (int i : {0, 3, 4, 5}) {
            if (p_.actuation(i) != 1.0) {
                throw InvalidArgument("surge, roll, pitch and yaw must be actuated");
            }
        }
    }

    const Mat6& inertia() const { return p_.inertia; }
    const Mat6& inertia_inverse() const { return inertia_inverse_; }
    const Vec6& linear_damping() const { return p_.linear_damping; }
    const Vec6& actuation() const { return p_.actuation; }
    Mat6 actuation_matrix() const { return p_.actuation.asDiagonal(); }
    bool coriolis_enabled() const { return p_.coriolis; }

    /// Restoring, Coriolis and damping terms.
    Vec6 mu(const Vec6& eta, const Vec6& nu) const {
        Vec6 m = p_.linear_damping.cwiseProduct(nu);
        if (p_.coriolis) m += rigid_body_coriolis(p_.inertia, nu) * nu;
        if (p_.restoring) m += p_.restoring(eta);
        return m;
    }

    /// External disturbance expressed in {G}.
    Vec6 external_disturbance_global(double t) const {
        return p_.external_disturbance ? p_.external_disturbance(t) : Vec6::Zero();
    }

private:
    PlantParameters p_;
    Mat6 inertia_inverse_;
};

struct StateRates {
    Vec6 eta_dot;
    Vec6 nu_dot;
};

/// Right-hand side of the kinematics plus body-frame dynamics.
/// tau is the body-frame control vector before the actuation cut.
inline StateRates plant_derivative(const VehiclePlant& plant, const Vec6& eta, const Vec6& nu,
                                   const Vec6& tau, double t,
                                   double margin = kDefaultSingularityMargin) {
    if (!eta.allFinite() || !nu.allFinite() || !tau.allFinite() || !std::isfinite(t)) {
        throw NonFiniteState("plant input contains NaN or Inf");
    }
    const Vec3 attitude = eta.tail<3>();
    const Mat6 j = jacobian(attitude, margin);
    const Vec6 tau_star = j.transpose() * plant.external_disturbance_global(t);
    StateRates out;
    out.eta_dot = j * nu;
    out.nu_dot = plant.inertia_inverse() *
                 (plant.actuation().cwiseProduct(tau) - plant.mu(eta, nu) - tau_star);
    return out;
}

}  // namespace vfo_adr
