#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vfo_adr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pitch too close to +-pi/2 for the Euler-rate transform.
class SingularAttitude : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// A level-surface gradient left its admissible norm band.
class DegenerateGradient : public Error {
public:
    using Error::Error;
};

class CollinearGradients : public Error {
public:
    using Error::Error;
};

/// Path tangent has no horizontal component, so the desired yaw is undefined.
class PlanarTangentDegenerate : public Error {
public:
    using Error::Error;
};

/// Auxiliary orientation is indeterminate and there is nothing to hold.
class NoPriorState : public Error {
public:
    using Error::Error;
};

class FrozenState : public Error {
public:
    using Error::Error;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Angle helpers
// ---------------------------------------------------------------------------

/// Wraps to [-pi, pi).
inline double wrap_to_pi_half_open(double angle) {
    double wrapped = std::fmod(angle + kPi, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    wrapped -= kPi;
    if (wrapped >= kPi) wrapped -= kTwoPi;
    return wrapped;
}

/// Wraps to (-pi, pi].
inline double wrap_to_pi(double angle) {
    return -wrap_to_pi_half_open(-angle);
}

/// Four-quadrant arctangent with range [-pi, pi).
inline double atan2_half_open(double y, double x) {
    double a = std::atan2(y, x);
    return a >= kPi ? a - kTwoPi : a;
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

}  // namespace vfo_adr
