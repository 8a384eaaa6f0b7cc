#pragma once

// Non-parametrized reference paths: the intersection of two level surfaces
// s1(p) = 0 and s2(p) = 0, each supplied with analytic gradient and Hessian.

#include "vfo_adr/common.hpp"

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vfo_adr {

struct LevelSurface {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
    std::function<Mat3(const Vec3&)> hessian;
};

/// Admissibility bounds on the level surfaces.
struct PathBounds {
    double gradient_lower = 1e-3;
    double gradient_upper = 1e3;
    double hessian_upper = 1e3;
    double collinearity_floor = 1e-9;  // on |grad s1 x grad s2|
    double planar_tangent_floor = 1e-9;
};

struct PathSpec {
    std::string name;
    LevelSurface s1;
    LevelSurface s2;
    int direction = 1;  // sigma, orientation of the tangent along the path
    int strategy = 1;   // xi_d, +1 forward / -1 backward motion
    double speed = 0.1; // U > 0 [m/s]
    PathBounds bounds;
    /// Optional on-path point generator used by diagnostics and test harnesses.
    std::function<Vec3(double)> reference_point;

    double desired_speed() const { return strategy * speed; }

    void check() const {
        if (direction != 1 && direction != -1) throw InvalidArgument("direction must be +-1");
        if (strategy != 1 && strategy != -1) throw InvalidArgument("strategy must be +-1");
        if (!(speed > 0.0) || !std::isfinite(speed)) throw InvalidArgument("speed must be positive");
        if (!s1.value || !s1.gradient || !s1.hessian || !s2.value || !s2.gradient || !s2.hessian) {
            throw InvalidArgument("level surfaces need value, gradient and hessian");
        }
    }
};

/// Geometry of the two level surfaces at one point.
struct PathFrame {
    Vec2 s = Vec2::Zero();
    std::array<Vec3, 2> gradients{Vec3::Zero(), Vec3::Zero()};
    std::array<double, 2> gradient_norms{0.0, 0.0};
    std::array<Vec3, 2> normals{Vec3::Zero(), Vec3::Zero()};
    Vec3 cross = Vec3::Zero();  // grad s1 x grad s2
    double cross_norm = 0.0;
    Vec3 tangent = Vec3::Zero();
    Vec2 planar_tangent = Vec2::Zero();
};

inline PathFrame evaluate_frame(const PathSpec& path, const Vec3& position) {
    if (!position.allFinite()) throw NonFiniteState("path query position is not finite");
    PathFrame f;
    f.s << path.s1.value(position), path.s2.value(position);
    f.gradients = {path.s1.gradient(position), path.s2.gradient(position)};
    for (int j = 0; j < 2; ++j) {
        const double n = f.gradients[j].norm();
        if (!(n > path.bounds.gradient_lower) || !(n < path.bounds.gradient_upper)) {
            throw DegenerateGradient("|grad s" + std::to_string(j + 1) + "| = " + std::to_string(n) +
                                     " outside admissible band");
        }
        f.gradient_norms[j] = n;
        f.normals[j] = -f.gradients[j] / n;
    }
    f.cross = f.gradients[0].cross(f.gradients[1]);
    f.cross_norm = f.cross.norm();
    if (!(f.cross_norm > path.bounds.collinearity_floor)) {
        throw CollinearGradients("level-surface gradients are collinear");
    }
    f.tangent = path.direction * f.cross / f.cross_norm;
    f.planar_tangent = f.tangent.head<2>();
    return f;
}

struct DesiredOrientation {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};

inline DesiredOrientation desired_orientation(const PathSpec& path, const PathFrame& frame) {
    if (!(frame.planar_tangent.norm() > 0.0)) {
        throw PlanarTangentDegenerate("path tangent is vertical");
    }
    const double xi = path.strategy;
    DesiredOrientation d;
    d.yaw = atan2_half_open(xi * frame.tangent.y(), xi * frame.tangent.x());
    const double beta1 = frame.tangent.x() * std::cos(d.yaw) + frame.tangent.y() * std::sin(d.yaw);
    d.pitch = std::atan(-frame.tangent.z() / beta1);
    d.roll = 0.0;
    return d;
}

/// Time derivatives of the path quantities along a position trajectory.
struct FrameRates {
    Vec2 s_dot = Vec2::Zero();
    std::array<Vec3, 2> gradient_dots{Vec3::Zero(), Vec3::Zero()};
    std::array<double, 2> gradient_norm_dots{0.0, 0.0};
    std::array<Vec3, 2> normal_dots{Vec3::Zero(), Vec3::Zero()};
    Vec3 cross_dot = Vec3::Zero();
    Vec3 tangent_dot = Vec3::Zero();
};

/// The caller chooses which velocity to pass: the true one, or the
/// commanded velocity corrected by the estimated tracking error.
inline FrameRates frame_time_derivatives(const PathSpec& path, const PathFrame& frame,
                                         const Vec3& position, const Vec3& position_rate) {
    FrameRates r;
    const std::array<Mat3, 2> hessians{path.s1.hessian(position), path.s2.hessian(position)};
    for (int j = 0; j < 2; ++j) {
        const Vec3& g = frame.gradients[j];
        const double n = frame.gradient_norms[j];
        r.s_dot(j) = g.dot(position_rate);
        r.gradient_dots[j] = hessians[j] * position_rate;
        r.gradient_norm_dots[j] = g.dot(hessians[j] * position_rate) / n;
        r.normal_dots[j] = (-r.gradient_dots[j] * n + g * r.gradient_norm_dots[j]) / (n * n);
    }
    r.cross_dot = r.gradient_dots[0].cross(frame.gradients[1]) +
                  frame.gradients[0].cross(r.gradient_dots[1]);
    const Vec3& w = frame.cross;
    const double wn = frame.cross_norm;
    r.tangent_dot = path.direction * (r.cross_dot * w.dot(w) - w * w.dot(r.cross_dot)) / (wn * wn * wn);
    return r;
}

inline FrameRates frame_time_derivatives(const PathSpec& path, const Vec3& position,
                                         const Vec3& position_rate) {
    return frame_time_derivatives(path, evaluate_frame(path, position), position, position_rate);
}

// ---------------------------------------------------------------------------
// Validation over sample points
// ---------------------------------------------------------------------------

enum class PathViolationKind {
    DegenerateGradient,
    ExcessiveGradient,
    ExcessiveHessian,
    CollinearGradients,
    PlanarTangentDegenerate,
};

inline const char* to_string(PathViolationKind k) {
    switch (k) {
        case PathViolationKind::DegenerateGradient: return "degenerate_gradient";
        case PathViolationKind::ExcessiveGradient: return "excessive_gradient";
        case PathViolationKind::ExcessiveHessian: return "excessive_hessian";
        case PathViolationKind::CollinearGradients: return "collinear_gradients";
        case PathViolationKind::PlanarTangentDegenerate: return "planar_tangent_degenerate";
    }
    return "unknown";
}

struct PathViolation {
    std::size_t sample = 0;
    PathViolationKind kind{};
    int surface = 0;  // 1 or 2; 0 when the violation concerns both
    double value = 0.0;
};

struct PathValidationReport {
    std::array<double, 2> min_gradient_norm{std::numeric_limits<double>::infinity(),
                                            std::numeric_limits<double>::infinity()};
    std::array<double, 2> max_gradient_norm{0.0, 0.0};
    std::array<double, 2> max_hessian_norm{0.0, 0.0};
    double min_cross_norm = std::numeric_limits<double>::infinity();
    double min_planar_tangent_norm = std::numeric_limits<double>::infinity();
    std::vector<PathViolation> violations;

    bool ok() const { return violations.empty(); }
    bool has(PathViolationKind k) const {
        for (const auto& v : violations) {
            if (v.kind == k) return true;
        }
        return false;
    }
};

inline double spectral_norm_symmetric(const Mat3& m) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline PathValidationReport validate_path(const PathSpec& path, const std::vector<Vec3>& samples) {
    PathValidationReport rep;
    const PathBounds& b = path.bounds;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Vec3& p = samples[i];
        const std::array<Vec3, 2> g{path.s1.gradient(p), path.s2.gradient(p)};
        const std::array<Mat3, 2> h{path.s1.hessian(p), path.s2.hessian(p)};
        for (int j = 0; j < 2; ++j) {
            const double n = g[j].norm();
            const double hn = spectral_norm_symmetric(h[j]);
            rep.min_gradient_norm[j] = std::min(rep.min_gradient_norm[j], n);
            rep.max_gradient_norm[j] = std::max(rep.max_gradient_norm[j], n);
            rep.max_hessian_norm[j] = std::max(rep.max_hessian_norm[j], hn);
            if (!(n > b.gradient_lower)) {
                rep.violations.push_back({i, PathViolationKind::DegenerateGradient, j + 1, n});
            } else if (!(n < b.gradient_upper)) {
                rep.violations.push_back({i, PathViolationKind::ExcessiveGradient, j + 1, n});
            }
            if (!(hn < b.hessian_upper)) {
                rep.violations.push_back({i, PathViolationKind::ExcessiveHessian, j + 1, hn});
            }
        }
        const Vec3 w = g[0].cross(g[1]);
        const double wn = w.norm();
        rep.min_cross_norm = std::min(rep.min_cross_norm, wn);
        if (!(wn > b.collinearity_floor)) {
            rep.violations.push_back({i, PathViolationKind::CollinearGradients, 0, wn});
            continue;
        }
        const double planar = w.head<2>().norm() / wn;
        rep.min_planar_tangent_norm = std::min(rep.min_planar_tangent_norm, planar);
        if (!(planar > b.planar_tangent_floor)) {
            rep.violations.push_back({i, PathViolationKind::PlanarTangentDegenerate, 0, planar});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Surfaces from coefficient tables
// ---------------------------------------------------------------------------

/// coefficient * x^px * y^py * z^pz
struct MonomialTerm {
    double coefficient = 0.0;
    std::array<int, 3> powers{0, 0, 0};
};

/// coefficient * sin(frequency * p[axis] + phase), or cos
struct TrigTerm {
    enum class Kind { Sin, Cos };
    double coefficient = 0.0;
    Kind kind = Kind::Sin;
    int axis = 0;
    double frequency = 1.0;
    double phase = 0.0;
};

struct SurfaceTerms {
    double constant = 0.0;
    std::vector<MonomialTerm> monomials;
    std::vector<TrigTerm> trig;
};

namespace detail {

inline double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// d^k/dx^k of x^e
inline double dpow(double x, int e, int k) {
    if (k > e) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= (e - i);
    return c * ipow(x, e - k);
}

inline double monomial_partial(const MonomialTerm& m, const Vec3& p, const std::array<int, 3>& order) {
    double v = m.coefficient;
    for (int a = 0; a < 3; ++a) v *= dpow(p(a), m.powers[a], order[a]);
    return v;
}

// k-th derivative of sin/cos(f x + phi)
inline double trig_derivative(const TrigTerm& t, double x, int k) {
    const double arg = t.frequency * x + t.phase;
    const double base_phase = (t.kind == TrigTerm::Kind::Sin ? 0.0 : kPi / 2.0) + k * kPi / 2.0;
    return t.coefficient * ipow(t.frequency, k) * std::sin(arg + base_phase);
}

}  // namespace detail

inline LevelSurface make_surface(const SurfaceTerms& terms) {
    for (const auto& m : terms.monomials) {
        for (int e : m.powers) {
            if (e < 0) throw InvalidArgument("monomial powers must be non-negative");
        }
    }
    for (const auto& t : terms.trig) {
        if (t.axis < 0 || t.axis > 2) throw InvalidArgument("trig term axis must be 0, 1 or 2");
    }
    LevelSurface s;
    s.value = [terms](const Vec3& p) {
        double v = terms.constant;
        for (const auto& m : terms.monomials) v += detail::monomial_partial(m, p, {0, 0, 0});
        for (const auto& t : terms.trig) v += detail::trig_derivative(t, p(t.axis), 0);
        return v;
    };
    s.gradient = [terms](const Vec3& p) {
        Vec3 g = Vec3::Zero();
        for (const auto& m : terms.monomials) {
            for (int a = 0; a < 3; ++a) {
                std::array<int, 3> o{0, 0, 0};
                o[a] = 1;
                g(a) += detail::monomial_partial(m, p, o);
            }
        }
        for (const auto& t : terms.trig) g(t.axis) += detail::trig_derivative(t, p(t.axis), 1);
        return g;
    };
    s.hessian = [terms](const Vec3& p) {
        Mat3 h = Mat3::Zero();
        for (const auto& m : terms.monomials) {
            for (int a = 0; a < 3; ++a) {
                for (int b = a; b < 3; ++b) {
                    std::array<int, 3> o{0, 0, 0};
                    o[a] += 1;
                    o[b] += 1;
                    const double v = detail::monomial_partial(m, p, o);
                    h(a, b) += v;
                    if (a != b) h(b, a) += v;
                }
            }
        }
        for (const auto& t : terms.trig) h(t.axis, t.axis) += detail::trig_derivative(t, p(t.axis), 2);
        return h;
    };
    return s;
}

// ---------------------------------------------------------------------------
// Built-in paths
// ---------------------------------------------------------------------------

/// s1 = -x + a sin(k z), s2 = -y + a cos(k z).
inline PathSpec make_helix_path(double amplitude = 1.0, double wavenumber = 4.0, double speed = 0.1,
                                int direction = 1, int strategy = 1) {
    PathSpec p;
    p.name = "helix";
    p.direction = direction;
    p.strategy = strategy;
    p.speed = speed;
    const double a = amplitude, k = wavenumber;
    p.s1.value = [a, k](const Vec3& q) { return -q.x() + a * std::sin(k * q.z()); };
    p.s1.gradient = [a, k](const Vec3& q) { return Vec3(-1.0, 0.0, a * k * std::cos(k * q.z())); };
    p.s1.hessian = [a, k](const Vec3& q) {
        Mat3 h = Mat3::Zero();
        h(2, 2) = -a * k * k * std::sin(k * q.z());
        return h;
    };
    p.s2.value = [a, k](const Vec3& q) { return -q.y() + a * std::cos(k * q.z()); };
    p.s2.gradient = [a, k](const Vec3& q) { return Vec3(0.0, -1.0, -a * k * std::sin(k * q.z())); };
    p.s2.hessian = [a, k](const Vec3& q) {
        Mat3 h = Mat3::Zero();
        h(2, 2) = -a * k * k * std::cos(k * q.z());
        return h;
    };
    p.reference_point = [a, k](double z) { return Vec3(a * std::sin(k * z), a * std::cos(k * z), z); };
    p.check();
    return p;
}

/// s1 = (x/a)^2 + (y/b)^2 - 1, s2 = n . p - c.
inline PathSpec make_plane_ellipse_path(double semi_x = 1.0, double semi_y = 2.0,
                                        const Vec3& plane_normal = Vec3(1.0, 2.0, 3.0),
                                        double plane_offset = 1.0, double speed = 0.2,
                                        int direction = 1, int strategy = 1) {
    if (!(semi_x > 0.0) || !(semi_y > 0.0)) throw InvalidArgument("ellipse semi-axes must be positive");
    if (plane_normal.z() == 0.0) throw InvalidArgument("plane normal must have a z component");
    PathSpec p;
    p.name = "plane_ellipse";
    p.direction = direction;
    p.strategy = strategy;
    p.speed = speed;
    const double ia2 = 1.0 / (semi_x * semi_x), ib2 = 1.0 / (semi_y * semi_y);
    const Vec3 n = plane_normal;
    const double c = plane_offset;
    p.s1.value = [ia2, ib2](const Vec3& q) { return q.x() * q.x() * ia2 + q.y() * q.y() * ib2 - 1.0; };
    p.s1.gradient = [ia2, ib2](const Vec3& q) { return Vec3(2.0 * q.x() * ia2, 2.0 * q.y() * ib2, 0.0); };
    p.s1.hessian = [ia2, ib2](const Vec3&) {
        Mat3 h = Mat3::Zero();
        h(0, 0) = 2.0 * ia2;
        h(1, 1) = 2.0 * ib2;
        return h;
    };
    p.s2.value = [n, c](const Vec3& q) { return n.dot(q) - c; };
    p.s2.gradient = [n](const Vec3&) { return n; };
    p.s2.hessian = [](const Vec3&) { return Mat3::Zero().eval(); };
    const double a = semi_x, b = semi_y;
    p.reference_point = [a, b, n, c](double t) {
        const double x = a * std::cos(t), y = b * std::sin(t);
        return Vec3(x, y, (c - n.x() * x - n.y() * y) / n.z());
    };
    p.check();
    return p;
}

/// Path from two coefficient tables; no on-path generator is available.
inline PathSpec make_tabulated_path(const SurfaceTerms& s1, const SurfaceTerms& s2, double speed,
                                    int direction = 1, int strategy = 1) {
    PathSpec p;
    p.name = "tabulated";
    p.s1 = make_surface(s1);
    p.s2 = make_surface(s2);
    p.speed = speed;
    p.direction = direction;
    p.strategy = strategy;
    p.check();
    return p;
}

}  // namespace vfo_adr
