#pragma once

// Closed-loop scenario execution, path-following errors, ground-truth
// diagnostics and windowed metrics.

#include "vfo_adr/adr_controller.hpp"
#include "vfo_adr/controller.hpp"
#include "vfo_adr/path_geometry.hpp"
#include "vfo_adr/rigid_body.hpp"
#include "vfo_adr/rk4.hpp"
#include "vfo_adr/vfo_controller.hpp"

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vfo_adr {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Vec36 = Eigen::Matrix<double, 36, 1>;

// ---------------------------------------------------------------------------
// Scenario description (plain data, serializable)
// ---------------------------------------------------------------------------

/// amplitude * sin(frequency * t + phase) on one global-frame DoF.
struct SinusoidTerm {
    int dof = 0;
    double amplitude = 0.0;
    double frequency = 1.0;
    double phase = 0.0;
};

struct HelixPath {
    double amplitude = 1.0;
    double wavenumber = 4.0;
};

struct PlaneEllipsePath {
    double semi_x = 1.0;
    double semi_y = 2.0;
    Vec3 plane_normal = Vec3(1.0, 2.0, 3.0);
    double plane_offset = 1.0;
};

struct TabulatedPath {
    SurfaceTerms s1;
    SurfaceTerms s2;
};

struct PathConfig {
    std::variant<HelixPath, PlaneEllipsePath, TabulatedPath> shape = HelixPath{};
    int direction = 1;
    int strategy = 1;
    double speed = 0.1;
    PathBounds bounds;
};

struct PlantConfig {
    Mat6 inertia = Mat6::Identity();
    Vec6 linear_damping = Vec6::Ones();
    Vec6 actuation = Vec6::Ones();
    bool coriolis = true;
    std::vector<SinusoidTerm> disturbance;
};

struct ScenarioConfig {
    std::string name = "scenario";
    PlantConfig plant;
    PathConfig path;
    VfoGains vfo;
    AdrGains adr;
    Vec6 observer_bandwidths = Vec6::Constant(200.0);
    double inhibit_until = 1.0;
    Inhibition inhibition = Inhibition::ForceAndCommand;
    double freeze_epsilon = 1e-6;
    bool limits_enabled = false;
    VelocityLimits limits;
    double limits_until = std::numeric_limits<double>::infinity();
    Vec6 initial_eta = Vec6::Zero();
    Vec6 initial_nu = Vec6::Zero();
    double horizon = 100.0;
    double step = 1e-3;
    double metric_t1 = 50.0;
    double metric_t2 = 100.0;
    double singularity_margin = kDefaultSingularityMargin;

    void check() const {
        if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("step must be positive");
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive");
        if (!(metric_t1 < metric_t2) || !(metric_t2 <= horizon) || metric_t1 < 0.0) {
            throw InvalidArgument("metric window must satisfy 0 <= t1 < t2 <= horizon");
        }
        if (!(inhibit_until >= 0.0)) throw InvalidArgument("inhibition window must be non-negative");
        if (!initial_eta.allFinite() || !initial_nu.allFinite()) {
            throw InvalidArgument("initial state must be finite");
        }
        if (!(std::abs(initial_eta(4)) < kPi / 2.0)) throw InvalidArgument("initial pitch must lie in (-pi/2, pi/2)");
        if (!(initial_eta(3) >= -kPi && initial_eta(3) < kPi)) {
            throw InvalidArgument("initial roll must lie in [-pi, pi)");
        }
        if (!(observer_bandwidths.array() > 0.0).all()) throw InvalidArgument("observer bandwidths must be positive");
        for (const auto& d : plant.disturbance) {
            if (d.dof < 0 || d.dof > 5) throw InvalidArgument("disturbance dof must lie in 0..5");
        }
        vfo.check();
        adr.check();
        if (limits_enabled) limits.check();
    }
};

inline PathSpec build_path(const PathConfig& c) {
    PathSpec p;
    if (const auto* h = std::get_if<HelixPath>(&c.shape)) {
        p = make_helix_path(h->amplitude, h->wavenumber, c.speed, c.direction, c.strategy);
    } else if (const auto* e = std::get_if<PlaneEllipsePath>(&c.shape)) {
        p = make_plane_ellipse_path(e->semi_x, e->semi_y, e->plane_normal, e->plane_offset, c.speed, c.direction,
                                    c.strategy);
    } else {
        const auto& t = std::get<TabulatedPath>(c.shape);
        p = make_tabulated_path(t.s1, t.s2, c.speed, c.direction, c.strategy);
    }
    p.bounds = c.bounds;
    return p;
}

inline DisturbanceFn build_disturbance(const std::vector<SinusoidTerm>& terms) {
    if (terms.empty()) return {};
    return [terms](double t) {
        Vec6 d = Vec6::Zero();
        for (const auto& s : terms) d(s.dof) += s.amplitude * std::sin(s.frequency * t + s.phase);
        return d;
    };
}

inline VehiclePlant build_plant(const PlantConfig& c) {
    PlantParameters p;
    p.inertia = c.inertia;
    p.linear_damping = c.linear_damping;
    p.actuation = c.actuation;
    p.coriolis = c.coriolis;
    p.external_disturbance = build_disturbance(c.disturbance);
    return VehiclePlant(std::move(p));
}

inline ControllerSettings build_controller_settings(const ScenarioConfig& c) {
    ControllerSettings s;
    s.vfo = c.vfo;
    s.adr = c.adr;
    s.observer_bandwidths = c.observer_bandwidths;
    s.actuation = c.plant.actuation;
    s.inhibit_until = c.inhibit_until;
    s.inhibition = c.inhibition;
    s.freeze_epsilon = c.freeze_epsilon;
    if (c.limits_enabled) s.limits = c.limits;
    s.limits_until = c.limits_until;
    s.singularity_margin = c.singularity_margin;
    return s;
}

// ---------------------------------------------------------------------------
// Errors and diagnostics
// ---------------------------------------------------------------------------

struct PathFollowingError {
    Vec5 e = Vec5::Zero();       // (s1, s2, e_phi, e_theta, e_psi), yaw on R
    Vec5 e_2pi = Vec5::Zero();   // angular components wrapped to (-pi, pi]

    double position_norm() const { return e.head<2>().norm(); }
    double orientation_norm() const { return e_2pi.tail<3>().norm(); }
};

inline PathFollowingError path_following_error(const Vec6& eta, const PathSpec& path, const PathFrame& frame) {
    const DesiredOrientation d = desired_orientation(path, frame);
    PathFollowingError out;
    out.e << frame.s(0), frame.s(1), d.roll - eta(3), d.pitch - eta(4), d.yaw - eta(5);
    out.e_2pi = out.e;
    for (int i = 2; i < 5; ++i) out.e_2pi(i) = wrap_to_pi(out.e(i));
    return out;
}

struct HeadingDiscrepancy {
    double yaw = 0.0;         // psi_d - psi_a*, wrapped to [-pi, pi)
    double pitch = 0.0;       // closed-form theta_d - theta_a
    double yaw_bound = 0.0;   // bound function on |yaw|
};

/// Differences between the path-aligned and the auxiliary orientation plus
/// the bound on the yaw part. With `true_eps_p` (simulator knowledge) the
/// bound uses |eps_p| + |eps_p - eps_hat_p|; otherwise |eps_hat_p|.
inline HeadingDiscrepancy yaw_pitch_discrepancies(const PathFrame& frame, const Vec3& field_p, double yaw_a,
                                                  const PathSpec& path, const VfoGains& gains, const Vec3& eps_hat_p,
                                                  const std::optional<Vec3>& true_eps_p = std::nullopt) {
    const DesiredOrientation d = desired_orientation(path, frame);
    const double xi = path.strategy;
    HeadingDiscrepancy out;

    const double yaw_a_star = atan2_half_open(std::sin(yaw_a), std::cos(yaw_a));
    out.yaw = wrap_to_pi_half_open(d.yaw - yaw_a_star);

    const double tn = frame.planar_tangent.norm();
    const double hn = std::sqrt(horizontal_field_sq(field_p));
    const double tz = frame.tangent.z(), hz = field_p.z();
    out.pitch = std::atan(xi * (hz * tn - tz * hn) / (tn * hn + hz * tz));

    const Vec2& t = frame.planar_tangent;
    const double e_p = frame.s.norm();
    const double eps_term = true_eps_p ? true_eps_p->norm() + (*true_eps_p - eps_hat_p).norm() : eps_hat_p.norm();
    const double num = 2.0 * gains.k_p * e_p + gains.delta_p * eps_term;
    const double den = path.desired_speed() * t.squaredNorm() +
                       gains.k_p * frame.s(0) * frame.normals[0].head<2>().dot(t) +
                       gains.k_p * frame.s(1) * frame.normals[1].head<2>().dot(t) +
                       gains.delta_p * eps_hat_p.head<2>().dot(t);
    out.yaw_bound = std::atan2(num, std::abs(den));
    return out;
}

/// Total disturbance d = eps_dot + J B_hat Gamma J^T tau_eta from exact plant
/// quantities. `eta_c_ddot` is the commanded-configuration acceleration.
inline Vec6 ground_truth_disturbance(const VehiclePlant& plant, const Vec6& eta, const Vec6& nu, const Vec6& tau,
                                     double t, const Vec6& eta_c_ddot, const Vec6& b_hat,
                                     double margin = kDefaultSingularityMargin) {
    const Vec3 attitude = eta.tail<3>();
    const Mat6 j = jacobian(attitude, margin);
    const StateRates rates = plant_derivative(plant, eta, nu, tau, t, margin);
    const Vec6 eta_ddot = jacobian_derivative(attitude, nu.tail<3>(), margin) * nu + j * rates.nu_dot;
    const Vec6 eps_dot = eta_c_ddot - eta_ddot;
    return eps_dot + j * b_hat.cwiseProduct(plant.actuation().cwiseProduct(tau));
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

struct TraceSample {
    double t = 0.0;
    Vec6 eta, nu, eta_c, nu_c, tau, applied_tau;
    Vec18 xhat;
    Vec6 eps, eps_hat, d, d_hat;
    Vec5 e, e_2pi;
    Vec2 e_a;
    double eps_yaw = 0.0, eps_pitch = 0.0, eps_yaw_bound = 0.0;
    bool frozen = false;
};

enum class RunStatus { Completed, SingularAttitude, NonFiniteState, PathFault };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::SingularAttitude: return "singular_attitude";
        case RunStatus::NonFiniteState: return "non_finite_state";
        case RunStatus::PathFault: return "path_fault";
    }
    return "unknown";
}

struct SimulationTrace {
    std::vector<TraceSample> samples;
    RunStatus status = RunStatus::Completed;
    std::string fault;
    double max_abs_pitch = 0.0;

    bool completed() const { return status == RunStatus::Completed; }
};

// ---------------------------------------------------------------------------
// Closed loop
// ---------------------------------------------------------------------------

struct ClosedLoop {
    VehiclePlant plant;
    VfoAdrController controller;
    double margin = kDefaultSingularityMargin;

    static Vec36 pack(const Vec6& eta, const Vec6& nu, const Vec6& eta_c, const Vec18& xhat) {
        Vec36 x;
        x << eta, nu, eta_c, xhat;
        return x;
    }

    static ControllerInput controller_input(double t, const Vec36& x) {
        ControllerInput in;
        in.t = t;
        in.eta = x.segment<6>(0);
        in.eta_c = x.segment<6>(12);
        in.xhat = x.segment<18>(18);
        return in;
    }

    Vec36 derivative(double t, const Vec36& x, const ControllerOutput& u) const {
        if (!x.allFinite()) throw NonFiniteState("closed-loop state became non-finite at t = " + std::to_string(t));
        const StateRates r = plant_derivative(plant, x.segment<6>(0), x.segment<6>(6), u.tau, t, margin);
        Vec36 dx;
        dx << r.eta_dot, r.nu_dot, u.eta_c_dot, u.xhat_dot;
        return dx;
    }
};

namespace detail {

inline RunStatus classify(const std::exception& e) {
    if (dynamic_cast<const SingularAttitude*>(&e)) return RunStatus::SingularAttitude;
    if (dynamic_cast<const NonFiniteState*>(&e)) return RunStatus::NonFiniteState;
    return RunStatus::PathFault;
}

}  // namespace detail

/// Fixed-step RK4 over the coupled plant/controller/observer state. One sample
/// per step. Faults end the run and leave the partial trace in place.
inline SimulationTrace run_scenario(const ScenarioConfig& config) {
    config.check();
    ClosedLoop loop{build_plant(config.plant), VfoAdrController(build_path(config.path), build_controller_settings(config)),
                    config.singularity_margin};
    const PathSpec& path = loop.controller.path();
    const Vec6 b_hat = config.adr.b_hat;

    SimulationTrace trace;
    const auto steps = static_cast<std::size_t>(std::llround(config.horizon / config.step));
    trace.samples.reserve(steps + 1);

    Vec36 x = ClosedLoop::pack(config.initial_eta, config.initial_nu, config.initial_eta,
                               initial_observer_state(config.initial_eta));
    ControllerMemory memory = loop.controller.initial_memory(0.0);
    Vec6 previous_eta_c_dot = Vec6::Zero();

    auto record = [&](double t, const Vec36& state, const ControllerOutput& u, const Vec6& eta_c_ddot) {
        TraceSample s;
        s.t = t;
        s.eta = state.segment<6>(0);
        s.nu = state.segment<6>(6);
        s.eta_c = state.segment<6>(12);
        s.xhat = state.segment<18>(18);
        s.nu_c = u.nu_c;
        s.tau = u.tau;
        s.applied_tau = loop.plant.actuation().cwiseProduct(u.tau);
        const Vec3 attitude = s.eta.tail<3>();
        const Mat6 j = jacobian(attitude, config.singularity_margin);
        s.eps = j * (s.nu_c - s.nu);
        s.eps_hat = u.estimates.eps_hat;
        s.d_hat = u.estimates.d_hat;
        s.d = ground_truth_disturbance(loop.plant, s.eta, s.nu, s.tau, t, eta_c_ddot, b_hat, config.singularity_margin);
        const PathFollowingError err = path_following_error(s.eta, path, u.frame);
        s.e = err.e;
        s.e_2pi = err.e_2pi;
        s.e_a = u.auxiliary_error;
        const Vec3 true_eps_p = s.eps.head<3>();
        const HeadingDiscrepancy h = yaw_pitch_discrepancies(u.frame, u.field_p, u.auxiliary.yaw, path, config.vfo,
                                                             s.eps_hat.head<3>(), true_eps_p);
        s.eps_yaw = h.yaw;
        s.eps_pitch = h.pitch;
        s.eps_yaw_bound = h.yaw_bound;
        s.frozen = u.auxiliary.frozen;
        trace.max_abs_pitch = std::max(trace.max_abs_pitch, std::abs(s.eta(4)));
        trace.samples.push_back(std::move(s));
    };

    try {
        double t = 0.0;
        ControllerOutput u = loop.controller.evaluate(ClosedLoop::controller_input(t, x), memory);
        Vec36 k1 = loop.derivative(t, x, u);
        record(t, x, u, Vec6::Zero());
        previous_eta_c_dot = u.eta_c_dot;

        for (std::size_t k = 0; k < steps; ++k) {
            auto f = [&](double ts, const Vec36& xs) {
                ControllerMemory trial = memory;
                const ControllerOutput us = loop.controller.evaluate(ClosedLoop::controller_input(ts, xs), trial);
                return loop.derivative(ts, xs, us);
            };
            x = rk4_step(f, t, x, config.step, k1);
            t = static_cast<double>(k + 1) * config.step;

            u = loop.controller.evaluate(ClosedLoop::controller_input(t, x), memory);
            k1 = loop.derivative(t, x, u);
            const Vec6 eta_c_ddot = (u.eta_c_dot - previous_eta_c_dot) / config.step;
            previous_eta_c_dot = u.eta_c_dot;
            record(t, x, u, eta_c_ddot);
        }
    } catch (const Error& e) {
        trace.status = detail::classify(e);
        trace.fault = e.what();
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct Metrics {
    double t1 = 0.0, t2 = 0.0;
    double sup_e_p = 0.0;
    double sup_e_2pi = 0.0;
    double avg_e_p = 0.0;
    double avg_e_o = 0.0;
    double avg_abs_e_phi = 0.0;
    double avg_abs_e_theta_a = 0.0;
    double avg_abs_e_psi_a = 0.0;
    double avg_nu_c = 0.0;
    double avg_applied_tau = 0.0;
    double avg_d = 0.0;
    double avg_d_error = 0.0;  // |d - d_hat|
    double sup_eps = 0.0;
    double avg_eps = 0.0;
    // whole-run maxima
    double max_commanded_velocity = 0.0;  // max |u_c|, |p_c|, |q_c|, |r_c|
    double max_applied_force = 0.0;       // max |tau_u|, |tau_p|, |tau_q|, |tau_r|
    double max_d_hat = 0.0;               // max |d_hat|
    double max_yaw_bound_excess = 0.0;    // max(|eps_yaw| - bound), <= 0 when the bound holds
};

/// Windowed sup/average statistics; averages use the trapezoidal rule.
inline Metrics compute_metrics(const SimulationTrace& trace, double t1, double t2) {
    const auto& s = trace.samples;
    Metrics m;
    m.t1 = t1;
    m.t2 = t2;
    m.max_yaw_bound_excess = -std::numeric_limits<double>::infinity();
    for (const auto& x : s) {
        for (int i : {0, 3, 4, 5}) {
            m.max_commanded_velocity = std::max(m.max_commanded_velocity, std::abs(x.nu_c(i)));
            m.max_applied_force = std::max(m.max_applied_force, std::abs(x.applied_tau(i)));
        }
        m.max_d_hat = std::max(m.max_d_hat, x.d_hat.norm());
        m.max_yaw_bound_excess = std::max(m.max_yaw_bound_excess, std::abs(x.eps_yaw) - x.eps_yaw_bound);
    }

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].t >= t1 - 1e-9 && s[i].t <= t2 + 1e-9) idx.push_back(i);
    }
    if (idx.size() < 2 || !(t2 > t1)) throw EmptyWindow("metric window contains fewer than two samples");

    const double span = s[idx.back()].t - s[idx.front()].t;
    auto average = [&](auto&& signal) {
        double acc = 0.0;
        for (std::size_t k = 1; k < idx.size(); ++k) {
            const auto& a = s[idx[k - 1]];
            const auto& b = s[idx[k]];
            acc += 0.5 * (signal(a) + signal(b)) * (b.t - a.t);
        }
        return acc / span;
    };
    auto supremum = [&](auto&& signal) {
        double v = -std::numeric_limits<double>::infinity();
        for (std::size_t i : idx) v = std::max(v, signal(s[i]));
        return v;
    };

    auto e_p = [](const TraceSample& x) { return x.e.head<2>().norm(); };
    auto e_2pi = [](const TraceSample& x) { return x.e_2pi.norm(); };
    auto eps = [](const TraceSample& x) { return x.eps.norm(); };
    m.sup_e_p = supremum(e_p);
    m.sup_e_2pi = supremum(e_2pi);
    m.sup_eps = supremum(eps);
    m.avg_e_p = average(e_p);
    m.avg_e_o = average([](const TraceSample& x) { return x.e_2pi.tail<3>().norm(); });
    m.avg_abs_e_phi = average([](const TraceSample& x) { return std::abs(x.e_2pi(2)); });
    m.avg_abs_e_theta_a = average([](const TraceSample& x) { return std::abs(x.e_a(0)); });
    m.avg_abs_e_psi_a = average([](const TraceSample& x) { return std::abs(x.e_a(1)); });
    m.avg_nu_c = average([](const TraceSample& x) { return x.nu_c.norm(); });
    m.avg_applied_tau = average([](const TraceSample& x) { return x.applied_tau.norm(); });
    m.avg_d = average([](const TraceSample& x) { return x.d.norm(); });
    m.avg_d_error = average([](const TraceSample& x) { return (x.d - x.d_hat).norm(); });
    m.avg_eps = average(eps);
    return m;
}

inline Metrics compute_metrics(const SimulationTrace& trace, const ScenarioConfig& config) {
    return compute_metrics(trace, config.metric_t1, config.metric_t2);
}

}  // namespace vfo_adr
