// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (capped at 125).

#include "vfo_adr/config.hpp"
#include "vfo_adr/properties.hpp"
#include "vfo_adr/report.hpp"
#include "vfo_adr/rk4.hpp"
#include "vfo_adr/scenarios.hpp"
#include "vfo_adr/sweep.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace vfo_adr;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool passed, const std::string& detail) {
    std::cout << (passed ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << detail << std::endl;
    if (!passed) ++failures;
}

std::string fmt(const char* pattern, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

std::string status_text(const SimulationTrace& t) {
    return t.completed() ? "completed" : std::string(to_string(t.status)) + " at t = " +
                                             format_double(t.samples.empty() ? 0.0 : t.samples.back().t);
}

struct ScenarioResult {
    bool completed = false;
    std::string status;
    Metrics m;
};

ScenarioResult run_and_measure(const ScenarioConfig& c) {
    const SimulationTrace t = run_scenario(c);
    ScenarioResult r;
    r.completed = t.completed();
    r.status = status_text(t);
    if (r.completed) r.m = compute_metrics(t, c);
    else if (t.samples.size() > 1) r.m = compute_metrics(t, 0.0, t.samples.back().t);
    return r;
}

void reproduction(int id, const std::string& title, const ScenarioResult& r, double cap_p, double cap_2pi) {
    const bool ok = r.completed && r.m.sup_e_p <= cap_p && r.m.sup_e_2pi <= cap_2pi;
    report(id, title, ok,
           r.status + fmt(", sup|e_p| = %.4g (<= %.4g), sup|e_2pi| = %.4g (<= %.4g)", r.m.sup_e_p, cap_p,
                          r.m.sup_e_2pi, cap_2pi));
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return !v.empty();
}

std::string list(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt("%.4g", x);
    return "[" + s + "]";
}

// Fully actuated vehicle with an exact diagonal inverse-inertia model, a
// prescribed commanded velocity and sinusoidal external forcing. Returns the
// supremum of |eps| over the second half of the horizon.
double synthetic_ultimate_eps(double bandwidth) {
    PlantConfig pc;
    pc.inertia = Mat6::Zero();
    pc.inertia.diagonal() << 4.137, 4.137, 4.137, 0.535, 1.653, 1.577;
    pc.linear_damping << 2.0, 10.0, 10.0, 10.0, 10.0, 10.0;
    pc.actuation = Vec6::Ones();
    pc.coriolis = false;
    pc.disturbance = {{0, 2.0, 1.0, 0.0}, {1, 4.0, 0.8, 0.0}, {2, 1.4, 0.6, 0.0},
                      {3, 0.3, 1.1, 0.0}, {4, 0.2, 0.9, 0.5}, {5, 0.25, 0.7, 1.0}};
    const VehiclePlant plant = build_plant(pc);
    const EsoBank bank(bandwidth);
    AdrGains gains;
    gains.k = Vec6::Constant(2.0);
    gains.b_hat = pc.inertia.diagonal().cwiseInverse();

    auto nu_c = [](double t) {
        Vec6 v;
        v << 0.2 + 0.05 * std::sin(0.5 * t), 0.05 * std::cos(0.3 * t), 0.02 * std::sin(0.2 * t),
            0.05 * std::sin(0.4 * t), 0.03 * std::cos(0.7 * t), 0.1;
        return v;
    };
    using State = Eigen::Matrix<double, 36, 1>;
    auto f = [&](double t, const State& x) {
        const Vec6 eta = x.segment<6>(0), nu = x.segment<6>(6), eta_c = x.segment<6>(12);
        const Vec18 xhat = x.segment<18>(18);
        const Vec3 att = eta.tail<3>();
        const EsoOutputs est = eso_outputs(xhat);
        const ControlForce u = control_force(est.eps_hat, est.d_hat, att, gains);
        const StateRates r = plant_derivative(plant, eta, nu, u.tau, t);
        State dx;
        dx << r.eta_dot, r.nu_dot, commanded_configuration_rate(nu_c(t), att),
            bank.derivative(xhat, eta_c, eta, u.tau_eta, att, gains.b_hat, plant.actuation());
        return dx;
    };
    State x = State::Zero();
    const double dt = 1e-3, horizon = 20.0;
    double sup = 0.0;
    const auto steps = static_cast<long>(std::llround(horizon / dt));
    for (long k = 0; k < steps; ++k) {
        x = rk4_step(f, k * dt, x, dt);
        const double t = (k + 1) * dt;
        if (t >= horizon / 2) {
            const Vec6 eta = x.segment<6>(0), nu = x.segment<6>(6);
            const Vec6 eps = jacobian(eta.tail<3>()) * (nu_c(t) - nu);
            sup = std::max(sup, eps.norm());
        }
    }
    return sup;
}

std::string trace_csv(const ScenarioConfig& c) {
    std::ostringstream out;
    write_trace_csv(out, run_scenario(c));
    return out.str();
}

}  // namespace

int main() {
    const ScenarioConfig a = scenario_a();
    const ScenarioConfig b = scenario_b();

    const ScenarioResult ra = run_and_measure(a);
    reproduction(1, "scenario A reproduction", ra, 0.03, 0.80);
    const ScenarioResult rb = run_and_measure(b);
    reproduction(2, "scenario B reproduction", rb, 0.07, 1.2);

    {
        const auto out = run_sweep(make_sweep(a, SweepKind::Delta, {}));
        std::vector<double> ep, tau;
        bool done = true;
        for (const auto& o : out) {
            done = done && o.summary.has_metrics;
            ep.push_back(o.summary.has_metrics ? o.summary.metrics.avg_e_p : NAN);
            tau.push_back(o.summary.has_metrics ? o.summary.metrics.avg_applied_tau : NAN);
        }
        const double ratio = ep.front() / ep.back();
        const bool ok = done && strictly_decreasing(ep) && ratio >= 3.0 && ratio <= 6.5 && strictly_decreasing(tau);
        report(3, "compensation sweep", ok,
               "avg|e_p| " + list(ep) + fmt(", ratio %.3g in [3, 6.5]", ratio) + ", avg|Gamma tau| " + list(tau) +
                   (strictly_decreasing(tau) ? "" : " (not strictly decreasing)"));
    }

    {
        const auto out = run_sweep(make_sweep(a, SweepKind::Kp, {1.0, 2.0, 4.0}));
        std::vector<double> ep;
        std::string status;
        bool done = true;
        for (const auto& o : out) {
            done = done && o.summary.has_metrics;
            ep.push_back(o.summary.has_metrics ? o.summary.metrics.avg_e_p : NAN);
            if (!o.summary.has_metrics) {
                status += ", " + o.point.label + " " + to_string(o.summary.status) + " at t = " +
                          format_double(o.summary.end_time);
            }
        }
        report(4, "k_p trend", done && strictly_decreasing(ep), "steady avg|e_p| for k_p = 1, 2, 4: " + list(ep) + status);
    }

    {
        const Metrics& m = ra.m;
        const bool ok = ra.completed && m.max_commanded_velocity < 2 * 43.41 && m.max_applied_force < 2 * 3281.0 &&
                        m.max_d_hat < 2 * 1.5e5;
        report(5, "scenario A transient magnitudes", ok,
               fmt("max|nu_c| = %.4g (< %.4g), max|Gamma tau| = %.4g (< %.4g)", m.max_commanded_velocity, 2 * 43.41,
                   m.max_applied_force, 2 * 3281.0) +
                   fmt(", max|d_hat| = %.4g (< %.4g)", m.max_d_hat, 2 * 1.5e5));
    }

    const PropertyResult rot = check_rotation_jacobian();
    report(6, "rotation and jacobian invariants", rot.passed, rot.detail);
    const PropertyResult geo = check_path_geometry();
    report(7, "path geometry", geo.passed, geo.detail);
    const PropertyResult poles = check_observer_poles();
    report(8, "observer pole placement", poles.passed, poles.detail);

    {
        std::vector<double> sup;
        for (double w : {50.0, 100.0, 200.0}) sup.push_back(synthetic_ultimate_eps(w));
        report(9, "observer bandwidth trend", strictly_decreasing(sup),
               "ultimate sup|eps| for w = 50, 100, 200: " + list(sup));
    }

    {
        const bool ok = ra.completed && rb.completed && ra.m.max_yaw_bound_excess <= 0.0 &&
                        rb.m.max_yaw_bound_excess <= 0.0;
        report(10, "yaw discrepancy bound", ok,
               fmt("max(|eps_psi| - f) = %.4g (A), %.4g (B)", ra.m.max_yaw_bound_excess, rb.m.max_yaw_bound_excess) +
                   (rb.completed ? "" : ", B " + rb.status));
    }

    const PropertyResult orth = check_field_orthogonality();
    report(11, "convergence field orthogonality", orth.passed, orth.detail);

    {
        const auto out = run_sweep(make_sweep(a, SweepKind::InitialCondition, {}));
        int converged = 0, faults = 0;
        double worst_ratio = 0.0, max_pitch = 0.0;
        for (const auto& o : out) {
            const bool done = o.summary.status == RunStatus::Completed;
            faults += done ? 0 : 1;
            const double ratio = o.final_e_p / o.initial_e_p;
            if (done && ratio < 0.1) ++converged;
            worst_ratio = std::max(worst_ratio, done ? ratio : INFINITY);
            max_pitch = std::max(max_pitch, o.summary.max_abs_pitch);
        }
        const bool ok = converged == static_cast<int>(out.size());
        report(12, "initial-condition funnel", ok,
               fmt("%g/%g runs reach |e_p(30)| < 0.1 |e_p(0)|, %g faulted, worst ratio %.3g", converged,
                   static_cast<double>(out.size()), faults, worst_ratio) +
                   fmt(", max|theta| = %.4g", max_pitch));
    }

    {
        ScenarioConfig c = a;
        c.horizon = 10.0;
        c.metric_t1 = 0.0;
        c.metric_t2 = 10.0;
        const ScenarioConfig reparsed = parse_config_text(pretty_json(c));
        const bool same_hash = config_hash(c) == config_hash(reparsed);
        const std::string first = trace_csv(c), second = trace_csv(reparsed);
        report(13, "determinism", same_hash && first == second,
               std::string(same_hash ? "equal hashes" : "hash mismatch") + ", " + std::to_string(first.size()) +
                   " CSV bytes " + (first == second ? "identical" : "differ"));
    }

    return std::min(failures, 125);
}
