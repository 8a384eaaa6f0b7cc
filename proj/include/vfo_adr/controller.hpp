#pragma once

// Cascade of the kinematic VFO loop and the dynamic ADR loop. The controller
// sees the configuration, its own integrated commanded configuration and the
// observer state only; plant velocities never enter its interface.

#include "vfo_adr/adr_controller.hpp"
#include "vfo_adr/path_geometry.hpp"
#include "vfo_adr/rigid_body.hpp"
#include "vfo_adr/vfo_controller.hpp"

#include <limits>
#include <optional>
#include <utility>

namespace vfo_adr {

/// What is switched off before `inhibit_until`. The observers always run.
enum class Inhibition {
    Force,               // tau only; the kinematic loop keeps driving eta_c
    ForceAndCommand,     // tau and nu_c; eta_c is held at its initial value
};

struct ControllerSettings {
    VfoGains vfo;
    AdrGains adr;
    Vec6 observer_bandwidths = Vec6::Constant(200.0);
    Vec6 actuation = Vec6::Ones();       // the controller's knowledge of which axes are actuated
    double inhibit_until = 1.0;          // [s]
    Inhibition inhibition = Inhibition::ForceAndCommand;
    double freeze_epsilon = 1e-6;
    std::optional<VelocityLimits> limits;  // disabled when empty
    double limits_until = std::numeric_limits<double>::infinity();  // scaling applies for t < limits_until
    RollFeedback roll_feedback;          // empty means -k_phi * phi
    double singularity_margin = kDefaultSingularityMargin;
};

/// Measured and internal signals available to the controller at time t.
struct ControllerInput {
    double t = 0.0;
    Vec6 eta = Vec6::Zero();
    Vec6 eta_c = Vec6::Zero();
    Vec18 xhat = Vec18::Zero();
};

/// Discrete memory carried between integration steps.
struct ControllerMemory {
    AuxiliaryState aux;
    Vec6 previous_command = Vec6::Zero();  // last rate-limited (u, 0, 0, 0, q, r)
    double previous_time = 0.0;
};

struct ControllerOutput {
    Vec6 tau = Vec6::Zero();
    Vec6 tau_eta = Vec6::Zero();
    Vec6 nu_c = Vec6::Zero();
    Vec6 eta_c_dot = Vec6::Zero();
    Vec18 xhat_dot = Vec18::Zero();

    EsoOutputs estimates;
    Vec6 eps_hat_dot = Vec6::Zero();
    PathFrame frame;
    Vec3 field_p = Vec3::Zero();
    Vec3 field_p_rate = Vec3::Zero();
    Vec2 field_o = Vec2::Zero();
    AuxiliaryOrientation auxiliary;
    AuxiliaryRates auxiliary_rates;
    Vec2 auxiliary_error = Vec2::Zero();  // (theta_a - theta wrapped, psi_a - psi)
    Vec6 nu_c_unscaled = Vec6::Zero();
};

class VfoAdrController {
public:
    VfoAdrController(PathSpec path, ControllerSettings settings)
        : path_(std::move(path)), s_(std::move(settings)), bank_(s_.observer_bandwidths) {
        path_.check();
        s_.vfo.check();
        s_.adr.check();
        if (s_.limits) s_.limits->check();
        if (!(s_.freeze_epsilon > 0.0)) throw InvalidArgument("freeze epsilon must be positive");
    }

    const PathSpec& path() const { return path_; }
    const ControllerSettings& settings() const { return s_; }
    const EsoBank& observers() const { return bank_; }

    ControllerMemory initial_memory(double t0 = 0.0) const {
        ControllerMemory m;
        m.aux.freeze_epsilon = s_.freeze_epsilon;
        m.previous_time = t0;
        return m;
    }

    /// Evaluates the full cascade. `memory` is advanced in place; pass a copy
    /// for trial evaluations inside an integration step.
    ControllerOutput evaluate(const ControllerInput& in, ControllerMemory& memory) const {
        const double margin = s_.singularity_margin;
        const Vec3 attitude = in.eta.tail<3>();
        const Vec3 position = in.eta.head<3>();
        const Mat6 j = jacobian(attitude, margin);

        ControllerOutput out;

        // Inner loop: disturbance-cancelling force from the current estimates.
        out.estimates = eso_outputs(in.xhat);
        if (in.t >= s_.inhibit_until) {
            const ControlForce f = control_force(out.estimates.eps_hat, out.estimates.d_hat, attitude, s_.adr, margin);
            out.tau = f.tau;
            out.tau_eta = f.tau_eta;
        }
        out.xhat_dot = bank_.derivative(in.xhat, in.eta_c, in.eta, out.tau_eta, attitude, s_.adr.b_hat,
                                        s_.actuation, margin);
        out.eps_hat_dot = eps_hat_rate(out.xhat_dot);

        // Outer loop.
        const Vec3 eps_hat_p = out.estimates.eps_hat.head<3>();
        out.frame = evaluate_frame(path_, position);
        out.field_p = convergence_field_longitudinal(out.frame, s_.vfo, path_.desired_speed(), eps_hat_p);
        out.auxiliary = auxiliary_orientation(out.field_p, path_.strategy, memory.aux);

        const double cth = std::cos(attitude.y()), sth = std::sin(attitude.y());
        const double cpsi = std::cos(attitude.z()), spsi = std::sin(attitude.z());
        const double u_c = out.field_p.x() * cth * cpsi + out.field_p.y() * cth * spsi - out.field_p.z() * sth;

        if (out.auxiliary.frozen) {
            out.auxiliary_rates = {memory.aux.last.pitch_rate, memory.aux.last.yaw_rate};
        } else {
            const Vec3 commanded_position_rate = j.topLeftCorner<3, 3>().col(0) * u_c;
            const Vec3 position_rate = commanded_position_rate - eps_hat_p;
            out.field_p_rate = convergence_field_longitudinal_rate(path_, out.frame, position, position_rate, s_.vfo,
                                                                   out.eps_hat_dot.head<3>());
            out.auxiliary_rates = auxiliary_orientation_derivative(out.field_p, out.field_p_rate,
                                                                   out.auxiliary.yaw, memory.aux.freeze_epsilon);
            memory.aux.last.pitch_rate = out.auxiliary_rates.pitch_rate;
            memory.aux.last.yaw_rate = out.auxiliary_rates.yaw_rate;
        }

        const Vec2 eps_hat_o(out.estimates.eps_hat(4), out.estimates.eps_hat(5));
        out.field_o = convergence_field_angular(out.auxiliary.pitch, out.auxiliary.yaw, out.auxiliary_rates.pitch_rate,
                                                out.auxiliary_rates.yaw_rate, attitude, s_.vfo, eps_hat_o);
        out.auxiliary_error << wrap_to_pi_half_open(out.auxiliary.pitch - attitude.y()),
            out.auxiliary.yaw - attitude.z();

        const CommandedVelocity cmd = commanded_velocities(out.field_p, out.field_o, attitude);
        Vec6 reduced;
        reduced << cmd.u, 0.0, 0.0, 0.0, cmd.q, cmd.r;
        out.nu_c_unscaled = reduced;
        const bool hold = in.t < s_.inhibit_until && s_.inhibition == Inhibition::ForceAndCommand;
        if (hold) {
            reduced.setZero();
        } else if (s_.limits && in.t < s_.limits_until) {
            reduced = scale_commanded_velocities(reduced, memory.previous_command, in.t - memory.previous_time,
                                                 *s_.limits);
        }
        memory.previous_command = reduced;
        memory.previous_time = in.t;

        const double p_c = hold ? 0.0 : roll_stabilizer(attitude, reduced(4), reduced(5), s_.vfo, s_.roll_feedback);
        out.nu_c = reduced;
        out.nu_c(3) = p_c;
        out.nu_c_unscaled(3) = roll_stabilizer(attitude, cmd.q, cmd.r, s_.vfo, s_.roll_feedback);
        out.eta_c_dot = j * out.nu_c;
        return out;
    }

private:
    PathSpec path_;
    ControllerSettings s_;
    EsoBank bank_;
};

}  // namespace vfo_adr
