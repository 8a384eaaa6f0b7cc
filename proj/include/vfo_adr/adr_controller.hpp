#pragma once

// Inner (dynamic) loop: one third-order error-domain extended state observer
// per degree of freedom and the disturbance-cancelling force law.

#include "vfo_adr/common.hpp"
#include "vfo_adr/rigid_body.hpp"

#include <array>

namespace vfo_adr {

using Vec18 = Eigen::Matrix<double, 18, 1>;

/// Observer gains (3w, 3w^2, w^3): all three observer poles at -w.
inline Vec3 observer_gains(double bandwidth) {
    return Vec3(3.0 * bandwidth, 3.0 * bandwidth * bandwidth, bandwidth * bandwidth * bandwidth);
}

/// A - l C for one degree of freedom.
inline Mat3 observer_error_matrix(double bandwidth) {
    const Vec3 l = observer_gains(bandwidth);
    Mat3 m;
    m << -l(0), 1.0, 0.0,
         -l(1), 0.0, 1.0,
         -l(2), 0.0, 0.0;
    return m;
}

/// Six extended state observers. Estimate of DoF i is (eta_c,i - eta_i, eps_i, d_i).
class EsoBank {
public:
    explicit EsoBank(const Vec6& bandwidths) : bandwidths_(bandwidths) {
        for (int i = 0; i < 6; ++i) {
            if (!(bandwidths(i) > 0.0) || !std::isfinite(bandwidths(i))) {
                throw InvalidArgument("observer bandwidths must be positive");
            }
            gains_[i] = observer_gains(bandwidths(i));
        }
    }
    explicit EsoBank(double bandwidth) : EsoBank(Vec6::Constant(bandwidth)) {}

    const Vec6& bandwidths() const { return bandwidths_; }
    const Vec3& gains(int dof) const { return gains_[dof]; }

    /// Observer right-hand side for the stacked estimate `xhat` (3 entries per DoF).
    Vec18 derivative(const Vec18& xhat, const Vec6& eta_c, const Vec6& eta, const Vec6& tau_eta,
                     const Vec3& attitude, const Vec6& b_hat, const Vec6& actuation,
                     double margin = kDefaultSingularityMargin) const {
        const Mat6 j = jacobian(attitude, margin);
        const Vec6 input = j * (b_hat.cwiseProduct(actuation.cwiseProduct(j.transpose() * tau_eta)));
        Vec18 out;
        for (int i = 0; i < 6; ++i) {
            const double innovation = (eta_c(i) - eta(i)) - xhat(3 * i);
            const Vec3& l = gains_[i];
            out(3 * i) = xhat(3 * i + 1) + l(0) * innovation;
            out(3 * i + 1) = xhat(3 * i + 2) - input(i) + l(1) * innovation;
            out(3 * i + 2) = l(2) * innovation;
        }
        return out;
    }

private:
    Vec6 bandwidths_;
    std::array<Vec3, 6> gains_;
};

struct EsoOutputs {
    Vec6 eps_hat = Vec6::Zero();
    Vec6 d_hat = Vec6::Zero();
};

inline EsoOutputs eso_outputs(const Vec18& xhat) {
    EsoOutputs o;
    for (int i = 0; i < 6; ++i) {
        o.eps_hat(i) = xhat(3 * i + 1);
        o.d_hat(i) = xhat(3 * i + 2);
    }
    return o;
}

/// Rate of the velocity-error estimate, taken from an observer derivative.
inline Vec6 eps_hat_rate(const Vec18& xhat_dot) {
    Vec6 r;
    for (int i = 0; i < 6; ++i) r(i) = xhat_dot(3 * i + 1);
    return r;
}

/// Initial estimate [-eta_i(0), 0, 0] for every DoF.
inline Vec18 initial_observer_state(const Vec6& eta0) {
    Vec18 x = Vec18::Zero();
    for (int i = 0; i < 6; ++i) x(3 * i) = -eta0(i);
    return x;
}

struct AdrGains {
    Vec6 k = Vec6::Ones();      // diagonal of the body-frame gain matrix
    Vec6 b_hat = Vec6::Ones();  // diagonal of the inverse-inertia estimate

    void check() const {
        if (!(k.array() > 0.0).all() || !(b_hat.array() > 0.0).all()) {
            throw InvalidArgument("ADR gains and B_hat must be positive");
        }
    }
};

struct ControlForce {
    Vec6 tau = Vec6::Zero();      // {B}
    Vec6 tau_eta = Vec6::Zero();  // {G}
};

/// tau = B^-1 J^-1 [d_hat + J K J^-1 eps_hat], tau_eta = J^-T tau.
inline ControlForce control_force(const Vec6& eps_hat, const Vec6& d_hat, const Vec3& attitude,
                                  const AdrGains& gains, double margin = kDefaultSingularityMargin) {
    const Mat6 j_inv = jacobian_inverse(attitude, margin);
    // J^-1 (d_hat + J K J^-1 eps_hat) = J^-1 d_hat + K J^-1 eps_hat
    const Vec6 body = j_inv * d_hat + gains.k.cwiseProduct(j_inv * eps_hat);
    ControlForce f;
    f.tau = body.cwiseQuotient(gains.b_hat);
    f.tau_eta = j_inv.transpose() * f.tau;
    return f;
}

inline Vec6 commanded_configuration_rate(const Vec6& nu_c, const Vec3& attitude,
                                         double margin = kDefaultSingularityMargin) {
    return jacobian(attitude, margin) * nu_c;
}

}  // namespace vfo_adr
