#pragma once

#include <utility>

namespace vfo_adr {

/// Classical fourth-order Runge-Kutta step. `deriv(t, x)` returns dx/dt.
/// `k1` may be supplied when the slope at (t, x) is already known.
template <typename State, typename Deriv>
State rk4_step(Deriv&& deriv, double t, const State& x, double dt, const State& k1) {
    const double half = 0.5 * dt;
    const State k2 = deriv(t + half, State(x + half * k1));
    const State k3 = deriv(t + half, State(x + half * k2));
    const State k4 = deriv(t + dt, State(x + dt * k3));
    return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

template <typename State, typename Deriv>
State rk4_step(Deriv&& deriv, double t, const State& x, double dt) {
    const State k1 = deriv(t, x);
    return rk4_step(std::forward<Deriv>(deriv), t, x, dt, k1);
}

}  // namespace vfo_adr
