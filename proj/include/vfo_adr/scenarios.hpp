#pragma once

// Built-in scenarios: the helix run with a nominal plant and the planar
// ellipse run with external sinusoidal forcing and command scaling.

#include "vfo_adr/simulation.hpp"

#include <array>
#include <utility>

namespace vfo_adr {

inline Mat6 ellipsoid_inertia() {
    Mat6 m = Mat6::Zero();
    m.topLeftCorner<3, 3>() = Mat3::Identity() * 4.137;
    m.bottomRightCorner<3, 3>() << 0.535, 0.0, -0.390,
                                   0.0, 1.653, 0.0,
                                   -0.390, 0.0, 1.577;
    return m;
}

inline PlantConfig ellipsoid_plant() {
    PlantConfig p;
    p.inertia = ellipsoid_inertia();
    p.linear_damping << 2.0, 10.0, 10.0, 10.0, 10.0, 10.0;
    p.actuation << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
    p.coriolis = true;
    return p;
}

inline AdrGains default_adr_gains() {
    AdrGains g;
    g.k << 2.4172, 2.4172, 2.4172, 0.5, 0.5, 0.5;
    g.b_hat << 0.3, 0.3, 0.3, 2.5, 0.75, 0.75;
    return g;
}

inline ScenarioConfig scenario_a() {
    ScenarioConfig c;
    c.name = "scenario_a";
    c.plant = ellipsoid_plant();
    c.path.shape = HelixPath{1.0, 4.0};
    c.path.direction = 1;
    c.path.strategy = 1;
    c.path.speed = 0.1;
    c.vfo = VfoGains{};
    c.adr = default_adr_gains();
    c.observer_bandwidths = Vec6::Constant(200.0);
    c.inhibit_until = 1.0;
    c.limits_enabled = false;
    c.initial_eta << 0.0, -kPi / 3.0, kPi / 4.0, 1.0, 0.6, 0.6;
    c.horizon = 100.0;
    c.step = 1e-3;
    c.metric_t1 = 50.0;
    c.metric_t2 = 100.0;
    return c;
}

inline ScenarioConfig scenario_b() {
    ScenarioConfig c = scenario_a();
    c.name = "scenario_b";
    c.plant.disturbance = {{0, 2.0, 1.0, 0.0}, {1, 4.0, 0.8, 0.0}, {2, 1.4, 0.6, 0.0}};
    c.path.shape = PlaneEllipsePath{1.0, 2.0, Vec3(1.0, 2.0, 3.0), 1.0};
    c.path.speed = 0.2;
    c.adr.k = Vec6::Constant(0.5);
    c.limits_enabled = true;
    c.limits = VelocityLimits{};
    c.initial_eta << 0.0, -kPi / 3.0, kPi / 4.0, -0.1, 0.0, 0.3;
    return c;
}

/// Cautious-compensation pairs (delta_p, delta_o) of the comparison table.
inline std::array<std::pair<double, double>, 4> compensation_sweep_values() {
    return {{{0.0, 0.0}, {0.25, 0.33}, {0.5, 0.66}, {0.75, 1.0}}};
}

}  // namespace vfo_adr
