#pragma once

// Parameter sweeps over a base scenario and the random initial-condition
// funnel. Runs share nothing and execute on a bounded worker pool.

#include "vfo_adr/report.hpp"
#include "vfo_adr/simulation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vfo_adr {

enum class SweepKind { Kp, Delta, Omega, InitialCondition };

const char* to_string(SweepKind k);
std::optional<SweepKind> parse_sweep_kind(const std::string& s);

struct FunnelOptions {
    std::size_t count = 20;
    double radius = 0.5;        // [m] around an on-path point
    double horizon = 30.0;      // [s]
    double parameter_from = 0.0;
    double parameter_to = 2.0 * kPi;
    std::uint64_t seed = 20240531;
};

struct SweepPoint {
    std::string label;
    ScenarioConfig config;
};

struct SweepOutcome {
    SweepPoint point;
    RunSummary summary;
    double initial_e_p = 0.0;
    double final_e_p = 0.0;
};

/// Default axis values: k_p {1, 2, 4}; omega {50, 100, 200}; delta uses the
/// four cautious-compensation pairs. For delta, explicit values are read as
/// consecutive (delta_p, delta_o) pairs.
std::vector<double> default_sweep_values(SweepKind kind);

std::vector<SweepPoint> make_sweep(const ScenarioConfig& base, SweepKind kind, const std::vector<double>& values,
                                   const FunnelOptions& funnel = {});

/// Random positions uniformly distributed in a ball of `radius` around
/// on-path points; attitude and velocities taken from `base`.
std::vector<Vec3> funnel_positions(const PathSpec& path, const FunnelOptions& options);

using TraceCallback = std::function<void(std::size_t index, const SweepPoint&, const SimulationTrace&)>;

/// Runs every point with at most `threads` workers (0 picks the hardware
/// concurrency). `on_trace` is called from worker threads.
std::vector<SweepOutcome> run_sweep(const std::vector<SweepPoint>& points, std::size_t threads = 0,
                                    const TraceCallback& on_trace = {});

std::string sweep_table(SweepKind kind, const std::vector<SweepOutcome>& outcomes);
std::string sweep_json(SweepKind kind, const std::vector<SweepOutcome>& outcomes);

}  // namespace vfo_adr
