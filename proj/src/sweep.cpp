#include "vfo_adr/sweep.hpp"

#include "vfo_adr/config.hpp"
#include "vfo_adr/scenarios.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

namespace vfo_adr {

const char* to_string(SweepKind k) {
    switch (k) {
        case SweepKind::Kp: return "kp";
        case SweepKind::Delta: return "delta";
        case SweepKind::Omega: return "omega";
        case SweepKind::InitialCondition: return "ic";
    }
    return "unknown";
}

std::optional<SweepKind> parse_sweep_kind(const std::string& s) {
    if (s == "kp") return SweepKind::Kp;
    if (s == "delta") return SweepKind::Delta;
    if (s == "omega") return SweepKind::Omega;
    if (s == "ic") return SweepKind::InitialCondition;
    return std::nullopt;
}

std::vector<double> default_sweep_values(SweepKind kind) {
    switch (kind) {
        case SweepKind::Kp: return {1.0, 2.0, 4.0};
        case SweepKind::Omega: return {50.0, 100.0, 200.0};
        case SweepKind::Delta: {
            std::vector<double> v;
            for (const auto& [dp, dop] : compensation_sweep_values()) {
                v.push_back(dp);
                v.push_back(dop);
            }
            return v;
        }
        case SweepKind::InitialCondition: return {};
    }
    return {};
}

std::vector<Vec3> funnel_positions(const PathSpec& path, const FunnelOptions& o) {
    if (!path.reference_point) throw InvalidArgument("funnel needs a path with an on-path point generator");
    if (!(o.radius > 0.0)) throw InvalidArgument("funnel radius must be positive");
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(o.count);
    while (out.size() < o.count) {
        const double s = o.parameter_from + (o.parameter_to - o.parameter_from) * uniform(rng);
        Vec3 dir(normal(rng), normal(rng), normal(rng));
        if (dir.norm() < 1e-12) continue;
        dir.normalize();
        const double r = o.radius * std::cbrt(uniform(rng));
        out.push_back(path.reference_point(s) + r * dir);
    }
    return out;
}

std::vector<SweepPoint> make_sweep(const ScenarioConfig& base, SweepKind kind, const std::vector<double>& values_in,
                                   const FunnelOptions& funnel) {
    const std::vector<double> values = values_in.empty() ? default_sweep_values(kind) : values_in;
    std::vector<SweepPoint> out;
    char label[96];
    switch (kind) {
        case SweepKind::Kp:
            for (double v : values) {
                SweepPoint p{{}, base};
                p.config.vfo.k_p = v;
                std::snprintf(label, sizeof label, "kp_%g", v);
                p.label = label;
                out.push_back(std::move(p));
            }
            break;
        case SweepKind::Omega:
            for (double v : values) {
                SweepPoint p{{}, base};
                p.config.observer_bandwidths = Vec6::Constant(v);
                std::snprintf(label, sizeof label, "omega_%g", v);
                p.label = label;
                out.push_back(std::move(p));
            }
            break;
        case SweepKind::Delta:
            if (values.size() % 2 != 0) throw InvalidArgument("delta sweep needs (delta_p, delta_o) pairs");
            for (std::size_t i = 0; i < values.size(); i += 2) {
                SweepPoint p{{}, base};
                p.config.vfo.delta_p = values[i];
                p.config.vfo.delta_o = values[i + 1];
                std::snprintf(label, sizeof label, "delta_%g_%g", values[i], values[i + 1]);
                p.label = label;
                out.push_back(std::move(p));
            }
            break;
        case SweepKind::InitialCondition: {
            const std::vector<Vec3> pos = funnel_positions(build_path(base.path), funnel);
            for (std::size_t i = 0; i < pos.size(); ++i) {
                SweepPoint p{{}, base};
                p.config.initial_eta.head<3>() = pos[i];
                p.config.horizon = funnel.horizon;
                p.config.metric_t1 = 0.0;
                p.config.metric_t2 = funnel.horizon;
                std::snprintf(label, sizeof label, "ic_%02zu", i);
                p.label = label;
                out.push_back(std::move(p));
            }
            break;
        }
    }
    for (auto& p : out) {
        p.config.name = base.name + "_" + p.label;
        p.config.check();
    }
    return out;
}

std::vector<SweepOutcome> run_sweep(const std::vector<SweepPoint>& points, std::size_t threads,
                                    const TraceCallback& on_trace) {
    std::vector<SweepOutcome> results(points.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, points.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            const SweepPoint& p = points[i];
            const SimulationTrace trace = run_scenario(p.config);
            SweepOutcome& r = results[i];
            r.point = p;
            r.summary = summarize(p.config.name, config_hash(p.config), trace, p.config.metric_t1, p.config.metric_t2);
            if (!trace.samples.empty()) {
                r.initial_e_p = trace.samples.front().e.head<2>().norm();
                r.final_e_p = trace.samples.back().e.head<2>().norm();
            }
            if (on_trace) on_trace(i, p, trace);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string sweep_table(SweepKind kind, const std::vector<SweepOutcome>& outcomes) {
    std::ostringstream o;
    char line[256];
    if (kind == SweepKind::InitialCondition) {
        std::snprintf(line, sizeof line, "%-10s %-18s %12s %12s %10s %10s\n", "run", "status", "e_p(0)", "e_p(T)",
                      "ratio", "max|theta|");
        o << line;
        for (const auto& r : outcomes) {
            const double ratio = r.initial_e_p > 0.0 ? r.final_e_p / r.initial_e_p : 0.0;
            std::snprintf(line, sizeof line, "%-10s %-18s %12s %12s %10s %10s\n", r.point.label.c_str(),
                          to_string(r.summary.status), num(r.initial_e_p).c_str(), num(r.final_e_p).c_str(),
                          num(ratio).c_str(), num(r.summary.max_abs_pitch).c_str());
            o << line;
        }
        return o.str();
    }
    std::snprintf(line, sizeof line, "%-18s %-18s %12s %12s %12s %12s %12s %12s %12s %12s\n", "run", "status",
                  "|e_p|avg", "|e_o|avg", "|e_phi|avg", "|e_tha|avg", "|e_psa|avg", "|nu_c|avg", "|Gtau|avg",
                  "sup|e_p|");
    o << line;
    for (const auto& r : outcomes) {
        const Metrics& m = r.summary.metrics;
        auto f = [&](double v) { return r.summary.has_metrics ? num(v) : std::string("-"); };
        std::snprintf(line, sizeof line, "%-18s %-18s %12s %12s %12s %12s %12s %12s %12s %12s\n",
                      r.point.label.c_str(), to_string(r.summary.status), f(m.avg_e_p).c_str(), f(m.avg_e_o).c_str(),
                      f(m.avg_abs_e_phi).c_str(), f(m.avg_abs_e_theta_a).c_str(), f(m.avg_abs_e_psi_a).c_str(),
                      f(m.avg_nu_c).c_str(), f(m.avg_applied_tau).c_str(), f(m.sup_e_p).c_str());
        o << line;
    }
    return o.str();
}

std::string sweep_json(SweepKind kind, const std::vector<SweepOutcome>& outcomes) {
    nlohmann::ordered_json j;
    j["sweep"] = to_string(kind);
    j["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : outcomes) {
        nlohmann::ordered_json e = nlohmann::ordered_json::parse(summary_json(r.summary));
        e["label"] = r.point.label;
        e["initial_e_p"] = r.initial_e_p;
        e["final_e_p"] = r.final_e_p;
        j["runs"].push_back(e);
    }
    return j.dump(2) + "\n";
}

}  // namespace vfo_adr
