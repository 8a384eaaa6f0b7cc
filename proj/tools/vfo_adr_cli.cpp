// Batch front-end: run, sweep, validate-path, selftest.

#include "vfo_adr/config.hpp"
#include "vfo_adr/properties.hpp"
#include "vfo_adr/report.hpp"
#include "vfo_adr/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>

namespace fs = std::filesystem;
using namespace vfo_adr;

namespace {

constexpr const char* kOutputRootEnv = "VFO_ADR_OUTPUT_ROOT";

fs::path output_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
    return "runs";
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    out << text;
}

struct RunFiles {
    fs::path dir, trace, metrics_txt, metrics_json, plot, path, config;
};

RunFiles run_files(const fs::path& dir) {
    return {dir, dir / "trace.csv", dir / "metrics.txt", dir / "metrics.json", dir / "plot.gp", dir / "path.csv",
            dir / "config.json"};
}

// Trace, summaries, plot script and the resolved config for one run.
RunSummary export_run(const RunFiles& f, const ScenarioConfig& c, const SimulationTrace& trace, std::size_t every) {
    fs::create_directories(f.dir);
    const std::string hash = config_hash(c);
    write_trace_csv(f.trace, trace, every);
    const RunSummary s = summarize(c.name, hash, trace, c.metric_t1, c.metric_t2);
    write_text(f.metrics_txt, summary_text(s));
    write_text(f.metrics_json, summary_json(s));
    write_text(f.config, pretty_json(c));
    const PathSpec path = build_path(c.path);
    std::string path_csv;
    if (path.reference_point) {
        write_reference_path_csv(f.path, path, 0.0, kTwoPi, 2000);
        path_csv = f.path.filename().string();
    }
    write_text(f.dir / "plot.gp", plot_script(f.trace.filename().string(), path_csv));
    return s;
}

void write_manifest(const fs::path& dir, const std::string& scenario, const std::string& hash,
                    const std::vector<std::string>& outputs, const std::string& sweep_axis) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["config_hash"] = hash;
    j["outputs"] = outputs;
    j["sweep_axis"] = sweep_axis;
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= text.size() && !text.empty()) {
        const std::size_t end = text.find(',', start);
        const std::string item = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw InvalidArgument("bad number in --values: '" + item + "'");
        v.push_back(x);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return v;
}

int cmd_run(const std::string& source, const std::string& out_flag, std::size_t every) {
    const ScenarioConfig c = load_config(source);
    const fs::path dir = output_root(out_flag) / c.name;
    const SimulationTrace trace = run_scenario(c);
    const RunFiles f = run_files(dir);
    const RunSummary s = export_run(f, c, trace, every);
    write_manifest(dir, c.name, s.config_hash,
                   {f.trace.string(), f.metrics_txt.string(), f.metrics_json.string(), f.plot.string(),
                    f.config.string()},
                   "");
    std::cout << summary_text(s) << "outputs       " << dir.string() << '\n';
    return trace.completed() ? 0 : 1;
}

int cmd_sweep(const std::string& kind_text, const std::string& source, const std::string& values_text,
              const std::string& out_flag, std::size_t threads, std::size_t every, const FunnelOptions& funnel) {
    const auto kind = parse_sweep_kind(kind_text);
    if (!kind) throw InvalidArgument("sweep kind must be kp, delta, omega or ic");
    const ScenarioConfig base = load_config(source);
    const std::vector<double> values = parse_values(values_text);
    const std::vector<SweepPoint> points = make_sweep(base, *kind, values, funnel);
    const fs::path dir = output_root(out_flag) / (base.name + "_sweep_" + to_string(*kind));
    fs::create_directories(dir);

    std::mutex io;
    const auto outcomes = run_sweep(points, threads, [&](std::size_t, const SweepPoint& p, const SimulationTrace& t) {
        export_run(run_files(dir / p.label), p.config, t, every);
        std::lock_guard<std::mutex> lock(io);
        std::cerr << p.label << ": " << to_string(t.status) << '\n';
    });

    const std::string table = sweep_table(*kind, outcomes);
    write_text(dir / "summary.txt", table);
    write_text(dir / "summary.json", sweep_json(*kind, outcomes));
    std::vector<std::string> outputs{(dir / "summary.txt").string(), (dir / "summary.json").string()};
    for (const auto& p : points) outputs.push_back((dir / p.label).string());
    std::string axis = to_string(*kind);
    if (*kind != SweepKind::InitialCondition) {
        axis += ":";
        for (double v : values.empty() ? default_sweep_values(*kind) : values) axis += " " + format_double(v);
    }
    write_manifest(dir, base.name, config_hash(base), outputs, axis);
    std::cout << table;

    bool ok = true;
    for (const auto& o : outcomes) ok = ok && o.summary.status == RunStatus::Completed;
    return ok ? 0 : 1;
}

int cmd_validate_path(const std::string& source, std::size_t samples, double half_width) {
    const ScenarioConfig c = load_config(source);
    const PathSpec path = build_path(c.path);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> pts;
    if (path.reference_point) {
        for (std::size_t i = 0; i < samples; ++i) {
            pts.push_back(path.reference_point(kTwoPi * static_cast<double>(i) / static_cast<double>(samples)));
        }
    }
    const Vec3 centre = c.initial_eta.head<3>();
    for (std::size_t i = 0; i < samples; ++i) pts.push_back(centre + half_width * Vec3(u(rng), u(rng), u(rng)));

    const PathValidationReport r = validate_path(path, pts);
    std::cout << "path                " << path.name << '\n'
              << "samples             " << pts.size() << '\n'
              << "min |grad s1|       " << format_double(r.min_gradient_norm[0]) << '\n'
              << "min |grad s2|       " << format_double(r.min_gradient_norm[1]) << '\n'
              << "max |grad s1|       " << format_double(r.max_gradient_norm[0]) << '\n'
              << "max |grad s2|       " << format_double(r.max_gradient_norm[1]) << '\n'
              << "max |hess s1|       " << format_double(r.max_hessian_norm[0]) << '\n'
              << "max |hess s2|       " << format_double(r.max_hessian_norm[1]) << '\n'
              << "min |grad x grad|   " << format_double(r.min_cross_norm) << '\n'
              << "min planar tangent  " << format_double(r.min_planar_tangent_norm) << '\n'
              << "violations          " << r.violations.size() << '\n';
    for (std::size_t i = 0; i < std::min<std::size_t>(r.violations.size(), 20); ++i) {
        const auto& v = r.violations[i];
        const Vec3& p = pts[v.sample];
        std::cout << "  " << to_string(v.kind) << " surface " << v.surface << " value " << format_double(v.value)
                  << " at (" << format_double(p.x()) << ", " << format_double(p.y()) << ", "
                  << format_double(p.z()) << ")\n";
    }
    return r.ok() ? 0 : 1;
}

int cmd_selftest() {
    bool ok = true;
    for (const auto& r : run_property_suite()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VFO-ADR path-following simulator"};
    app.require_subcommand(1);
    std::string out_flag;
    app.add_option("--out", out_flag, std::string("output root (default $") + kOutputRootEnv + " or ./runs)");

    std::string source;
    std::size_t every = 1;

    auto* run = app.add_subcommand("run", "simulate one scenario and export trace, metrics and plot script");
    run->add_option("config", source, "scenario file or built-in name (scenario_a, scenario_b)")->required();
    run->add_option("--every", every, "write every N-th sample to the CSV")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "parameter or initial-condition sweep");
    std::string kind, values;
    std::size_t threads = 0;
    FunnelOptions funnel;
    sweep->add_option("kind", kind, "kp | delta | omega | ic")->required();
    sweep->add_option("config", source, "base scenario file or built-in name")->required();
    sweep->add_option("--values", values, "comma-separated axis values (delta: dp1,do1,dp2,do2,...)");
    sweep->add_option("--threads", threads, "worker count (0 = hardware concurrency)");
    sweep->add_option("--every", every, "write every N-th sample to the CSVs")->check(CLI::PositiveNumber);
    sweep->add_option("--count", funnel.count, "ic: number of initial positions");
    sweep->add_option("--radius", funnel.radius, "ic: ball radius around the path [m]");
    sweep->add_option("--horizon", funnel.horizon, "ic: simulated time per run [s]");
    sweep->add_option("--seed", funnel.seed, "ic: random seed");

    auto* validate = app.add_subcommand("validate-path", "check level-surface admissibility on sample points");
    std::size_t samples = 2000;
    double half_width = 1.0;
    validate->add_option("config", source, "scenario file or built-in name")->required();
    validate->add_option("--samples", samples, "samples along the path and in the box");
    validate->add_option("--half-width", half_width, "half width of the random box around the initial position [m]");

    auto* selftest = app.add_subcommand("selftest", "run the property suite");

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(source, out_flag, every);
        if (sweep->parsed()) return cmd_sweep(kind, source, values, out_flag, threads, every, funnel);
        if (validate->parsed()) return cmd_validate_path(source, samples, half_width);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
