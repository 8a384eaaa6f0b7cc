#include "vfo_adr/report.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace vfo_adr {

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string csv_header() {
    std::string h;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (i) h += ',';
        h += kCsvColumns[i];
    }
    return h;
}

std::string csv_row(const TraceSample& s) {
    std::string row;
    row.reserve(34 * 24);
    auto put = [&](double v) {
        if (!row.empty()) row += ',';
        row += format_double(v);
    };
    put(s.t);
    for (int i = 0; i < 6; ++i) put(s.eta(i));
    for (int i = 0; i < 6; ++i) put(s.nu(i));
    put(s.e(0));
    put(s.e(1));
    put(s.e(2));
    put(s.e(3));
    put(s.e_2pi(4));
    put(s.e_a(0));
    put(s.e_a(1));
    for (int i : {0, 3, 4, 5}) put(s.nu_c(i));
    for (int i : {0, 3, 4, 5}) put(s.tau(i));
    put(s.d.norm());
    put(s.d_hat.norm());
    put(s.eps.norm());
    put(s.eps_hat.norm());
    put(s.eps_yaw);
    put(s.eps_pitch);
    return row;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace, std::size_t every) {
    if (every == 0) throw InvalidArgument("decimation must be at least 1");
    out << csv_header() << '\n';
    const auto& s = trace.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i % every == 0 || i + 1 == s.size()) out << csv_row(s[i]) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& file, const SimulationTrace& trace, std::size_t every) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    write_trace_csv(out, trace, every);
}

RunSummary summarize(const std::string& scenario, const std::string& hash, const SimulationTrace& trace,
                     double t1, double t2) {
    RunSummary r;
    r.scenario = scenario;
    r.config_hash = hash;
    r.status = trace.status;
    r.fault = trace.fault;
    r.end_time = trace.samples.empty() ? 0.0 : trace.samples.back().t;
    r.max_abs_pitch = trace.max_abs_pitch;
    if (trace.completed()) {
        r.metrics = compute_metrics(trace, t1, t2);
        r.has_metrics = true;
    }
    return r;
}

namespace {

struct Field {
    const char* name;
    double Metrics::*member;
};

constexpr Field kFields[] = {
    {"sup_e_p", &Metrics::sup_e_p},
    {"sup_e_2pi", &Metrics::sup_e_2pi},
    {"avg_e_p", &Metrics::avg_e_p},
    {"avg_e_o", &Metrics::avg_e_o},
    {"avg_abs_e_phi", &Metrics::avg_abs_e_phi},
    {"avg_abs_e_theta_a", &Metrics::avg_abs_e_theta_a},
    {"avg_abs_e_psi_a", &Metrics::avg_abs_e_psi_a},
    {"avg_nu_c", &Metrics::avg_nu_c},
    {"avg_applied_tau", &Metrics::avg_applied_tau},
    {"avg_d", &Metrics::avg_d},
    {"avg_d_error", &Metrics::avg_d_error},
    {"sup_eps", &Metrics::sup_eps},
    {"avg_eps", &Metrics::avg_eps},
    {"max_commanded_velocity", &Metrics::max_commanded_velocity},
    {"max_applied_force", &Metrics::max_applied_force},
    {"max_d_hat", &Metrics::max_d_hat},
    {"max_yaw_bound_excess", &Metrics::max_yaw_bound_excess},
};

}  // namespace

std::string summary_text(const RunSummary& s) {
    std::ostringstream o;
    o << "scenario      " << s.scenario << '\n'
      << "config hash   " << s.config_hash << '\n'
      << "status        " << to_string(s.status) << '\n';
    if (!s.fault.empty()) o << "fault         " << s.fault << '\n';
    o << "end time [s]  " << format_double(s.end_time) << '\n'
      << "max |theta|   " << format_double(s.max_abs_pitch) << '\n';
    if (s.has_metrics) {
        o << "window [s]    [" << format_double(s.metrics.t1) << ", " << format_double(s.metrics.t2) << "]\n";
        for (const auto& f : kFields) {
            std::string name = f.name;
            name.resize(std::max<std::size_t>(name.size() + 1, 24), ' ');
            o << name << format_double(s.metrics.*f.member) << '\n';
        }
    }
    return o.str();
}

std::string summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["scenario"] = s.scenario;
    j["config_hash"] = s.config_hash;
    j["status"] = to_string(s.status);
    j["fault"] = s.fault;
    j["end_time_s"] = s.end_time;
    j["max_abs_pitch_rad"] = s.max_abs_pitch;
    if (s.has_metrics) {
        nlohmann::ordered_json m;
        m["window_s"] = {s.metrics.t1, s.metrics.t2};
        for (const auto& f : kFields) {
            const double v = s.metrics.*f.member;
            m[f.name] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
        }
        j["metrics"] = m;
    } else {
        j["metrics"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string plot_script(const std::string& trace_csv, const std::string& path_csv) {
    std::ostringstream o;
    o << "# gnuplot -c plot.gp  (run from this directory)\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set terminal pngcairo size 1200,800\n"
      << "f = '" << trace_csv << "'\n\n"
      << "set output 'path3d.png'\n"
      << "set xlabel 'x [m]'; set ylabel 'y [m]'; set zlabel 'z [m]'\n"
      << "set view equal xyz\n";
    if (!path_csv.empty()) {
        o << "splot f using 2:3:4 with lines title 'vehicle', '" << path_csv
          << "' using 1:2:3 with lines dashtype 2 title 'reference'\n\n";
    } else {
        o << "splot f using 2:3:4 with lines title 'vehicle'\n\n";
    }
    o << "unset view; unset zlabel\n"
      << "set xlabel 't [s]'\n\n"
      << "set output 'errors.png'\n"
      << "set multiplot layout 2,1\n"
      << "set ylabel 'position [-]'\n"
      << "plot f using 1:14 with lines, f using 1:15 with lines\n"
      << "set ylabel 'orientation [rad]'\n"
      << "plot f using 1:16 with lines, f using 1:17 with lines, f using 1:18 with lines\n"
      << "unset multiplot\n\n"
      << "set output 'commands.png'\n"
      << "set multiplot layout 2,1\n"
      << "set ylabel 'commanded velocity'\n"
      << "plot f using 1:21 with lines, f using 1:22 with lines, f using 1:23 with lines, f using 1:24 with lines\n"
      << "set ylabel 'control force'\n"
      << "plot f using 1:25 with lines, f using 1:26 with lines, f using 1:27 with lines, f using 1:28 with lines\n"
      << "unset multiplot\n\n"
      << "set output 'disturbance.png'\n"
      << "set ylabel '|d|, |d_hat|'\n"
      << "set logscale y\n"
      << "plot f using 1:29 with lines, f using 1:30 with lines\n"
      << "unset logscale y\n";
    return o.str();
}

void write_reference_path_csv(const std::filesystem::path& file, const PathSpec& path, double from, double to,
                              std::size_t count) {
    if (!path.reference_point) throw InvalidArgument("path has no on-path point generator");
    if (count < 2) throw InvalidArgument("need at least two reference points");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    out << "x,y,z\n";
    for (std::size_t i = 0; i < count; ++i) {
        const double s = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
        const Vec3 p = path.reference_point(s);
        out << format_double(p.x()) << ',' << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
    }
}

}  // namespace vfo_adr
