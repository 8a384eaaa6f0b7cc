#pragma once

// Trace export (CSV), metric summaries and a gnuplot script for the
// standard panels.

#include "vfo_adr/simulation.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace vfo_adr {

inline constexpr std::array<const char*, 34> kCsvColumns = {
    "t",         "x",         "y",          "z",         "phi",       "theta",     "psi",
    "u",         "v",         "w",          "p",         "q",         "r",         "s1",
    "s2",        "e_phi",     "e_theta",    "e_psi_2pi", "e_theta_a", "e_psi_a",   "u_c",
    "p_c",       "q_c",       "r_c",        "tau_u",     "tau_p",     "tau_q",     "tau_r",
    "d_norm",    "dhat_norm", "eps_norm",   "epshat_norm", "eps_psi", "eps_theta",
};

std::string csv_header();
std::string csv_row(const TraceSample& s);
/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Writes every `every`-th sample; the last sample is always included.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace, std::size_t every = 1);
void write_trace_csv(const std::filesystem::path& file, const SimulationTrace& trace, std::size_t every = 1);

struct RunSummary {
    std::string scenario;
    std::string config_hash;
    RunStatus status = RunStatus::Completed;
    std::string fault;
    double end_time = 0.0;
    double max_abs_pitch = 0.0;
    bool has_metrics = false;
    Metrics metrics;
};

RunSummary summarize(const std::string& scenario, const std::string& hash, const SimulationTrace& trace,
                     double t1, double t2);

std::string summary_text(const RunSummary& s);
std::string summary_json(const RunSummary& s);

/// gnuplot script reading `trace_csv` (and `path_csv` when not empty) from
/// its own directory and writing PNG panels next to it.
std::string plot_script(const std::string& trace_csv, const std::string& path_csv);

/// On-path reference points for plotting, one per line "x,y,z".
void write_reference_path_csv(const std::filesystem::path& file, const PathSpec& path, double from, double to,
                              std::size_t count);

}  // namespace vfo_adr
