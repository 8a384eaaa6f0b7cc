#pragma once

// Scenario files: JSON text with unit-suffixed keys. Every key is optional
// and falls back to the ScenarioConfig default; unknown keys are rejected.

#include "vfo_adr/simulation.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace vfo_adr {

/// Malformed text, wrong value type or unknown key. `where` is "line N" or
/// the dotted key path.
class ParseError : public Error {
public:
    ParseError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// Well-formed file describing an inadmissible scenario.
class ValidationError : public Error {
public:
    using Error::Error;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::filesystem::path& file);

/// Built-in name ("scenario_a", "scenario_b") or a file path.
ScenarioConfig load_config(const std::string& name_or_path);

/// Sorted-key, whitespace-free JSON of every field; input to the hash.
std::string canonical_json(const ScenarioConfig& config);
/// Indented form of the same document, parseable by parse_config_text.
std::string pretty_json(const ScenarioConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);
/// 16 lowercase hex digits of fnv1a64(canonical_json(config)).
std::string config_hash(const ScenarioConfig& config);

}  // namespace vfo_adr
