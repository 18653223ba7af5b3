#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alley/sim.hpp"

namespace alley {

// Everything one CLI invocation runs: the scenario template, which policies
// to compare, and where results go.
struct RunConfig {
    Scenario scenario;
    std::vector<PolicyKind> policies;
    int replications = 100;
    std::string output_path;          // empty: no row file, summary only
    std::string output_format = "csv";  // csv | json
    std::optional<std::string> preset;  // recorded when geometry came from a preset
    bool want_poa = false;

    void validate() const;
};

// Raised on malformed documents and invariant violations; the message names
// the offending key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses the key-value experiment document (sections [scenario], [comms],
// [utility], [policy], [run]). Unknown keys and sections are rejected.
RunConfig parse_config(const std::string& text);

// Canonical rendering; parse_config(render_config(c)) reproduces c.
std::string render_config(const RunConfig& config);

}  // namespace alley
