#pragma once

// Built-in configurations for the reproduction experiments: the three
// control-set sweeps, the non-unique-minimizer counterexample, and the
// fixed-waveform scan.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace shmopt {

/// Names accepted by the CLI --preset flag.
[[nodiscard]] std::vector<std::string> preset_names();

/// The configuration document for a named preset. Throws ConfigError for
/// unknown names.
[[nodiscard]] nlohmann::json preset_config(const std::string& name);

}  // namespace shmopt
