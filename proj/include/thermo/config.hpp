#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thermo {

// Parameters read from a JSON config document. Every field is optional so that
// command-line flags can override or fill in values; resolution order is
// flag > config > built-in default. Unknown keys, type mismatches, and schema
// version mismatches are rejected with a validation_error naming the key.
//
// Document layout:
//   {
//     "schema_version": 1,
//     "bath":     {"kind": "bosonic", "coupling": 1.0},
//     "prior":    {"tmin": 0.1, "tmax": 10.0, "nodes": 200, "spacing": "log"},
//     "strategy": {"mode": "adaptive", "update_interval": 1.0},
//     "detector": {"lambda": 5.0, "gamma": 10.0, "dt": 1e-4},
//     "run":      {"tau": 100.0, "gap": 0.46, "temperature": 1.0,
//                  "n_trajectories": 1000, "seed": 7,
//                  "sample_times": [...], "true_temperatures": [...]}
//   }
struct RunConfig {
    std::optional<std::string> bath_kind;
    std::optional<double> coupling;
    std::optional<double> t_min, t_max;
    std::optional<std::uint64_t> nodes;
    std::optional<std::string> spacing;
    std::optional<std::string> strategy;
    std::optional<double> update_interval;
    std::optional<double> lambda, gamma, dt;
    bool has_detector = false; // a detector group was present
    std::optional<double> tau;
    std::optional<double> gap;
    std::optional<double> temperature;
    std::optional<std::uint64_t> n_trajectories;
    std::optional<std::uint64_t> seed;
    std::vector<double> sample_times;
    std::vector<double> true_temperatures;
};

inline constexpr int kConfigSchemaVersion = 1;

RunConfig parse_run_config_text(const std::string& json_text);
RunConfig parse_run_config_file(const std::string& path);

} // namespace thermo
