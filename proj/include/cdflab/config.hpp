#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdflab/simulator.hpp"

namespace cdflab
{

struct OutputSelection
{
    bool event_log = false;
    bool report = true;
    bool convergence_csv = true;
};

struct SweepAxis
{
    std::string parameter;  // dotted scenario path, e.g. protection.coupling_q
    std::vector<double> values;
};

struct ExperimentConfig
{
    Scenario scenario;
    int replications = 200;
    int checkpoints = 512;
    OutputSelection outputs;
    std::vector<SweepAxis> sweep;
};

struct ConfigOptions
{
    // Accept Hawkes branching ratios >= 1 (the caller is expected to warn).
    bool allow_nonstationary = false;
};

// Parse a YAML experiment description. Syntax errors, unknown keys and
// wrong types raise ConfigError with line context; out-of-domain values
// raise ValidationError naming the dotted field.
ExperimentConfig parse_config(const std::string& text, const ConfigOptions& options = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOptions& options = {});

// Fully resolved scenario with every default made explicit.
nlohmann::ordered_json scenario_to_json(const Scenario& s);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);

// Scenario from its resolved JSON form (inverse of scenario_to_json).
Scenario scenario_from_json(const nlohmann::ordered_json& j, const ConfigOptions& options = {});

using SweepPoint = std::vector<std::pair<std::string, double>>;

// Cartesian product of the sweep axes, first axis slowest.
std::vector<SweepPoint> sweep_grid(const std::vector<SweepAxis>& axes);

// Copy of `base` with the point's parameters substituted. Throws
// ValidationError if a parameter does not name a field of this scenario.
Scenario apply_sweep_point(const Scenario& base, const SweepPoint& point,
                           const ConfigOptions& options = {});

}  // namespace cdflab
