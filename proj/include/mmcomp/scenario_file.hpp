#pragma once

#include "mmcomp/geometry.hpp"
#include "mmcomp/simulator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mmcomp {

struct ThresholdGrid {
    double start_db = -10.0;
    double stop_db = 20.0;
    double step_db = 1.0;

    std::vector<double> values() const; // start, start + step, ..., <= stop
    bool operator==(const ThresholdGrid&) const = default;
};

struct SweepSpec {
    std::string param; // nt, n, beta, m or power
    std::vector<double> values;
    bool operator==(const SweepSpec&) const = default;
};

/// Parsed scenario document. `tier_radius[k]` keeps the density_radius_m form
/// (0 when the density was given per square meter).
struct ScenarioFile {
    Scenario scenario;
    std::vector<double> tier_radius;
    ThresholdGrid thresholds;
    SimConfig sim;
    std::optional<SweepSpec> sweep;

    bool operator==(const ScenarioFile&) const = default;
};

/// Parses the text form; errors are ValidationError with "name:line: " prefixes.
ScenarioFile parse_scenario(const std::string& text, const std::string& name = "<scenario>");
ScenarioFile load_scenario(const std::string& path);

/// Canonical text form; parse_scenario(to_text(f)) reproduces f.
std::string to_text(const ScenarioFile& file);

/// Copy of `base` with one sweep parameter set to `value`.
Scenario apply_sweep(const Scenario& base, const std::string& param, double value);

} // namespace mmcomp
