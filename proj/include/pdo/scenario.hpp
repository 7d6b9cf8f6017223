#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdo/deformation.hpp"
#include "pdo/grid.hpp"
#include "pdo/report.hpp"

namespace pdo {

inline constexpr int kConfigSchemaVersion = 1;

/// Registered scenario names, in documentation order.
const std::vector<std::string>& scenario_names();

/// Fully resolved scenario parameters. Every scenario has its own defaults
/// (see default_config); a JSON config overrides individual fields.
struct ScenarioConfig {
    std::string scenario;
    int n = 1;
    int N = 256;
    double L = 10.0;
    int k = 2;
    double theta = 0.0;
    /// Explicit row-major J; takes the place of theta when present.
    std::optional<std::array<double, 4>> J;
    std::uint64_t seed = 0;
    int trial_count = 1;
    /// cv-bound only: "random" (seeded smooth symbols) or "identity".
    std::string symbol = "random";
    /// Every tolerance the scenario checks, defaults merged with overrides.
    std::map<std::string, double> tolerances;
    /// adjoint-symbol: damping levels; deformed-product: brute-force levels.
    std::vector<double> epsilon_schedule;
    /// Run the slow reference paths next to the fast ones.
    bool oracle = false;

    GridSpec grid() const;
    DeformationMatrix deformation() const;
    /// Throws InvalidInput for a name the scenario does not define.
    double tolerance(const std::string& name) const;
};

/// Throws InvalidInput for an unknown scenario.
ScenarioConfig default_config(const std::string& scenario);

/// Applies a config document (schema_version 1) on top of the defaults of
/// `scenario`. Unknown keys, unknown tolerance names, a "scenario" field that
/// disagrees with the argument, a non-skew J or an invalid grid throw
/// InvalidInput.
ScenarioConfig parse_config(const nlohmann::ordered_json& doc, const std::string& scenario);

/// The resolved config as echoed in reports (stable key order).
nlohmann::ordered_json to_json(const ScenarioConfig& config);

/// Runs a scenario. Deterministic for a given config apart from timings.
/// A ConvergenceError inside the scenario becomes a failing "converged"
/// metric with the trace as series "convergence_trace".
VerificationReport run_scenario(const ScenarioConfig& config);

/// True when the report records a convergence failure.
bool convergence_failed(const VerificationReport& report);

}  // namespace pdo
