#pragma once

#include "coarseforge/json_io.hpp"

#include <string>
#include <vector>

namespace coarseforge {

/// One end-to-end scenario: a named check with a verdict, its wall time, and
/// a machine-readable report bundle.
struct ScenarioResult {
    std::string name;
    bool pass = false;
    double seconds = 0;
    double budget_seconds = 0;
    std::string detail;
    Json report;
};

ScenarioResult scenario_rips_closed_form();
ScenarioResult scenario_duality_sandwich();
ScenarioResult scenario_cgeodesic();
ScenarioResult scenario_surplus_weight();
ScenarioResult scenario_shortcut_negative();
ScenarioResult scenario_equalizer_threshold();
ScenarioResult scenario_tuple_oracle();
ScenarioResult scenario_rips_tuple_z2();
ScenarioResult scenario_realization_z2();
ScenarioResult scenario_retraction_constants();
ScenarioResult scenario_filtration_invariants();

/// All scenarios in acceptance order.
std::vector<ScenarioResult (*)()> all_scenarios();

/// Demo registry: spec-facing names to scenario runners.
ScenarioResult run_demo(const std::string& name);
std::vector<std::string> demo_names();

}  // namespace coarseforge
