#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "railpca/detector.hpp"
#include "railpca/kasami.hpp"
#include "railpca/netmodel.hpp"
#include "railpca/signal.hpp"

namespace railpca {

/// Everything needed to simulate labelled measurements: the electrical model,
/// the soil presets and the spreading code.
struct ScenarioConfig {
    SectionModel base;  // breakage-free; injection set per simulation
    std::map<std::string, SoilPreset> soil_presets;
    int code_degree = 8;
    int code_family_index = 0;

    const SoilPreset& preset(const std::string& name) const;
    KasamiCode code() const;
    static ScenarioConfig defaults();
};

/// A data-generation class: one of the 22 detector classes, or "healthy",
/// the joint-injection breakage-free diagnostic class (phase 0).
struct GenClass {
    std::string id;
    int phase = 0;        // 0 diagnostic, 1..3 detector phases
    int global_index = 0; // stable index used for seed derivation
    InjectionMode injection = InjectionMode::joint();

    /// Physical breakage state for one training trial. Classes that pool
    /// several physical situations (phase 1 and 2) cycle through their
    /// variants deterministically with the trial index.
    std::vector<BreakageSpec> breakages_for_trial(int trial) const;

    /// Representative breakage state for an end-to-end scenario.
    std::vector<BreakageSpec> nominal_breakages() const;
};

/// All 23 generation classes: phase 1 (4), phase 2 (6), phase 3 (12), healthy.
const std::vector<GenClass>& all_gen_classes();
const GenClass& gen_class(const std::string& id);

/// Builds the concrete section model for a breakage state under a soil preset.
SectionModel instantiate_model(const ScenarioConfig& cfg, const std::vector<BreakageSpec>& state,
                               const std::string& soil);

/// Simulates the feature vector for one labelled training trial.
FeatureVector simulate_class_trial(const ScenarioConfig& cfg, const GenClass& cls,
                                   const std::string& soil, double snr_db,
                                   std::uint64_t row_seed, int trial);

/// The three measurements a detection pass needs, simulated from one state.
Measurements simulate_measurements(const ScenarioConfig& cfg,
                                   const std::vector<BreakageSpec>& state,
                                   const std::string& soil, double snr_db,
                                   std::uint64_t row_seed);

/// A single concrete scenario, as consumed by `classify --scenario`.
struct SingleScenario {
    ScenarioConfig config;
    std::vector<BreakageSpec> breakages;
    std::string soil = "dry";
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;
};

/// JSON loaders; see configs/ and the README for the schema.
ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::string& path);
SingleScenario parse_single_scenario(const std::string& json_text);
SingleScenario load_single_scenario(const std::string& path);
std::string scenario_config_to_json(const ScenarioConfig& cfg);

}  // namespace railpca
