#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "railpca/bundle.hpp"
#include "railpca/dataset.hpp"
#include "railpca/detector.hpp"
#include "railpca/scenario.hpp"

namespace railpca {

/// A simulation campaign: which classes to generate, at which SNRs, how many
/// trials, under which soil presets, from which base seed. The default suite
/// yields 5 x 100 = 500 vectors per class.
struct ScenarioSuite {
    ScenarioConfig config;
    std::vector<std::string> classes;
    std::vector<double> snr_list_db{-10.0, -3.0, 0.0, 3.0, 10.0};
    int trials_per_snr = 100;
    std::vector<std::string> soils{"dry"};
    std::uint64_t seed_base = 1;
    int trial_offset = 0;  // shift trial indices to keep seed ranges disjoint
    bool e2e = false;      // emit full measurement sets instead of class vectors

    void validate() const;
    /// All 22 detector classes plus the joint-injection healthy diagnostic.
    static ScenarioSuite defaults();
};

ScenarioSuite parse_suite(const std::string& json_text);
ScenarioSuite load_suite(const std::string& path);

/// Deterministic row seed for (class, snr, trial) under a base seed.
std::uint64_t suite_row_seed(std::uint64_t seed_base, const GenClass& cls, int snr_index,
                             int global_trial);

/// Simulates the suite. Training mode emits one row per (soil, class, snr,
/// trial); e2e mode emits two rows per scenario (the phase-1 pair packing
/// both 4-vectors, and the joint 8-vector).
std::vector<DatasetRow> simulate_suite(const ScenarioSuite& suite);

struct TrainOptions {
    double rmse_cap = 0.10;
    std::vector<int> phases{1, 2, 3};
};

/// Trains one model per enumeration class of the requested phases; raises
/// ConfigurationError naming any class the dataset is missing.
ModelBundle train_from_rows(const std::vector<DatasetRow>& rows, const TrainOptions& opts = {});

/// Per-class, per-feature-column population statistics of a dataset.
struct FeatureDispersion {
    double sigma = 0.0;
    double mu = 0.0;
    double index = 0.0;  // sigma^2 / mu
};
std::map<std::string, std::vector<FeatureDispersion>> dispersion_table(
    const std::vector<DatasetRow>& rows);

/// End-to-end evaluation of a labelled e2e dataset against a bundle.
struct EvaluationSummary {
    int scenario_count = 0;
    int success_count = 0;
    double success_rate = 0.0;
    std::map<std::string, std::map<std::string, int>> confusion;  // true -> predicted -> n
    std::vector<double> margin_edges;                             // histogram bucket upper edges
    std::vector<int> margin_counts;
    std::map<std::string, double> t2_outlier_rate;  // per true-class model
    std::map<std::string, std::vector<FeatureDispersion>> dispersion;
    std::vector<std::string> mismatched_scenarios;

    std::string to_json() const;
};

/// Expected terminal classification for a generation class used as an
/// end-to-end scenario (e.g. "R1e3/4" -> itself, "healthy" -> "no-breakage").
std::string expected_final_class(const GenClass& cls);

/// Runs detect on every scenario group of the dataset. Refuses datasets that
/// share any (class, snr, seed) triple with the bundle's training provenance.
EvaluationSummary evaluate_rows(const ModelBundle& bundle, const std::vector<DatasetRow>& rows);

/// RMSE-vs-order table per (soil, snr, class), for plotting.
struct RmseSweepRow {
    std::string soil;
    double snr_db = 0.0;
    std::string class_id;
    int m = 0;
    double rmse = 0.0;
};
std::vector<RmseSweepRow> sweep_rmse(const ScenarioSuite& suite);
std::string sweep_to_csv(const std::vector<RmseSweepRow>& rows);

/// Groups e2e dataset rows by scenario id into detect() inputs.
struct ScenarioGroup {
    std::string scenario_id;
    std::string class_id;
    std::string soil;
    double snr_db = 0.0;
    Measurements measurements;
};
std::vector<ScenarioGroup> group_scenarios(const std::vector<DatasetRow>& rows);

}  // namespace railpca
