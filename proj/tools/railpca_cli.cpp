// Command-line front end: simulate | train | classify | evaluate | sweep-rmse,
// plus a feature-map echo for documentation tooling.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "railpca/bundle.hpp"
#include "railpca/dataset.hpp"
#include "railpca/harness.hpp"
#include "railpca/scenario.hpp"

using namespace railpca;

namespace {

constexpr int kExitNoBreakage = 0;
constexpr int kExitBreakage = 1;
constexpr int kExitLowConfidence = 2;
constexpr int kExitConfigError = 3;
constexpr int kExitFailure = 4;

ScenarioSuite suite_from_options(const std::string& config_path, std::uint64_t seed,
                                 bool seed_set, int trial_offset, bool trial_offset_set,
                                 const std::vector<std::string>& classes, bool e2e_flag) {
    ScenarioSuite suite =
        config_path.empty() ? ScenarioSuite::defaults() : load_suite(config_path);
    if (seed_set) suite.seed_base = seed;
    if (trial_offset_set) suite.trial_offset = trial_offset;
    if (!classes.empty()) suite.classes = classes;
    if (e2e_flag) suite.e2e = true;
    suite.validate();
    return suite;
}

int classify_exit_code(const DetectionReport& report) {
    if (report.final_class == "no-breakage") return kExitNoBreakage;
    return report.high_confidence && report.consistent ? kExitBreakage : kExitLowConfidence;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCA-based broken-rail detector for a double-track section: "
                 "simulator, trainer, classifier and evaluation harness"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a labelled feature dataset (CSV)");
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    int sim_offset = 0;
    std::vector<std::string> sim_classes;
    bool sim_e2e = false;
    simulate->add_option("--config", sim_config, "Suite JSON (defaults built in)");
    simulate->add_option("--out", sim_out, "Output CSV path")->required();
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Override suite seed_base");
    auto* sim_off_opt = simulate->add_option("--trial-offset", sim_offset,
                                             "Shift trial indices (disjoint seed ranges)");
    simulate->add_option("--classes", sim_classes, "Restrict to these class ids");
    simulate->add_flag("--e2e", sim_e2e, "Emit full measurement sets for evaluate/classify");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train per-class PCA models from a dataset");
    std::string train_dataset, train_out, train_phase = "all";
    double train_cap = 0.10;
    train_cmd->add_option("--dataset", train_dataset, "Training CSV")->required();
    train_cmd->add_option("--out", train_out, "Output bundle JSON")->required();
    train_cmd->add_option("--phase", train_phase, "1, 2, 3 or all (default all)");
    train_cmd->add_option("--rmse-cap", train_cap, "Order-selection RMSE cap (default 0.10)");

    // classify
    auto* classify = app.add_subcommand("classify", "Run the three-phase detector");
    std::string cls_bundle, cls_scenario, cls_measurements;
    bool cls_json_only = false;
    classify->add_option("--bundle", cls_bundle, "Model bundle JSON")->required();
    classify->add_option("--scenario", cls_scenario, "Scenario JSON to simulate and classify");
    classify->add_option("--measurements", cls_measurements,
                         "Measurement CSV (e2e rows) to classify");
    classify->add_flag("--json-only", cls_json_only, "Suppress the text table");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a bundle on a labelled dataset");
    std::string eval_bundle, eval_dataset, eval_out;
    evaluate->add_option("--bundle", eval_bundle, "Model bundle JSON")->required();
    evaluate->add_option("--dataset", eval_dataset, "Labelled e2e CSV")->required();
    evaluate->add_option("--out", eval_out, "Summary JSON path (stdout if omitted)");

    // sweep-rmse
    auto* sweep = app.add_subcommand("sweep-rmse", "RMSE-vs-order table per soil/SNR/class");
    std::string sweep_config, sweep_out;
    std::uint64_t sweep_seed = 0;
    std::vector<std::string> sweep_classes;
    sweep->add_option("--config", sweep_config, "Suite JSON (defaults built in)");
    sweep->add_option("--out", sweep_out, "Output CSV path")->required();
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "Override suite seed_base");
    sweep->add_option("--classes", sweep_classes, "Restrict to these class ids");

    // feature-map
    auto* fmap = app.add_subcommand("feature-map", "JSON echo of the feature index map");
    std::string fmap_injection = "joint";
    fmap->add_option("--injection", fmap_injection, "joint | independent1 | independent2");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const ScenarioSuite suite =
                suite_from_options(sim_config, sim_seed, sim_seed_opt->count() > 0, sim_offset,
                                   sim_off_opt->count() > 0, sim_classes, sim_e2e);
            const auto rows = simulate_suite(suite);
            write_dataset_csv(sim_out, rows);
            std::cout << "wrote " << rows.size() << " rows to " << sim_out << "\n";
            return 0;
        }

        if (train_cmd->parsed()) {
            TrainOptions opts;
            opts.rmse_cap = train_cap;
            if (train_phase == "all") {
                opts.phases = {1, 2, 3};
            } else if (train_phase == "1" || train_phase == "2" || train_phase == "3") {
                opts.phases = {std::stoi(train_phase)};
            } else {
                throw ConfigurationError("--phase must be 1, 2, 3 or all");
            }
            const auto rows = read_dataset_csv(train_dataset);
            ModelBundle bundle = train_from_rows(rows, opts);
            if (train_phase != "all" && std::ifstream(train_out).good()) {
                // Partial training merges into an existing bundle.
                ModelBundle existing = load_bundle(train_out);
                existing.phase(opts.phases.front()) = bundle.phase(opts.phases.front());
                auto merged = existing.provenance.rows;
                merged.insert(merged.end(), bundle.provenance.rows.begin(),
                              bundle.provenance.rows.end());
                std::sort(merged.begin(), merged.end());
                merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
                existing.provenance.rows = std::move(merged);
                if (existing.provenance.soil.empty()) {
                    existing.provenance.soil = bundle.provenance.soil;
                }
                bundle = std::move(existing);
            }
            save_bundle(train_out, bundle);
            for (int p : opts.phases) {
                for (const auto& m : bundle.phase(p)) {
                    std::printf("phase %d  %-8s  K=%d  m=%d  RMSE(m)=%.4f%s\n", p,
                                m.class_label.c_str(), m.training_K, m.m, m.rmse_at_m,
                                m.degenerate ? "  (no m<n under cap)" : "");
                }
            }
            return 0;
        }

        if (classify->parsed()) {
            const ModelBundle bundle = load_bundle(cls_bundle);
            bundle.validate_complete();
            if (cls_scenario.empty() == cls_measurements.empty()) {
                throw ConfigurationError("classify needs exactly one of --scenario or "
                                         "--measurements");
            }
            int exit_code = kExitNoBreakage;
            if (!cls_scenario.empty()) {
                const SingleScenario sc = load_single_scenario(cls_scenario);
                const Measurements m = simulate_measurements(sc.config, sc.breakages, sc.soil,
                                                             sc.snr_db, sc.seed);
                const DetectionReport report = detect(bundle, m);
                if (!cls_json_only) std::cout << report.to_text() << "\n";
                std::cout << report.to_json() << "\n";
                exit_code = classify_exit_code(report);
            } else {
                const auto rows = read_dataset_csv(cls_measurements);
                for (const auto& group : group_scenarios(rows)) {
                    const DetectionReport report = detect(bundle, group.measurements);
                    if (!cls_json_only) {
                        std::cout << "scenario " << group.scenario_id << ":\n"
                                  << report.to_text() << "\n";
                    }
                    std::cout << report.to_json() << "\n";
                    exit_code = std::max(exit_code, classify_exit_code(report));
                }
            }
            return exit_code;
        }

        if (evaluate->parsed()) {
            const ModelBundle bundle = load_bundle(eval_bundle);
            const auto rows = read_dataset_csv(eval_dataset);
            const EvaluationSummary summary = evaluate_rows(bundle, rows);
            const std::string text = summary.to_json();
            if (eval_out.empty()) {
                std::cout << text << "\n";
            } else {
                write_text_file(eval_out, text);
                std::cout << "success_rate " << summary.success_rate << " over "
                          << summary.scenario_count << " scenarios -> " << eval_out << "\n";
            }
            return 0;
        }

        if (sweep->parsed()) {
            const ScenarioSuite suite = suite_from_options(
                sweep_config, sweep_seed, sweep_seed_opt->count() > 0, 0, false, sweep_classes,
                false);
            const auto rows = sweep_rmse(suite);
            write_text_file(sweep_out, sweep_to_csv(rows));
            std::cout << "wrote " << rows.size() << " rows to " << sweep_out << "\n";
            return 0;
        }

        if (fmap->parsed()) {
            InjectionMode mode = InjectionMode::joint();
            if (fmap_injection == "independent1") {
                mode = InjectionMode::independent(1);
            } else if (fmap_injection == "independent2") {
                mode = InjectionMode::independent(2);
            } else if (fmap_injection != "joint") {
                throw ConfigurationError("--injection must be joint, independent1 or independent2");
            }
            std::cout << feature_symbols_json(mode) << "\n";
            return 0;
        }
    } catch (const ConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
