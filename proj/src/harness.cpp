#include "railpca/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "railpca/jacobi.hpp"
#include "railpca/rng.hpp"

namespace railpca {

using nlohmann::json;

namespace {

std::string format_g(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string snr_tag(double snr) {
    if (std::isinf(snr)) return "inf";
    std::ostringstream s;
    s << snr;
    return s.str();
}

}  // namespace

void ScenarioSuite::validate() const {
    if (classes.empty()) throw ConfigurationError("suite has no classes");
    for (const auto& c : classes) gen_class(c);  // throws on unknown ids
    if (snr_list_db.empty()) throw ConfigurationError("suite has no SNR levels");
    if (trials_per_snr < 1) throw ConfigurationError("trials_per_snr must be >= 1");
    if (soils.empty()) throw ConfigurationError("suite has no soil presets");
    for (const auto& s : soils) config.preset(s);
    if (trial_offset < 0) throw ConfigurationError("trial_offset must be >= 0");
}

ScenarioSuite ScenarioSuite::defaults() {
    ScenarioSuite s;
    s.config = ScenarioConfig::defaults();
    for (const auto& c : all_gen_classes()) s.classes.push_back(c.id);
    return s;
}

ScenarioSuite parse_suite(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("suite is not valid JSON: ") + e.what());
    }
    ScenarioSuite s = ScenarioSuite::defaults();
    if (j.contains("scenario")) {
        s.config = parse_scenario_config(j["scenario"].dump());
    }
    if (j.contains("classes")) {
        s.classes = j["classes"].get<std::vector<std::string>>();
    }
    if (j.contains("snr_list_db")) s.snr_list_db = j["snr_list_db"].get<std::vector<double>>();
    if (j.contains("trials_per_snr")) s.trials_per_snr = j["trials_per_snr"].get<int>();
    if (j.contains("soils")) s.soils = j["soils"].get<std::vector<std::string>>();
    if (j.contains("seed_base")) s.seed_base = j["seed_base"].get<std::uint64_t>();
    if (j.contains("trial_offset")) s.trial_offset = j["trial_offset"].get<int>();
    if (j.contains("e2e")) s.e2e = j["e2e"].get<bool>();
    s.validate();
    return s;
}

ScenarioSuite load_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_suite(ss.str());
}

std::uint64_t suite_row_seed(std::uint64_t seed_base, const GenClass& cls, int snr_index,
                             int global_trial) {
    return derive_seed(seed_base, static_cast<std::uint64_t>(cls.global_index),
                       static_cast<std::uint64_t>(snr_index),
                       static_cast<std::uint64_t>(global_trial));
}

std::vector<DatasetRow> simulate_suite(const ScenarioSuite& suite) {
    suite.validate();
    std::vector<DatasetRow> rows;
    for (const auto& soil : suite.soils) {
        for (const auto& class_id : suite.classes) {
            const GenClass& cls = gen_class(class_id);
            for (std::size_t si = 0; si < suite.snr_list_db.size(); ++si) {
                const double snr = suite.snr_list_db[si];
                for (int t = 0; t < suite.trials_per_snr; ++t) {
                    const int trial = suite.trial_offset + t;
                    const std::uint64_t seed =
                        suite_row_seed(suite.seed_base, cls, static_cast<int>(si), trial);
                    const std::string id = class_id + ":" + soil + ":" + snr_tag(snr) + ":" +
                                           std::to_string(trial);
                    if (suite.e2e) {
                        const Measurements m = simulate_measurements(
                            suite.config, cls.nominal_breakages(), soil, snr, seed);
                        DatasetRow pair{id, class_id, 1, soil, snr, seed, {}};
                        pair.features.reserve(8);
                        for (int i = 0; i < 4; ++i) {
                            pair.features.push_back(m.track1_independent.components[i]);
                        }
                        for (int i = 0; i < 4; ++i) {
                            pair.features.push_back(m.track2_independent.components[i]);
                        }
                        rows.push_back(std::move(pair));
                        DatasetRow joint{id, class_id, cls.phase >= 2 ? cls.phase : 0, soil, snr,
                                         seed, {}};
                        joint.features.assign(m.joint.components.begin(),
                                              m.joint.components.end());
                        rows.push_back(std::move(joint));
                    } else {
                        const FeatureVector fv =
                            simulate_class_trial(suite.config, cls, soil, snr, seed, trial);
                        DatasetRow row{id, class_id, cls.phase, soil, snr, seed, {}};
                        row.features.assign(fv.components.begin(), fv.components.end());
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

ModelBundle train_from_rows(const std::vector<DatasetRow>& rows, const TrainOptions& opts) {
    ModelBundle bundle;
    std::set<std::string> soils;
    std::set<ModelBundle::Provenance::Triple> triples;

    for (int phase : opts.phases) {
        const std::vector<ClassLabel>* classes = nullptr;
        switch (phase) {
            case 1: classes = &ClassLabel::phase1_classes(); break;
            case 2: classes = &ClassLabel::phase2_classes(); break;
            case 3: classes = &ClassLabel::phase3_classes(); break;
            default: throw ConfigurationError("train phase must be 1, 2 or 3");
        }
        const int dim = phase == 1 ? 4 : 8;
        for (const auto& label : *classes) {
            TrainingSet set;
            set.class_label = label.id();
            for (const auto& r : rows) {
                if (r.class_id != label.id() || r.phase != phase ||
                    static_cast<int>(r.features.size()) != dim) {
                    continue;
                }
                VectorXd v(dim);
                for (int i = 0; i < dim; ++i) v(i) = r.features[i];
                set.vectors.push_back(std::move(v));
                set.provenance.push_back({r.snr_db, r.soil, r.seed});
                soils.insert(r.soil);
                triples.insert({r.class_id, r.snr_db, r.seed});
            }
            if (set.vectors.empty()) {
                throw ConfigurationError("dataset has no rows for class '" + label.id() + "'");
            }
            bundle.phase(phase).push_back(train(set, opts.rmse_cap));
        }
    }

    bundle.provenance.rows.assign(triples.begin(), triples.end());
    std::string soil_tag;
    for (const auto& s : soils) soil_tag += (soil_tag.empty() ? "" : ",") + s;
    bundle.provenance.soil = soil_tag;
    return bundle;
}

std::map<std::string, std::vector<FeatureDispersion>> dispersion_table(
    const std::vector<DatasetRow>& rows) {
    std::map<std::string, std::vector<std::vector<double>>> columns;
    for (const auto& r : rows) {
        const GenClass& cls = gen_class(r.class_id);
        if (r.phase != cls.phase) continue;  // skip e2e pair rows
        auto& cols = columns[r.class_id];
        cols.resize(std::max(cols.size(), r.features.size()));
        for (std::size_t i = 0; i < r.features.size(); ++i) cols[i].push_back(r.features[i]);
    }
    std::map<std::string, std::vector<FeatureDispersion>> out;
    for (const auto& [cls, cols] : columns) {
        std::vector<FeatureDispersion> per_feature;
        for (const auto& col : cols) {
            const DispersionStats d = dispersion_stats(col);
            per_feature.push_back({d.sigma, d.mu, d.index});
        }
        out[cls] = std::move(per_feature);
    }
    return out;
}

std::string expected_final_class(const GenClass& cls) {
    const auto state = cls.nominal_breakages();
    if (state.empty()) return "no-breakage";
    if (state.size() == 1) return ClassLabel::from_breakage(state.front()).id();
    const bool same_track =
        std::all_of(state.begin(), state.end(),
                    [&](const BreakageSpec& b) { return b.track == state.front().track; });
    if (same_track) return "t" + std::to_string(state.front().track) + "_ie";
    return "both-broken";
}

std::vector<ScenarioGroup> group_scenarios(const std::vector<DatasetRow>& rows) {
    struct Partial {
        const DatasetRow* pair = nullptr;
        const DatasetRow* joint = nullptr;
        int order = 0;
    };
    std::map<std::string, Partial> partials;
    std::vector<std::string> order;
    for (const auto& r : rows) {
        auto [it, inserted] = partials.try_emplace(r.scenario_id);
        if (inserted) order.push_back(r.scenario_id);
        if (r.phase == 1 && r.features.size() == 8) {
            it->second.pair = &r;
        } else if (r.features.size() == 8) {
            it->second.joint = &r;
        } else {
            throw ConfigurationError("scenario '" + r.scenario_id +
                                     "' has a row that is neither a measurement pair nor a "
                                     "joint vector (need 8 feature columns)");
        }
    }
    std::vector<ScenarioGroup> groups;
    groups.reserve(order.size());
    for (const auto& id : order) {
        const Partial& p = partials.at(id);
        if (p.pair == nullptr || p.joint == nullptr) {
            throw ConfigurationError("scenario '" + id +
                                     "' is incomplete: end-to-end evaluation needs the phase-1 "
                                     "pair row and the joint row");
        }
        ScenarioGroup g;
        g.scenario_id = id;
        g.class_id = p.pair->class_id;
        g.soil = p.pair->soil;
        g.snr_db = p.pair->snr_db;
        g.measurements.track1_independent =
            FeatureVector{InjectionMode::independent(1), VectorXd(4)};
        g.measurements.track2_independent =
            FeatureVector{InjectionMode::independent(2), VectorXd(4)};
        for (int i = 0; i < 4; ++i) {
            g.measurements.track1_independent.components[i] = p.pair->features[i];
            g.measurements.track2_independent.components[i] = p.pair->features[4 + i];
        }
        g.measurements.joint = FeatureVector{InjectionMode::joint(), VectorXd(8)};
        for (int i = 0; i < 8; ++i) g.measurements.joint.components[i] = p.joint->features[i];
        groups.push_back(std::move(g));
    }
    return groups;
}

namespace {

const PcaClassModel* model_for_class(const ModelBundle& bundle, const std::string& class_id) {
    for (int p = 1; p <= 3; ++p) {
        for (const auto& m : bundle.phase(p)) {
            if (m.class_label == class_id) return &m;
        }
    }
    return nullptr;
}

}  // namespace

EvaluationSummary evaluate_rows(const ModelBundle& bundle, const std::vector<DatasetRow>& rows) {
    bundle.validate_complete();

    std::set<ModelBundle::Provenance::Triple> training(bundle.provenance.rows.begin(),
                                                       bundle.provenance.rows.end());
    for (const auto& r : rows) {
        gen_class(r.class_id);  // label vocabulary check
        if (training.count({r.class_id, r.snr_db, r.seed})) {
            throw ConfigurationError("evaluation dataset shares training row (class=" +
                                     r.class_id + ", snr=" + snr_tag(r.snr_db) +
                                     ", seed=" + std::to_string(r.seed) + ")");
        }
    }

    EvaluationSummary summary;
    summary.margin_edges = {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0,
                            std::numeric_limits<double>::infinity()};
    summary.margin_counts.assign(summary.margin_edges.size(), 0);

    std::map<std::string, std::pair<int, int>> t2_counts;  // model -> (outliers, total)

    const auto groups = group_scenarios(rows);
    for (const auto& g : groups) {
        const GenClass& cls = gen_class(g.class_id);
        const std::string expected = expected_final_class(cls);
        const DetectionReport report = detect(bundle, g.measurements);

        summary.scenario_count += 1;
        summary.confusion[expected][report.final_class] += 1;
        if (report.final_class == expected) {
            summary.success_count += 1;
        } else {
            summary.mismatched_scenarios.push_back(g.scenario_id);
        }
        for (std::size_t b = 0; b < summary.margin_edges.size(); ++b) {
            if (report.confidence_margin <= summary.margin_edges[b]) {
                summary.margin_counts[b] += 1;
                break;
            }
        }

        // T2 of the true class's own model on this scenario's measurement.
        auto judge = [&](const std::string& model_id, const VectorXd& x) {
            const PcaClassModel* m = model_for_class(bundle, model_id);
            if (m == nullptr) return;
            const ClassScore s = score(*m, x);
            auto& [outliers, total] = t2_counts[model_id];
            total += 1;
            if (s.t_squared > s.t2_threshold) outliers += 1;
        };
        if (cls.phase == 3 || cls.phase == 2) {
            judge(cls.id, g.measurements.joint.components);
        } else if (cls.phase == 0) {
            judge("t1_ok", g.measurements.track1_independent.components);
            judge("t2_ok", g.measurements.track2_independent.components);
        }
    }

    summary.success_rate =
        summary.scenario_count == 0
            ? 0.0
            : static_cast<double>(summary.success_count) / summary.scenario_count;
    for (const auto& [model_id, counts] : t2_counts) {
        summary.t2_outlier_rate[model_id] =
            counts.second == 0 ? 0.0 : static_cast<double>(counts.first) / counts.second;
    }
    summary.dispersion = dispersion_table(rows);
    return summary;
}

std::string EvaluationSummary::to_json() const {
    json j;
    j["scenario_count"] = scenario_count;
    j["success_count"] = success_count;
    j["success_rate"] = success_rate;
    j["confusion"] = confusion;
    json hist = json::array();
    for (std::size_t i = 0; i < margin_edges.size(); ++i) {
        hist.push_back({{"upper_edge", std::isinf(margin_edges[i]) ? json("inf")
                                                                   : json(margin_edges[i])},
                        {"count", margin_counts[i]}});
    }
    j["margin_histogram"] = hist;
    j["t2_outlier_rate"] = t2_outlier_rate;
    json disp;
    for (const auto& [cls, feats] : dispersion) {
        json arr = json::array();
        for (const auto& f : feats) {
            arr.push_back({{"sigma", f.sigma}, {"mu", f.mu}, {"D", f.index}});
        }
        disp[cls] = arr;
    }
    j["dispersion"] = disp;
    j["mismatched_scenarios"] = mismatched_scenarios;
    return j.dump(2);
}

std::vector<RmseSweepRow> sweep_rmse(const ScenarioSuite& suite) {
    suite.validate();
    std::vector<RmseSweepRow> out;
    for (const auto& soil : suite.soils) {
        for (const auto& class_id : suite.classes) {
            const GenClass& cls = gen_class(class_id);
            for (std::size_t si = 0; si < suite.snr_list_db.size(); ++si) {
                const double snr = suite.snr_list_db[si];
                TrainingSet set;
                set.class_label = class_id;
                for (int t = 0; t < suite.trials_per_snr; ++t) {
                    const int trial = suite.trial_offset + t;
                    const std::uint64_t seed =
                        suite_row_seed(suite.seed_base, cls, static_cast<int>(si), trial);
                    set.vectors.push_back(
                        simulate_class_trial(suite.config, cls, soil, snr, seed, trial)
                            .components);
                }
                const PcaClassModel model = train(set, 1.0);  // cap irrelevant for the sweep
                const int n = model.n;
                for (int m = 1; m <= n; ++m) {
                    out.push_back(
                        {soil, snr, class_id, m, rmse_for_order(model.eigenvalues, m)});
                }
            }
        }
    }
    return out;
}

std::string sweep_to_csv(const std::vector<RmseSweepRow>& rows) {
    std::ostringstream out;
    out << "soil,snr_db,class,m,rmse\n";
    for (const auto& r : rows) {
        out << r.soil << ',' << format_g(r.snr_db) << ',' << r.class_id << ',' << r.m << ','
            << format_g(r.rmse) << "\n";
    }
    return out.str();
}

}  // namespace railpca
