#include "railpca/scenario.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "railpca/rng.hpp"

namespace railpca {

using nlohmann::json;

const SoilPreset& ScenarioConfig::preset(const std::string& name) const {
    auto it = soil_presets.find(name);
    if (it == soil_presets.end()) {
        throw ConfigurationError("unknown soil preset '" + name + "'");
    }
    return it->second;
}

KasamiCode ScenarioConfig::code() const {
    auto set = kasami_small_set(code_degree);
    if (code_family_index < 0 || code_family_index >= static_cast<int>(set.size())) {
        throw ConfigurationError("code family index " + std::to_string(code_family_index) +
                                 " out of range for degree " + std::to_string(code_degree));
    }
    return set[static_cast<std::size_t>(code_family_index)];
}

ScenarioConfig ScenarioConfig::defaults() {
    ScenarioConfig cfg;
    cfg.base = SectionModel::default_model();
    cfg.soil_presets["dry"] = SoilPreset::dry();
    cfg.soil_presets["wet"] = SoilPreset::wet();
    return cfg;
}

namespace {

// Own-track breakage variants pooled by the phase-1 BR classes:
// three quarters of the external rail, three of the internal, three double.
std::vector<BreakageSpec> own_variant(int track, int v) {
    if (v < 3) return {{track, Rail::external, v + 1}};
    if (v < 6) return {{track, Rail::internal, v - 2}};
    const int q = v - 5;
    return {{track, Rail::internal, q}, {track, Rail::external, q}};
}

void append(std::vector<BreakageSpec>& out, const std::vector<BreakageSpec>& extra) {
    out.insert(out.end(), extra.begin(), extra.end());
}

}  // namespace

std::vector<BreakageSpec> GenClass::breakages_for_trial(int trial) const {
    const ClassLabel label = phase == 0 ? ClassLabel{} : ClassLabel::parse(id);
    std::vector<BreakageSpec> state;
    switch (phase) {
        case 0:
            break;  // healthy line
        case 1: {
            const int other = label.track == 1 ? 2 : 1;
            int other_state;
            if (label.broken) {
                append(state, own_variant(label.track, trial % 9));
                other_state = (trial / 9) % 10;
            } else {
                other_state = trial % 10;
            }
            if (other_state > 0) append(state, own_variant(other, other_state - 1));
            break;
        }
        case 2: {
            const int quarter = 1 + trial % 3;
            if (label.rails == RailSel::both) {
                state.push_back({label.track, Rail::internal, quarter});
                state.push_back({label.track, Rail::external, quarter});
            } else {
                state.push_back({label.track,
                                 label.rails == RailSel::internal ? Rail::internal : Rail::external,
                                 quarter});
            }
            break;
        }
        default:
            state.push_back(label.to_breakage());
            break;
    }
    return state;
}

std::vector<BreakageSpec> GenClass::nominal_breakages() const {
    if (phase == 0) return {};
    const ClassLabel label = ClassLabel::parse(id);
    if (phase == 3) return {label.to_breakage()};
    if (phase == 2) {
        // Representative mid-section state for scenario shorthand.
        if (label.rails == RailSel::both) {
            return {{label.track, Rail::internal, 2}, {label.track, Rail::external, 2}};
        }
        return {{label.track,
                 label.rails == RailSel::internal ? Rail::internal : Rail::external, 2}};
    }
    if (label.broken) return {{label.track, Rail::external, 2}};
    return {};
}

const std::vector<GenClass>& all_gen_classes() {
    static const std::vector<GenClass> classes = [] {
        std::vector<GenClass> v;
        int idx = 0;
        for (const auto& c : ClassLabel::phase1_classes()) {
            v.push_back({c.id(), 1, idx++, InjectionMode::independent(c.track)});
        }
        for (const auto& c : ClassLabel::phase2_classes()) {
            v.push_back({c.id(), 2, idx++, InjectionMode::joint()});
        }
        for (const auto& c : ClassLabel::phase3_classes()) {
            v.push_back({c.id(), 3, idx++, InjectionMode::joint()});
        }
        v.push_back({"healthy", 0, idx++, InjectionMode::joint()});
        return v;
    }();
    return classes;
}

const GenClass& gen_class(const std::string& id) {
    for (const auto& c : all_gen_classes()) {
        if (c.id == id) return c;
    }
    throw ParameterError("unknown generation class '" + id + "'");
}

SectionModel instantiate_model(const ScenarioConfig& cfg, const std::vector<BreakageSpec>& state,
                               const std::string& soil) {
    SectionModel m = apply_soil(cfg.base, cfg.preset(soil));
    m.breakages = state;
    m.validate();
    return m;
}

FeatureVector simulate_class_trial(const ScenarioConfig& cfg, const GenClass& cls,
                                   const std::string& soil, double snr_db,
                                   std::uint64_t row_seed, int trial) {
    const SectionModel model = instantiate_model(cfg, cls.breakages_for_trial(trial), soil);
    return simulate_features(model, cls.injection, cfg.code(), snr_db, row_seed);
}

Measurements simulate_measurements(const ScenarioConfig& cfg,
                                   const std::vector<BreakageSpec>& state,
                                   const std::string& soil, double snr_db,
                                   std::uint64_t row_seed) {
    const SectionModel model = instantiate_model(cfg, state, soil);
    const KasamiCode code = cfg.code();
    Measurements m{
        simulate_features(model, InjectionMode::independent(1), code, snr_db,
                          derive_seed(row_seed, 1)),
        simulate_features(model, InjectionMode::independent(2), code, snr_db,
                          derive_seed(row_seed, 2)),
        simulate_features(model, InjectionMode::joint(), code, snr_db, derive_seed(row_seed, 3)),
    };
    return m;
}

namespace {

Complex complex_from_json(const json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
    throw ConfigurationError("expected a number or [re, im] pair for an impedance");
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

SegmentParams segment_from_json(const json& j, const SegmentParams& defaults) {
    SegmentParams s = defaults;
    if (j.contains("length_km")) s.length_km = j["length_km"].get<double>();
    if (j.contains("r_per_km")) s.r_per_km = j["r_per_km"].get<double>();
    if (j.contains("l_per_km")) s.l_per_km = j["l_per_km"].get<double>();
    if (j.contains("m_intra_per_km")) s.m_intra_per_km = j["m_intra_per_km"].get<double>();
    if (j.contains("m_inter_per_km")) s.m_inter_per_km = j["m_inter_per_km"].get<double>();
    if (j.contains("c_rail_rail_per_km")) s.c_rail_rail_per_km = j["c_rail_rail_per_km"].get<double>();
    if (j.contains("g_rail_rail_per_km")) s.g_rail_rail_per_km = j["g_rail_rail_per_km"].get<double>();
    if (j.contains("c_rail_gnd_per_km")) s.c_rail_gnd_per_km = j["c_rail_gnd_per_km"].get<double>();
    if (j.contains("g_rail_gnd_per_km")) s.g_rail_gnd_per_km = j["g_rail_gnd_per_km"].get<double>();
    return s;
}

json segment_to_json(const SegmentParams& s) {
    return json{{"length_km", s.length_km},
                {"r_per_km", s.r_per_km},
                {"l_per_km", s.l_per_km},
                {"m_intra_per_km", s.m_intra_per_km},
                {"m_inter_per_km", s.m_inter_per_km},
                {"c_rail_rail_per_km", s.c_rail_rail_per_km},
                {"g_rail_rail_per_km", s.g_rail_rail_per_km},
                {"c_rail_gnd_per_km", s.c_rail_gnd_per_km},
                {"g_rail_gnd_per_km", s.g_rail_gnd_per_km}};
}

BreakageSpec breakage_from_json(const json& j) {
    BreakageSpec b;
    b.track = j.at("track").get<int>();
    const std::string rail = j.at("rail").get<std::string>();
    if (rail.size() != 1) throw ConfigurationError("breakage rail must be \"e\" or \"i\"");
    b.rail = rail_from_char(rail[0]);
    b.quarter = j.at("quarter").get<int>();
    b.validate();
    return b;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("scenario config is not valid JSON: ") + e.what());
    }

    ScenarioConfig cfg = ScenarioConfig::defaults();
    SectionModel& m = cfg.base;
    if (j.contains("frequency_hz")) m.frequency_hz = j["frequency_hz"].get<double>();
    if (j.contains("source_voltage")) m.source_voltage = j["source_voltage"].get<double>();
    if (j.contains("source_impedance_ohm")) {
        m.source_impedance = complex_from_json(j["source_impedance_ohm"]);
    }
    if (j.contains("termination_impedance_ohm")) {
        m.termination_impedance = complex_from_json(j["termination_impedance_ohm"]);
    }
    if (j.contains("sections_per_segment")) {
        m.sections_per_segment = j["sections_per_segment"].get<int>();
    }
    if (j.contains("segment")) {
        const SegmentParams seg = segment_from_json(j["segment"], m.segments.at(0));
        m.segments.assign(4, seg);
    }
    if (j.contains("segments")) {
        const auto& arr = j["segments"];
        if (!arr.is_array() || arr.size() != 4) {
            throw ConfigurationError("scenario \"segments\" must be an array of 4 blocks");
        }
        for (std::size_t i = 0; i < 4; ++i) {
            m.segments[i] = segment_from_json(arr[i], m.segments[i]);
        }
    }
    if (j.contains("soil_presets")) {
        for (const auto& [name, pj] : j["soil_presets"].items()) {
            SoilPreset p;
            p.name = name;
            p.water_content_pct = pj.at("water_content_pct").get<double>();
            p.g_scale = pj.at("g_scale").get<double>();
            p.validate();
            cfg.soil_presets[name] = p;
        }
    }
    if (j.contains("code")) {
        cfg.code_degree = j["code"].value("degree", cfg.code_degree);
        cfg.code_family_index = j["code"].value("family_index", cfg.code_family_index);
    }
    m.validate();
    return cfg;
}

std::string scenario_config_to_json(const ScenarioConfig& cfg) {
    json j;
    const SectionModel& m = cfg.base;
    j["frequency_hz"] = m.frequency_hz;
    j["source_voltage"] = m.source_voltage;
    j["source_impedance_ohm"] = complex_to_json(m.source_impedance);
    j["termination_impedance_ohm"] = complex_to_json(m.termination_impedance);
    j["sections_per_segment"] = m.sections_per_segment;
    json segs = json::array();
    for (const auto& s : m.segments) segs.push_back(segment_to_json(s));
    j["segments"] = segs;
    json presets;
    for (const auto& [name, p] : cfg.soil_presets) {
        presets[name] = {{"water_content_pct", p.water_content_pct}, {"g_scale", p.g_scale}};
    }
    j["soil_presets"] = presets;
    j["code"] = {{"degree", cfg.code_degree}, {"family_index", cfg.code_family_index}};
    return j.dump(2);
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path) {
    return parse_scenario_config(slurp(path));
}

SingleScenario parse_single_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    SingleScenario s;
    s.config = parse_scenario_config(json_text);
    if (j.contains("breakages")) {
        for (const auto& bj : j["breakages"]) s.breakages.push_back(breakage_from_json(bj));
    }
    if (j.contains("class")) {
        if (j.contains("breakages")) {
            throw ConfigurationError("give either \"class\" or \"breakages\", not both");
        }
        s.breakages = gen_class(j["class"].get<std::string>()).nominal_breakages();
    }
    s.soil = j.value("soil", s.soil);
    if (j.contains("snr_db")) {
        if (j["snr_db"].is_string()) {
            s.snr_db = std::numeric_limits<double>::infinity();  // "inf": noiseless
        } else {
            s.snr_db = j["snr_db"].get<double>();
        }
    }
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    return s;
}

SingleScenario load_single_scenario(const std::string& path) {
    return parse_single_scenario(slurp(path));
}

}  // namespace railpca
