#include "railpca/detector.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace railpca {

namespace {

std::string rails_str(RailSel r) {
    switch (r) {
        case RailSel::internal: return "i";
        case RailSel::external: return "e";
        default: return "ie";
    }
}

std::string zone_str(Zone z) {
    switch (z) {
        case Zone::near_emitter: return "close to the emitting node";
        case Zone::intermediate: return "in the intermediate area";
        default: return "close to the receiving node";
    }
}

}  // namespace

std::string ClassLabel::id() const {
    if (phase == 1) {
        return "t" + std::to_string(track) + (broken ? "_br" : "_ok");
    }
    if (phase == 2) {
        return "t" + std::to_string(track) + "_" + rails_str(rails);
    }
    return to_breakage().label();
}

std::string ClassLabel::description() const {
    if (phase == 1) {
        return "Track " + std::to_string(track) + (broken ? " is broken" : " is not broken");
    }
    if (phase == 2) {
        switch (rails) {
            case RailSel::internal: return "Track " + std::to_string(track) + ", internal rail";
            case RailSel::external: return "Track " + std::to_string(track) + ", external rail";
            default: return "Track " + std::to_string(track) + ", both rails";
        }
    }
    return "Track " + std::to_string(track) + ", " +
           (rails == RailSel::internal ? "internal" : "external") + " rail, " + zone_str(zone);
}

ClassLabel ClassLabel::parse(const std::string& id) {
    for (const auto& list : {phase1_classes(), phase2_classes(), phase3_classes()}) {
        for (const auto& c : list) {
            if (c.id() == id) return c;
        }
    }
    throw ParameterError("unknown class id '" + id + "'");
}

const std::vector<ClassLabel>& ClassLabel::phase1_classes() {
    static const std::vector<ClassLabel> classes = [] {
        std::vector<ClassLabel> v;
        for (int t : {1, 2}) {
            for (bool br : {false, true}) {
                ClassLabel c;
                c.phase = 1;
                c.track = t;
                c.broken = br;
                v.push_back(c);
            }
        }
        return v;
    }();
    return classes;
}

const std::vector<ClassLabel>& ClassLabel::phase2_classes() {
    static const std::vector<ClassLabel> classes = [] {
        std::vector<ClassLabel> v;
        for (int t : {1, 2}) {
            for (RailSel r : {RailSel::internal, RailSel::external, RailSel::both}) {
                ClassLabel c;
                c.phase = 2;
                c.track = t;
                c.rails = r;
                v.push_back(c);
            }
        }
        return v;
    }();
    return classes;
}

const std::vector<ClassLabel>& ClassLabel::phase3_classes() {
    // Table 6 / Fig. 3 order: zone-major, then (1,e), (1,i), (2,i), (2,e).
    static const std::vector<ClassLabel> classes = [] {
        std::vector<ClassLabel> v;
        for (Zone z : {Zone::near_emitter, Zone::intermediate, Zone::near_receiver}) {
            for (int c4 = 0; c4 < 4; ++c4) {
                ClassLabel c;
                c.phase = 3;
                c.track = conductor_track(c4);
                c.rails = conductor_rail(c4) == Rail::internal ? RailSel::internal
                                                               : RailSel::external;
                c.zone = z;
                v.push_back(c);
            }
        }
        return v;
    }();
    return classes;
}

ClassLabel ClassLabel::from_breakage(const BreakageSpec& spec) {
    ClassLabel c;
    c.phase = 3;
    c.track = spec.track;
    c.rails = spec.rail == Rail::internal ? RailSel::internal : RailSel::external;
    c.zone = static_cast<Zone>(spec.quarter);
    return c;
}

BreakageSpec ClassLabel::to_breakage() const {
    if (phase != 3 || rails == RailSel::both) {
        throw ParameterError("only phase-3 single-rail classes map to a breakage");
    }
    return {track, rails == RailSel::internal ? Rail::internal : Rail::external,
            static_cast<int>(zone)};
}

Selection select_class(const std::vector<ClassScore>& scores, const std::vector<int>& eligible) {
    std::vector<int> idx = eligible;
    if (idx.empty()) {
        idx.resize(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) idx[i] = static_cast<int>(i);
    }
    if (idx.size() < 2) {
        throw ParameterError("select_class: needs at least two candidate scores");
    }
    int winner = idx.front();
    for (int i : idx) {
        if (scores.at(i).reconstruction_error < scores.at(winner).reconstruction_error) {
            winner = i;
        }
    }
    double best_loser = std::numeric_limits<double>::infinity();
    bool tie = false;
    for (int i : idx) {
        if (i == winner) continue;
        const double e = scores.at(i).reconstruction_error;
        if (e == scores.at(winner).reconstruction_error) tie = true;
        best_loser = std::min(best_loser, e);
    }
    Selection sel;
    sel.winner = winner;
    sel.tie = tie;
    const double win = scores.at(winner).reconstruction_error;
    if (best_loser > 0.0) {
        sel.margin = win / best_loser;
    } else {
        sel.margin = win == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return sel;
}

Phase1Result phase1_decide(const std::vector<ClassScore>& four_scores) {
    if (four_scores.size() != 4) {
        throw ParameterError("phase1_decide: expected 4 scores (Table 4 order)");
    }
    Phase1Result r;
    r.track1.scores = {four_scores[0], four_scores[1]};
    r.track1.eligible = {0, 1};
    r.track1.selection = select_class(r.track1.scores);
    r.track2.scores = {four_scores[2], four_scores[3]};
    r.track2.eligible = {0, 1};
    r.track2.selection = select_class(r.track2.scores);

    const bool t1_broken = r.track1.selection.winner == 1;
    const bool t2_broken = r.track2.selection.winner == 1;
    if (t1_broken && t2_broken) {
        r.outcome = Phase1Outcome::both_broken;
    } else if (t1_broken) {
        r.outcome = Phase1Outcome::track1_broken;
    } else if (t2_broken) {
        r.outcome = Phase1Outcome::track2_broken;
    } else {
        r.outcome = Phase1Outcome::no_breakage;
    }
    return r;
}

PhaseDecision phase2_decide(const std::vector<ClassScore>& six_scores, int broken_track) {
    if (six_scores.size() != 6) {
        throw ParameterError("phase2_decide: expected 6 scores (Table 5 order)");
    }
    if (broken_track != 1 && broken_track != 2) {
        throw ParameterError("phase2_decide: broken track must be 1 or 2");
    }
    PhaseDecision d;
    d.scores = six_scores;
    // Decision restricted to the broken track's classes; the healthy track's
    // results are computed but discarded.
    d.eligible = broken_track == 1 ? std::vector<int>{0, 1, 2} : std::vector<int>{3, 4, 5};
    d.selection = select_class(d.scores, d.eligible);
    return d;
}

PhaseDecision phase3_decide(const std::vector<ClassScore>& twelve_scores) {
    if (twelve_scores.size() != 12) {
        throw ParameterError("phase3_decide: expected 12 scores (Table 6 order)");
    }
    PhaseDecision d;
    d.scores = twelve_scores;
    d.eligible.resize(12);
    for (int i = 0; i < 12; ++i) d.eligible[i] = i;
    d.selection = select_class(d.scores, d.eligible);
    return d;
}

void ModelBundle::validate_complete() const {
    auto check = [](const std::vector<PcaClassModel>& models,
                    const std::vector<ClassLabel>& classes) {
        for (std::size_t i = 0; i < classes.size(); ++i) {
            const std::string want = classes[i].id();
            if (i >= models.size() || models[i].class_label != want) {
                throw ConfigurationError("model bundle is missing class '" + want + "'");
            }
        }
    };
    check(phase1, ClassLabel::phase1_classes());
    check(phase2, ClassLabel::phase2_classes());
    check(phase3, ClassLabel::phase3_classes());
}

std::vector<PcaClassModel>& ModelBundle::phase(int p) {
    switch (p) {
        case 1: return phase1;
        case 2: return phase2;
        case 3: return phase3;
        default: throw ParameterError("phase must be 1, 2 or 3");
    }
}

const std::vector<PcaClassModel>& ModelBundle::phase(int p) const {
    return const_cast<ModelBundle*>(this)->phase(p);
}

namespace {

std::vector<ClassScore> score_all(const std::vector<PcaClassModel>& models,
                                  const std::vector<ClassLabel>& classes,
                                  const FeatureVector& x) {
    if (models.size() != classes.size()) {
        throw ConfigurationError("model set has " + std::to_string(models.size()) +
                                 " classes, expected " + std::to_string(classes.size()));
    }
    std::vector<ClassScore> scores;
    scores.reserve(models.size());
    for (const auto& m : models) scores.push_back(score(m, x.components));
    return scores;
}

}  // namespace

Phase1Result run_phase1(const std::vector<PcaClassModel>& phase1_models, const FeatureVector& x1,
                        const FeatureVector& x2) {
    if (x1.mode != InjectionMode::independent(1) || x2.mode != InjectionMode::independent(2)) {
        throw ParameterError("run_phase1: expects the two independent-injection vectors");
    }
    const auto& classes = ClassLabel::phase1_classes();
    if (phase1_models.size() != 4) {
        throw ConfigurationError("phase-1 model set must contain 4 classes");
    }
    std::vector<ClassScore> scores(4);
    scores[0] = score(phase1_models[0], x1.components);
    scores[1] = score(phase1_models[1], x1.components);
    scores[2] = score(phase1_models[2], x2.components);
    scores[3] = score(phase1_models[3], x2.components);
    for (int i = 0; i < 4; ++i) scores[i].class_label = classes[i].id();
    return phase1_decide(scores);
}

PhaseDecision run_phase2(const std::vector<PcaClassModel>& phase2_models, const FeatureVector& x,
                         int broken_track) {
    return phase2_decide(score_all(phase2_models, ClassLabel::phase2_classes(), x), broken_track);
}

PhaseDecision run_phase3(const std::vector<PcaClassModel>& phase3_models, const FeatureVector& x) {
    return phase3_decide(score_all(phase3_models, ClassLabel::phase3_classes(), x));
}

DetectionReport detect(const ModelBundle& bundle, const Measurements& measurements) {
    bundle.validate_complete();

    DetectionReport report;
    report.phase1 = run_phase1(bundle.phase1, measurements.track1_independent,
                               measurements.track2_independent);
    auto flag_t2 = [&](const ClassScore& s) {
        if (s.t_squared > s.t2_threshold) report.t2_flags.push_back(s.class_label);
    };
    flag_t2(report.phase1.track1.winner());
    flag_t2(report.phase1.track2.winner());

    const Phase1Outcome outcome = report.phase1.outcome;
    if (outcome == Phase1Outcome::no_breakage || outcome == Phase1Outcome::both_broken) {
        report.terminal_phase = 1;
        report.final_class = outcome == Phase1Outcome::no_breakage ? "no-breakage" : "both-broken";
        report.confidence_margin =
            std::max(report.phase1.track1.selection.margin, report.phase1.track2.selection.margin);
        report.high_confidence = report.confidence_margin <= kConfidenceMarginThreshold;
        return report;
    }

    const int broken_track = outcome == Phase1Outcome::track1_broken ? 1 : 2;
    report.phase2 = run_phase2(bundle.phase2, measurements.joint, broken_track);
    flag_t2(report.phase2->winner());
    const ClassLabel rail_class = ClassLabel::phase2_classes().at(report.phase2->selection.winner);

    if (rail_class.rails == RailSel::both) {
        report.terminal_phase = 2;
        report.final_class = rail_class.id();
        report.confidence_margin = report.phase2->selection.margin;
        report.high_confidence = report.confidence_margin <= kConfidenceMarginThreshold;
        return report;
    }

    report.phase3 = run_phase3(bundle.phase3, measurements.joint);
    flag_t2(report.phase3->winner());
    const ClassLabel zone_class = ClassLabel::phase3_classes().at(report.phase3->selection.winner);

    report.terminal_phase = 3;
    report.final_class = zone_class.id();
    report.confidence_margin = report.phase3->selection.margin;
    // The winner is reported even when it disagrees with the earlier phases;
    // the disagreement is only flagged.
    report.consistent = zone_class.track == rail_class.track && zone_class.rails == rail_class.rails;
    report.high_confidence =
        report.confidence_margin <= kConfidenceMarginThreshold && report.consistent;
    return report;
}

namespace {

nlohmann::json decision_json(const PhaseDecision& d, const std::vector<ClassLabel>& classes) {
    nlohmann::json scores = nlohmann::json::array();
    for (std::size_t i = 0; i < d.scores.size(); ++i) {
        const auto& s = d.scores[i];
        scores.push_back({{"class", s.class_label.empty() ? classes.at(i).id() : s.class_label},
                          {"reconstruction_error", s.reconstruction_error},
                          {"t_squared", s.t_squared},
                          {"t2_threshold", s.t2_threshold}});
    }
    return {{"scores", scores},
            {"winner", d.scores.at(d.selection.winner).class_label},
            {"margin", d.selection.margin},
            {"tie", d.selection.tie}};
}

std::string outcome_str(Phase1Outcome o) {
    switch (o) {
        case Phase1Outcome::no_breakage: return "no-breakage";
        case Phase1Outcome::track1_broken: return "track-1-broken";
        case Phase1Outcome::track2_broken: return "track-2-broken";
        default: return "both-broken";
    }
}

}  // namespace

std::string DetectionReport::to_json() const {
    nlohmann::json j;
    j["phase1"] = {{"track1", decision_json(phase1.track1, ClassLabel::phase1_classes())},
                   {"track2", decision_json(phase1.track2, ClassLabel::phase1_classes())},
                   {"outcome", outcome_str(phase1.outcome)}};
    if (phase2) j["phase2"] = decision_json(*phase2, ClassLabel::phase2_classes());
    if (phase3) j["phase3"] = decision_json(*phase3, ClassLabel::phase3_classes());
    j["terminal_phase"] = terminal_phase;
    j["final_class"] = final_class;
    j["confidence_margin"] = confidence_margin;
    j["high_confidence"] = high_confidence;
    j["consistent"] = consistent;
    j["t2_flags"] = t2_flags;
    return j.dump(2);
}

namespace {

void render_decision(std::ostringstream& out, const std::string& title, const PhaseDecision& d) {
    out << title << "\n";
    for (std::size_t i = 0; i < d.scores.size(); ++i) {
        const auto& s = d.scores[i];
        out << "  " << (static_cast<int>(i) == d.selection.winner ? "->" : "  ") << " "
            << s.class_label;
        out << std::string(s.class_label.size() < 10 ? 10 - s.class_label.size() : 1, ' ');
        out << "eps=" << s.reconstruction_error << "  T2=" << s.t_squared
            << (s.t_squared > s.t2_threshold ? " (over threshold)" : "") << "\n";
    }
}

}  // namespace

std::string DetectionReport::to_text() const {
    std::ostringstream out;
    render_decision(out, "Phase 1, track 1:", phase1.track1);
    render_decision(out, "Phase 1, track 2:", phase1.track2);
    out << "Phase 1 outcome: " << outcome_str(phase1.outcome) << "\n";
    if (phase2) render_decision(out, "Phase 2 (rail):", *phase2);
    if (phase3) render_decision(out, "Phase 3 (zone):", *phase3);
    out << "Final: " << final_class << " (terminal phase " << terminal_phase << ", margin "
        << confidence_margin << (high_confidence ? ", high confidence" : ", LOW CONFIDENCE")
        << (consistent ? "" : ", INCONSISTENT") << ")\n";
    if (!t2_flags.empty()) {
        out << "T2 over threshold for:";
        for (const auto& f : t2_flags) out << " " << f;
        out << "\n";
    }
    return out.str();
}

}  // namespace railpca
