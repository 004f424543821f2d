#pragma once

#include <optional>
#include <string>
#include <vector>

#include "railpca/features.hpp"
#include "railpca/netmodel.hpp"
#include "railpca/pca.hpp"

namespace railpca {

/// Breakage zone along the section, by quarter of the 8 km length.
enum class Zone { near_emitter = 1, intermediate = 2, near_receiver = 3 };

/// Which rail(s) of a track are broken.
enum class RailSel { internal, external, both };

/// Hierarchical class label across the three detection phases.
///   phase 1: per-track OK / BR            (4 classes)
///   phase 2: broken rail i / e / ie       (6 classes)
///   phase 3: rail + zone                  (12 classes, hardware-simulator labels)
struct ClassLabel {
    int phase = 1;
    int track = 1;
    bool broken = false;        // phase 1
    RailSel rails = RailSel::internal;  // phases 2-3 (phase 3 never 'both')
    Zone zone = Zone::near_emitter;     // phase 3

    /// Canonical id: "t1_ok", "t1_ie", "R1e3/4", ...
    std::string id() const;
    std::string description() const;
    static ClassLabel parse(const std::string& id);

    /// Enumeration orders follow the paper's class tables.
    static const std::vector<ClassLabel>& phase1_classes();
    static const std::vector<ClassLabel>& phase2_classes();
    static const std::vector<ClassLabel>& phase3_classes();

    static ClassLabel from_breakage(const BreakageSpec& spec);
    BreakageSpec to_breakage() const;  // phase 3 only

    bool operator==(const ClassLabel&) const = default;
};

/// Result of an argmin decision over a list of class scores.
struct Selection {
    int winner = -1;
    double margin = 0.0;  // eps_winner / min eps over losers
    bool tie = false;
};

/// Picks the minimum reconstruction error among the eligible indices
/// (all of them when eligible is empty). Ties break to the earliest
/// enumeration index and are flagged.
Selection select_class(const std::vector<ClassScore>& scores,
                       const std::vector<int>& eligible = {});

/// One phase's scores plus its restricted decision.
struct PhaseDecision {
    std::vector<ClassScore> scores;  // enumeration order of the phase
    std::vector<int> eligible;       // indices the decision was restricted to
    Selection selection;

    const ClassScore& winner() const { return scores.at(selection.winner); }
};

enum class Phase1Outcome { no_breakage, track1_broken, track2_broken, both_broken };

struct Phase1Result {
    PhaseDecision track1;  // scores over {t_OK, t_BR}
    PhaseDecision track2;
    Phase1Outcome outcome = Phase1Outcome::no_breakage;
};

/// Decision cores operating on already-computed scores; the run_* operations
/// compute scores from models and then delegate here.
Phase1Result phase1_decide(const std::vector<ClassScore>& four_scores);
PhaseDecision phase2_decide(const std::vector<ClassScore>& six_scores, int broken_track);
PhaseDecision phase3_decide(const std::vector<ClassScore>& twelve_scores);

/// Trained models for every class of the detection pipeline, in enumeration
/// order per phase.
struct ModelBundle {
    /// Identity of every training row, kept for train/test leakage checks.
    struct Provenance {
        struct Triple {
            std::string class_id;
            double snr_db = 0.0;
            std::uint64_t seed = 0;
            auto operator<=>(const Triple&) const = default;
        };
        std::vector<Triple> rows;
        std::string soil;
    };

    std::vector<PcaClassModel> phase1;
    std::vector<PcaClassModel> phase2;
    std::vector<PcaClassModel> phase3;
    Provenance provenance;

    /// Throws ConfigurationError naming the missing class unless all 22
    /// models are present in enumeration order.
    void validate_complete() const;
    std::vector<PcaClassModel>& phase(int p);
    const std::vector<PcaClassModel>& phase(int p) const;
};

Phase1Result run_phase1(const std::vector<PcaClassModel>& phase1_models, const FeatureVector& x1,
                        const FeatureVector& x2);
PhaseDecision run_phase2(const std::vector<PcaClassModel>& phase2_models, const FeatureVector& x,
                         int broken_track);
PhaseDecision run_phase3(const std::vector<PcaClassModel>& phase3_models, const FeatureVector& x);

/// The three measurements one detection pass consumes.
struct Measurements {
    FeatureVector track1_independent;
    FeatureVector track2_independent;
    FeatureVector joint;
};

/// Full pipeline output: every computed score, the terminal decision, the
/// confidence margin, T-squared flags, and the phase-consistency check.
struct DetectionReport {
    Phase1Result phase1;
    std::optional<PhaseDecision> phase2;
    std::optional<PhaseDecision> phase3;
    int terminal_phase = 1;
    std::string final_class;       // "no-breakage", "both-broken", or a class id
    double confidence_margin = 0.0;
    bool high_confidence = true;   // margin <= 0.05 at the terminal decision
    bool consistent = true;        // phase-3 winner agrees with phase-1/2 prior
    std::vector<std::string> t2_flags;

    std::string to_json() const;
    std::string to_text() const;
};

/// Runs the three phases with their termination rules over one measurement set.
DetectionReport detect(const ModelBundle& bundle, const Measurements& measurements);

/// Margin threshold below which a classification counts as high-confidence.
inline constexpr double kConfidenceMarginThreshold = 0.05;

}  // namespace railpca
