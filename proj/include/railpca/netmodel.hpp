#pragma once

#include <array>
#include <string>
#include <vector>

#include "railpca/features.hpp"
#include "railpca/types.hpp"

namespace railpca {

/// Raised when the topology leaves the source without any return path.
struct FloatingSubnetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when the nodal system cannot be solved reliably.
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-kilometre electrical description of one track-section segment.
/// All four conductors share the same series parameters; coupling is split
/// into the intra-track and inter-track mutual inductances.
struct SegmentParams {
    double length_km = 2.0;
    double r_per_km = 0.0;            // Ohm/km series resistance per rail
    double l_per_km = 0.0;            // H/km series self-inductance per rail
    double m_intra_per_km = 0.0;      // H/km mutual between rails of one track
    double m_inter_per_km = 0.0;      // H/km mutual between rails of different tracks
    double c_rail_rail_per_km = 0.0;  // F/km shunt capacitance between rails of one track
    double g_rail_rail_per_km = 0.0;  // S/km shunt conductance between rails of one track
    double c_rail_gnd_per_km = 0.0;   // F/km rail-to-ground shunt capacitance
    double g_rail_gnd_per_km = 0.0;   // S/km rail-to-ground shunt conductance

    /// 4x4 per-km inductance matrix in conductor order [1e, 1i, 2i, 2e].
    Eigen::Matrix4d inductance_per_km() const;

    /// True when the coupled inductor block is positive definite.
    bool is_passive() const;

    void validate() const;
};

/// Soil-moisture preset scaling the shunt conductances.
struct SoilPreset {
    std::string name = "dry";
    double water_content_pct = 0.1;
    double g_scale = 1.0;

    static SoilPreset dry();
    static SoilPreset wet();
    void validate() const;
};

/// An open-circuit breakage at a segment boundary: 2, 4 or 6 km from the
/// emitting node (quarters 1..3 of the 8 km section).
struct BreakageSpec {
    int track = 1;
    Rail rail = Rail::external;
    int quarter = 1;

    /// Label in the hardware-simulator convention, e.g. "R1e3/4".
    std::string label() const;
    void validate(int segment_count = 4) const;

    bool operator==(const BreakageSpec&) const = default;
};

/// Electrical model of one emitter-to-receiver cell: a ladder of coupled
/// four-conductor pi-sections with insertable breakages.
///
/// At the emitter the driven rails are bonded to the two source terminals and
/// the source is an ideal voltage behind a series impedance; at the receiver
/// every rail is terminated into a common measurement bus through the
/// per-branch termination impedance. Measured currents are the series rail
/// currents of the boundary sections.
struct SectionModel {
    std::vector<SegmentParams> segments;  // pipeline models use 4 x 2 km
    std::vector<BreakageSpec> breakages;
    double frequency_hz = 800.0;
    InjectionMode injection = InjectionMode::joint();
    double source_voltage = 10.0;
    Complex source_impedance{10.0, 0.0};
    Complex termination_impedance{10.0, 0.0};
    int sections_per_segment = 1;  // finer pi-section discretisation if > 1

    /// Structural checks that every buildable model must satisfy.
    void validate_basic() const;

    /// Full pipeline contract: exactly 4 segments totalling 8 km.
    void validate() const;

    /// Placeholder electrical defaults (the source papers do not publish
    /// R-L-C-G values); see configs/default_scenario.json for the same data.
    static SectionModel default_model();
};

/// Returns a copy with both shunt conductances scaled by the preset.
SectionModel apply_soil(const SectionModel& model, const SoilPreset& preset);

/// The eight series rail currents in measurement order:
/// emitter [1e, 1i, 2i, 2e] then receiver [1e, 1i, 2i, 2e].
struct RailCurrents {
    std::array<Complex, 8> phasors{};

    Complex at(int conductor, char end) const {
        return phasors[(end == 'r' ? 4 : 0) + conductor];
    }
    MeasuredMagnitudes magnitudes() const;
};

/// Assembled modified-nodal-analysis system. Unknowns are the node voltages
/// followed by one current per explicit branch (source, emitter bonds,
/// receiver ports). Branch rows read V_p - V_q - Z I = emf.
struct AdmittanceSystem {
    struct Branch {
        std::string name;
        int index;   // position in the branch list; row = node_count + index
        int node_p;  // -1 = ground
        int node_q;
        Complex impedance;
        Complex emf;
    };

    MatrixXcd matrix;
    VectorXcd rhs;
    int node_count = 0;
    std::vector<std::string> node_names;
    std::vector<Branch> branches;

    // Boundary-section data for current extraction.
    Eigen::Matrix4cd emitter_block;
    Eigen::Matrix4cd receiver_block;
    std::array<int, 4> emitter_from{}, emitter_to{};
    std::array<int, 4> receiver_from{}, receiver_to{};

    int branch_row(int branch_index) const { return node_count + branch_index; }
    int size() const { return static_cast<int>(matrix.rows()); }
    const Branch* find_branch(const std::string& name) const;
};

/// Builds the complex node-admittance system for the model, honouring its
/// injection descriptor and breakage list. Floating passive stubs are pinned
/// to the reference internally; a source with no return path raises
/// FloatingSubnetworkError naming the isolated nodes.
AdmittanceSystem build_admittance(const SectionModel& model);

/// Dense complex LU solve with a partial-pivot magnitude check (tolerance
/// 1e-12 relative); raises IllConditionedError with a condition estimate.
VectorXcd solve_system(const AdmittanceSystem& sys);

/// Reads the boundary-section series currents out of a solution vector.
RailCurrents extract_currents(const AdmittanceSystem& sys, const VectorXcd& solution);

/// Convenience wrapper: build, solve and extract with the given injection.
RailCurrents solve_currents(const SectionModel& model, const InjectionMode& injection);

/// Complex power delivered by the source for a solved system (P + jQ).
Complex source_power(const AdmittanceSystem& sys, const VectorXcd& solution);

}  // namespace railpca
