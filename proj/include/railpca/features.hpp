#pragma once

#include <array>
#include <string>
#include <vector>

#include "railpca/types.hpp"

namespace railpca {

/// How the coded signal is driven into the section (Fig. 2 of the node
/// electronics): each track separately, or both tracks through one connection.
struct InjectionMode {
    enum class Kind { independent, joint };
    Kind kind = Kind::joint;
    int track = 0;  // meaningful for independent only

    static InjectionMode joint() { return {Kind::joint, 0}; }
    static InjectionMode independent(int track) {
        if (track != 1 && track != 2) throw ParameterError("injection track must be 1 or 2");
        return {Kind::independent, track};
    }

    int feature_count() const { return kind == Kind::joint ? 8 : 4; }
    bool operator==(const InjectionMode&) const = default;
    std::string str() const {
        return kind == Kind::joint ? "joint" : "independent" + std::to_string(track);
    }
};

/// The eight correlation magnitudes in measurement order:
/// emitter [1e, 1i, 2i, 2e] then receiver [1e, 1i, 2i, 2e].
/// Index = end * 4 + conductor, end 0 = emitter, 1 = receiver.
struct MeasuredMagnitudes {
    std::array<double, 8> values{};

    double at(int conductor, char end) const {
        return values[(end == 'r' ? 4 : 0) + conductor];
    }
};

/// Ordered, non-negative correlation-derived current values consumed by the
/// classifier. Joint order is the full 8-component measurement order;
/// independent order is [ext emitter, int emitter, int receiver, ext receiver]
/// for the driven track.
struct FeatureVector {
    InjectionMode mode;
    VectorXd components;

    int dim() const { return static_cast<int>(components.size()); }
    void validate() const;
};

/// Assembles the 8-dimensional joint-injection feature vector.
FeatureVector assemble_joint(const MeasuredMagnitudes& mags);

/// Assembles the 4-dimensional feature vector for one independently driven track.
FeatureVector assemble_independent(int track, const MeasuredMagnitudes& mags);

/// Symbol for one component of a feature vector, e.g. "I1e_e".
std::string feature_symbol(const InjectionMode& mode, int index);

/// JSON echo of the index -> current-symbol map, for documentation tooling.
std::string feature_symbols_json(const InjectionMode& mode);

}  // namespace railpca
