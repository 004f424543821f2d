#include "railpca/features.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace railpca {

void FeatureVector::validate() const {
    if (dim() != mode.feature_count()) {
        throw ParameterError("feature vector has " + std::to_string(dim()) +
                             " components, expected " + std::to_string(mode.feature_count()) +
                             " for " + mode.str() + " injection");
    }
    for (int i = 0; i < dim(); ++i) {
        if (!std::isfinite(components[i]) || components[i] < 0.0) {
            throw ParameterError("feature component " + std::to_string(i + 1) +
                                 " (" + feature_symbol(mode, i) + ") is not a finite magnitude");
        }
    }
}

FeatureVector assemble_joint(const MeasuredMagnitudes& mags) {
    FeatureVector fv{InjectionMode::joint(), VectorXd(8)};
    for (int i = 0; i < 8; ++i) fv.components[i] = mags.values[i];
    fv.validate();
    return fv;
}

FeatureVector assemble_independent(int track, const MeasuredMagnitudes& mags) {
    if (track != 1 && track != 2) {
        throw ParameterError("assemble_independent: track must be 1 or 2, got " +
                             std::to_string(track));
    }
    const int ext = conductor_index(track, Rail::external);
    const int in = conductor_index(track, Rail::internal);
    FeatureVector fv{InjectionMode::independent(track), VectorXd(4)};
    fv.components[0] = mags.at(ext, 'e');
    fv.components[1] = mags.at(in, 'e');
    fv.components[2] = mags.at(in, 'r');
    fv.components[3] = mags.at(ext, 'r');
    fv.validate();
    return fv;
}

std::string feature_symbol(const InjectionMode& mode, int index) {
    if (index < 0 || index >= mode.feature_count()) {
        throw ParameterError("feature index " + std::to_string(index) + " out of range for " +
                             mode.str());
    }
    if (mode.kind == InjectionMode::Kind::joint) {
        return current_symbol(index % 4, index < 4 ? 'e' : 'r');
    }
    const int ext = conductor_index(mode.track, Rail::external);
    const int in = conductor_index(mode.track, Rail::internal);
    switch (index) {
        case 0: return current_symbol(ext, 'e');
        case 1: return current_symbol(in, 'e');
        case 2: return current_symbol(in, 'r');
        default: return current_symbol(ext, 'r');
    }
}

std::string feature_symbols_json(const InjectionMode& mode) {
    nlohmann::json j;
    j["injection"] = mode.str();
    nlohmann::json map = nlohmann::json::object();
    for (int i = 0; i < mode.feature_count(); ++i) {
        map["f" + std::to_string(i + 1)] = feature_symbol(mode, i);
    }
    j["components"] = map;
    return j.dump(2);
}

}  // namespace railpca
