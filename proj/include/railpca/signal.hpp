#pragma once

#include <cstdint>
#include <vector>

#include "railpca/features.hpp"
#include "railpca/kasami.hpp"
#include "railpca/netmodel.hpp"

namespace railpca {

/// Noisy chip streams for the measured currents of one transmission.
/// Stream order matches the feature order of the injection mode
/// (8 streams for joint, 4 for independent).
struct RawMeasurement {
    InjectionMode injection;
    int code_degree = 0;
    int code_family_index = 0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> streams;
};

/// Solves the section, modulates each measured current chip-by-chip with the
/// code, and adds white Gaussian noise scaled so the per-stream SNR over one
/// code period equals snr_db. Deterministic in (model, injection, code, snr, seed);
/// snr_db = +infinity disables the noise.
RawMeasurement transmit_measure(const SectionModel& model, const InjectionMode& injection,
                                const KasamiCode& code, double snr_db, std::uint64_t seed);

/// Zero-lag correlation of each stream against the code; components are the
/// correlation magnitudes (process gain = code period).
FeatureVector correlate(const RawMeasurement& raw, const KasamiCode& code);

/// transmit_measure followed by correlate.
FeatureVector simulate_features(const SectionModel& model, const InjectionMode& injection,
                                const KasamiCode& code, double snr_db, std::uint64_t seed);

}  // namespace railpca
