#include "railpca/signal.hpp"

#include <cmath>

#include "railpca/rng.hpp"

namespace railpca {

RawMeasurement transmit_measure(const SectionModel& model, const InjectionMode& injection,
                                const KasamiCode& code, double snr_db, std::uint64_t seed) {
    const RailCurrents currents = solve_currents(model, injection);
    const MeasuredMagnitudes mags = currents.magnitudes();

    std::vector<double> stream_mags;
    if (injection.kind == InjectionMode::Kind::joint) {
        stream_mags.assign(mags.values.begin(), mags.values.end());
    } else {
        const int ext = conductor_index(injection.track, Rail::external);
        const int in = conductor_index(injection.track, Rail::internal);
        stream_mags = {mags.at(ext, 'e'), mags.at(in, 'e'), mags.at(in, 'r'), mags.at(ext, 'r')};
    }

    RawMeasurement raw;
    raw.injection = injection;
    raw.code_degree = code.degree;
    raw.code_family_index = code.family_index;
    raw.snr_db = snr_db;
    raw.seed = seed;

    const bool noiseless = std::isinf(snr_db) && snr_db > 0;
    const int period = code.period();
    raw.streams.reserve(stream_mags.size());
    for (std::size_t k = 0; k < stream_mags.size(); ++k) {
        const double mag = stream_mags[k];
        // Per-stream SNR: chip signal power is mag^2, so sigma = mag * 10^(-snr/20).
        const double sigma = noiseless ? 0.0 : mag * std::pow(10.0, -snr_db / 20.0);
        SplitMix64 rng(derive_seed(seed, 0x57u, k));
        std::vector<double> stream(period);
        for (int i = 0; i < period; ++i) {
            stream[i] = mag * code.chips[i] + (sigma > 0.0 ? sigma * rng.next_gaussian() : 0.0);
        }
        raw.streams.push_back(std::move(stream));
    }
    return raw;
}

FeatureVector correlate(const RawMeasurement& raw, const KasamiCode& code) {
    const int period = code.period();
    const int count = raw.injection.feature_count();
    if (static_cast<int>(raw.streams.size()) != count) {
        throw ParameterError("correlate: expected " + std::to_string(count) + " streams, got " +
                             std::to_string(raw.streams.size()));
    }
    FeatureVector fv{raw.injection, VectorXd(count)};
    for (int k = 0; k < count; ++k) {
        if (static_cast<int>(raw.streams[k].size()) != period) {
            throw ParameterError("correlate: stream " + std::to_string(k + 1) + " has length " +
                                 std::to_string(raw.streams[k].size()) + ", code period is " +
                                 std::to_string(period));
        }
        double acc = 0.0;
        for (int i = 0; i < period; ++i) acc += raw.streams[k][i] * code.chips[i];
        fv.components[k] = std::abs(acc);
    }
    fv.validate();
    return fv;
}

FeatureVector simulate_features(const SectionModel& model, const InjectionMode& injection,
                                const KasamiCode& code, double snr_db, std::uint64_t seed) {
    return correlate(transmit_measure(model, injection, code, snr_db, seed), code);
}

}  // namespace railpca
