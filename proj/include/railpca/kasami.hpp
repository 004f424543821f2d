#pragma once

#include <cstdint>
#include <vector>

#include "railpca/types.hpp"

namespace railpca {

/// One member of a small-set Kasami family, chips mapped to +/-1.
struct KasamiCode {
    int degree = 0;        // even n, period 2^n - 1
    int family_index = 0;  // 0 .. 2^(n/2) - 1
    std::vector<std::int8_t> chips;

    int period() const { return static_cast<int>(chips.size()); }
};

/// Generates the small Kasami set for an even degree in [4, 16]:
/// 2^(n/2) codes of period 2^n - 1, built from an m-sequence and its
/// decimation by 2^(n/2) + 1. Codes 0 and 1 are the ones assigned to the
/// two emitting nodes.
std::vector<KasamiCode> kasami_small_set(int degree);

/// Periodic cross-correlation at the given shift: sum_i a[i] * b[(i+shift) mod N].
double periodic_correlation(const KasamiCode& a, const KasamiCode& b, int shift);

}  // namespace railpca
