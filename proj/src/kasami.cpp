#include "railpca/kasami.hpp"

#include <array>

namespace railpca {
namespace {

// Primitive polynomials over GF(2), bitmask of coefficients below x^n.
// E.g. degree 8: x^8 + x^4 + x^3 + x^2 + 1 -> 0x1D.
int feedback_taps(int degree) {
    switch (degree) {
        case 4: return 0x03;       // x^4 + x + 1
        case 6: return 0x03;       // x^6 + x + 1
        case 8: return 0x1D;       // x^8 + x^4 + x^3 + x^2 + 1
        case 10: return 0x09;      // x^10 + x^3 + 1
        case 12: return 0x53;      // x^12 + x^6 + x^4 + x + 1
        case 14: return 0x0443;    // x^14 + x^10 + x^6 + x + 1
        case 16: return 0x100B;    // x^16 + x^12 + x^3 + x + 1
        default: return 0;
    }
}

std::vector<int> m_sequence(int degree) {
    const int taps = feedback_taps(degree);
    const int period = (1 << degree) - 1;
    std::vector<int> bits(static_cast<std::size_t>(period) + degree);
    bits[degree - 1] = 1;  // any nonzero fill
    for (int t = 0; t + degree < static_cast<int>(bits.size()); ++t) {
        int fb = 0;
        for (int k = 0; k < degree; ++k) {
            if (taps >> k & 1) fb ^= bits[t + k];
        }
        bits[t + degree] = fb;
    }
    bits.resize(period);
    return bits;
}

}  // namespace

std::vector<KasamiCode> kasami_small_set(int degree) {
    if (degree < 4 || degree > 16 || degree % 2 != 0) {
        throw ParameterError("kasami_small_set: degree must be even and in [4, 16], got " +
                             std::to_string(degree));
    }
    const int period = (1 << degree) - 1;
    const int half = 1 << (degree / 2);
    const int decimation = half + 1;

    const std::vector<int> u = m_sequence(degree);
    // w = u decimated by 2^(n/2)+1; its period divides 2^(n/2)-1.
    std::vector<int> w(period);
    for (int i = 0; i < period; ++i) {
        w[i] = u[static_cast<std::size_t>(static_cast<long long>(decimation) * i % period)];
    }

    std::vector<KasamiCode> set;
    set.reserve(half);
    for (int idx = 0; idx < half; ++idx) {
        KasamiCode code;
        code.degree = degree;
        code.family_index = idx;
        code.chips.resize(period);
        for (int i = 0; i < period; ++i) {
            int bit = u[i];
            if (idx > 0) bit ^= w[(i + idx - 1) % period];
            code.chips[i] = bit ? -1 : 1;
        }
        set.push_back(std::move(code));
    }
    return set;
}

double periodic_correlation(const KasamiCode& a, const KasamiCode& b, int shift) {
    if (a.period() != b.period()) {
        throw ParameterError("periodic_correlation: period mismatch");
    }
    const int n = a.period();
    shift = ((shift % n) + n) % n;
    long long acc = 0;
    for (int i = 0; i < n; ++i) {
        acc += static_cast<long long>(a.chips[i]) * b.chips[(i + shift) % n];
    }
    return static_cast<double>(acc);
}

}  // namespace railpca
