#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "railpca/kasami.hpp"

using namespace railpca;

TEST_CASE("small set size and period") {
    SUBCASE("degree 4: 4 codes of period 15") {
        const auto set = kasami_small_set(4);
        CHECK(set.size() == 4);
        for (const auto& c : set) CHECK(c.period() == 15);
    }
    SUBCASE("degree 8: 16 codes of period 255") {
        const auto set = kasami_small_set(8);
        CHECK(set.size() == 16);
        for (const auto& c : set) CHECK(c.period() == 255);
    }
}

TEST_CASE("odd or out-of-range degree is rejected") {
    CHECK_THROWS_AS(kasami_small_set(5), ParameterError);
    CHECK_THROWS_AS(kasami_small_set(2), ParameterError);
    CHECK_THROWS_AS(kasami_small_set(18), ParameterError);
}

TEST_CASE("chips are +/-1 and balanced to within 1") {
    for (int degree : {4, 6, 8}) {
        CAPTURE(degree);
        for (const auto& code : kasami_small_set(degree)) {
            int sum = 0;
            for (auto c : code.chips) {
                CHECK((c == 1 || c == -1));
                sum += c;
            }
            CHECK(std::abs(sum) <= 1);
        }
    }
}

TEST_CASE("degree 8 zero-lag autocorrelation is 255") {
    const auto set = kasami_small_set(8);
    for (const auto& code : set) {
        CHECK(periodic_correlation(code, code, 0) == doctest::Approx(255.0));
    }
}

TEST_CASE("degree 8 cross-correlation bound: |theta| <= 17 at every shift") {
    // Brute force over all pairs and all 255 relative shifts.
    const auto set = kasami_small_set(8);
    double worst = 0.0;
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            for (int shift = 0; shift < 255; ++shift) {
                worst = std::max(worst, std::abs(periodic_correlation(set[a], set[b], shift)));
            }
        }
    }
    CHECK(worst <= 17.0);
    CHECK(worst > 0.0);
}

TEST_CASE("off-peak autocorrelation is also bounded for the small set") {
    const auto set = kasami_small_set(8);
    for (const auto& code : set) {
        for (int shift = 1; shift < 255; ++shift) {
            CHECK(std::abs(periodic_correlation(code, code, shift)) <= 17.0);
        }
    }
}

TEST_CASE("codes are distinct") {
    const auto set = kasami_small_set(8);
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = a + 1; b < set.size(); ++b) {
            CHECK(set[a].chips != set[b].chips);
        }
    }
}
