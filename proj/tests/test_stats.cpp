#include <doctest.h>

#include <cmath>
#include <functional>

#include "railpca/stats.hpp"

using namespace railpca;

namespace {

// Independent oracle: direct quadrature of the F density plus bisection.
// Shares no code with the continued-fraction implementation under test.

double f_pdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    const double log_num = 0.5 * (d1 * std::log(d1 * x) + d2 * std::log(d2) -
                                  (d1 + d2) * std::log(d1 * x + d2));
    const double log_beta =
        std::lgamma(d1 / 2.0) + std::lgamma(d2 / 2.0) - std::lgamma((d1 + d2) / 2.0);
    return std::exp(log_num - log_beta) / x;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b) {
    double prev = simpson(f, a, b, 64);
    for (int n = 128; n <= 65536; n *= 2) {
        const double cur = simpson(f, a, b, n);
        if (std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

double f_cdf_oracle(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return adaptive_simpson([&](double t) { return f_pdf(t, d1, d2); }, 0.0, x);
}

double f_quantile_oracle(double p, double d1, double d2) {
    double lo = 0.0, hi = 1.0;
    while (f_cdf_oracle(hi, d1, d2) < p) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f_cdf_oracle(mid, d1, d2) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("F quantile matches the quadrature oracle") {
    struct Case {
        double p, d1, d2;
    };
    const Case cases[] = {
        {0.95, 4, 496}, {0.95, 4, 16}, {0.99, 2, 30}, {0.90, 8, 492}, {0.50, 3, 7},
        {0.95, 1, 100},
    };
    for (const auto& c : cases) {
        CAPTURE(c.p);
        CAPTURE(c.d1);
        CAPTURE(c.d2);
        const double got = f_quantile(c.p, c.d1, c.d2);
        const double want = f_quantile_oracle(c.p, c.d1, c.d2);
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("F CDF and quantile are inverse functions") {
    for (double p : {0.1, 0.5, 0.9, 0.95, 0.99}) {
        const double x = f_quantile(p, 4.0, 496.0);
        CHECK(f_cdf(x, 4.0, 496.0) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("quantile is monotone in the confidence level") {
    const double q90 = f_quantile(0.90, 4, 496);
    const double q95 = f_quantile(0.95, 4, 496);
    const double q99 = f_quantile(0.99, 4, 496);
    CHECK(q90 < q95);
    CHECK(q95 < q99);
}

TEST_CASE("F(1, huge) at 95% approaches the chi-square(1) quantile 3.841") {
    const double q = f_quantile(0.95, 1, 2e6);
    CHECK(q == doctest::Approx(3.8415).epsilon(0.01));
}

TEST_CASE("domain errors") {
    CHECK_THROWS(f_quantile(0.0, 4, 496));
    CHECK_THROWS(f_quantile(1.0, 4, 496));
    CHECK_THROWS(f_quantile(0.5, 0, 496));
    CHECK_THROWS(f_cdf(1.0, -1, 10));
}
