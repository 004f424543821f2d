#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "railpca/jacobi.hpp"
#include "railpca/pca.hpp"
#include "railpca/rng.hpp"

using namespace railpca;

namespace {

MatrixXd random_symmetric(int n, SplitMix64& rng) {
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = 2.0 * rng.next_uniform() - 1.0;
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

// Characteristic-polynomial/bisection eigenvalue oracle for small symmetric
// matrices: Newton's identities give the coefficients, Gershgorin brackets
// the spectrum, sign changes isolate the roots. Independent of the Jacobi path.
std::vector<double> charpoly_eigenvalues(const MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<double> power_traces(n + 1, 0.0);
    MatrixXd p = MatrixXd::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        p = (p * a).eval();
        power_traces[k] = p.trace();
    }
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int i = 1; i <= k; ++i) {
            acc += (i % 2 == 1 ? 1.0 : -1.0) * e[k - i] * power_traces[i];
        }
        e[k] = acc / k;
    }
    // p(x) = sum_k (-1)^k e_k x^(n-k)
    std::vector<double> coeff(n + 1);
    for (int k = 0; k <= n; ++k) coeff[k] = (k % 2 == 0 ? 1.0 : -1.0) * e[k];
    auto poly = [&](double x) {
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) acc = acc * x + coeff[k];
        return acc;
    };

    double radius = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(a(i, j));
        radius = std::max(radius, row);
    }
    const double lo = -radius - 1.0, hi = radius + 1.0;
    const int grid = 200000;
    std::vector<double> roots;
    double x_prev = lo, f_prev = poly(lo);
    for (int g = 1; g <= grid; ++g) {
        const double x = lo + (hi - lo) * g / grid;
        const double f = poly(x);
        if ((f_prev < 0.0) != (f < 0.0)) {
            double a0 = x_prev, b0 = x, fa = f_prev;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a0 + b0);
                const double fm = poly(m);
                if ((fa < 0.0) != (fm < 0.0)) {
                    b0 = m;
                } else {
                    a0 = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a0 + b0));
        }
        x_prev = x;
        f_prev = f;
    }
    std::sort(roots.rbegin(), roots.rend());
    return roots;
}

TrainingSet random_training_set(int n, int k, SplitMix64& rng, double spread = 1.0) {
    TrainingSet set;
    set.class_label = "random";
    VectorXd center(n);
    for (int i = 0; i < n; ++i) center(i) = 10.0 * rng.next_uniform();
    for (int v = 0; v < k; ++v) {
        VectorXd x = center;
        for (int i = 0; i < n; ++i) x(i) += spread * (i + 1) * rng.next_gaussian();
        set.vectors.push_back(x);
    }
    return set;
}

}  // namespace

TEST_CASE("jacobi reconstructs random symmetric 8x8 matrices") {
    SplitMix64 rng(0xA11CE5u);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXd a = random_symmetric(8, rng);
        const SymmetricEigen eig = jacobi_eigen_symmetric(a);
        const MatrixXd rebuilt =
            eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
        CHECK((rebuilt - a).norm() <= 1e-8 * std::max(1.0, a.norm()));
        const MatrixXd gram = eig.vectors.transpose() * eig.vectors;
        CHECK((gram - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
        for (int i = 1; i < 8; ++i) CHECK(eig.values(i - 1) >= eig.values(i));
    }
}

TEST_CASE("jacobi eigenvalues match the characteristic-polynomial oracle on 4x4") {
    SplitMix64 rng(0xBEEFu);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixXd a = random_symmetric(4, rng);
        const SymmetricEigen eig = jacobi_eigen_symmetric(a);
        const auto expected = charpoly_eigenvalues(a);
        REQUIRE(expected.size() == 4);
        const double scale = std::max(1.0, std::abs(expected.front()));
        for (int i = 0; i < 4; ++i) {
            CHECK(eig.values(i) == doctest::Approx(expected[i]).epsilon(1e-8).scale(scale));
        }
    }
}

TEST_CASE("train on a two-point 2-D set confines variance to one axis") {
    TrainingSet set;
    set.class_label = "axis";
    set.vectors = {VectorXd(2), VectorXd(2), VectorXd(2), VectorXd(2)};
    set.vectors[0] << 1, 0;
    set.vectors[1] << -1, 0;
    set.vectors[2] << 1, 0;
    set.vectors[3] << -1, 0;
    const PcaClassModel model = train(set);
    CHECK(model.mean.norm() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(model.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(model.eigenvalues(1) == doctest::Approx(0.0).scale(1.0));
    CHECK(model.m == 1);
    CHECK(model.rmse_at_m == doctest::Approx(0.0).scale(1.0));
    CHECK(std::abs(model.transform(0, 0)) == doctest::Approx(1.0));
    CHECK(model.transform(1, 0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("covariance uses the 1/K normalisation") {
    TrainingSet set;
    set.class_label = "scale";
    set.vectors = {VectorXd(2), VectorXd(2), VectorXd(2)};
    set.vectors[0] << 3, 0;
    set.vectors[1] << 0, 0;
    set.vectors[2] << 0, 0;
    // mean = (1, 0); centered: (2,0), (-1,0), (-1,0); S00 = (4+1+1)/3 = 2.
    const PcaClassModel model = train(set);
    CHECK(model.covariance(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("the published eigenvalue spectrum selects m=4 under the 10% cap") {
    VectorXd lambda(8);
    // Receiver-side values dominate; descending order.
    lambda << 593724.04, 433733.11, 125065.94, 96724.82, 28151.90, 15264.30, 13377.12, 10962.00;
    const double rmse4 = rmse_for_order(lambda, 4);
    CHECK(rmse4 == doctest::Approx(67755.32 / 1317003.23).epsilon(1e-12));
    CHECK(rmse4 > 0.050);
    CHECK(rmse4 < 0.053);
    CHECK(rmse_for_order(lambda, 3) >= 0.10);  // so m=4 is the smallest order under the cap
    int selected = 8;
    for (int m = 1; m < 8; ++m) {
        if (rmse_for_order(lambda, m) < 0.10) {
            selected = m;
            break;
        }
    }
    CHECK(selected == 4);
}

TEST_CASE("K = n is rejected") {
    SplitMix64 rng(7u);
    TrainingSet set = random_training_set(4, 4, rng);
    CHECK_THROWS_AS(train(set), DegenerateModelError);
}

TEST_CASE("identical vectors give a degenerate-model error") {
    TrainingSet set;
    set.class_label = "flat";
    VectorXd v(3);
    v << 1, 2, 3;
    for (int i = 0; i < 8; ++i) set.vectors.push_back(v);
    CHECK_THROWS_AS(train(set), DegenerateModelError);
}

TEST_CASE("scoring the mean gives zero error and zero T2") {
    SplitMix64 rng(11u);
    const PcaClassModel model = train(random_training_set(4, 40, rng));
    const ClassScore s = score(model, model.mean);
    CHECK(s.reconstruction_error == doctest::Approx(0.0).scale(1.0));
    CHECK(s.t_squared == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("m = n reconstructs perfectly") {
    SplitMix64 rng(13u);
    TrainingSet set = random_training_set(4, 40, rng);
    // A cap of 0 forces m = n (flagged degenerate).
    const PcaClassModel model = train(set, 0.0);
    CHECK(model.m == 4);
    CHECK(model.degenerate);
    for (int i = 0; i < 5; ++i) {
        VectorXd sample(4);
        for (int d = 0; d < 4; ++d) sample(d) = 10.0 * rng.next_gaussian();
        const ClassScore s = score(model, sample);
        CHECK(s.reconstruction_error == doctest::Approx(0.0).scale(1.0));
    }
}

TEST_CASE("reconstruction error matches a brute-force implementation") {
    SplitMix64 rng(0x0D15EA5Eu);
    for (int ds = 0; ds < 5; ++ds) {
        TrainingSet set = random_training_set(4, 30, rng, 0.5);
        const PcaClassModel model = train(set, 0.3);  // keep m < n
        REQUIRE(model.m < model.n);
        for (int probe = 0; probe < 6; ++probe) {
            const VectorXd& sample = set.vectors[probe % set.vectors.size()];

            // Brute force: plain loops, Gaussian elimination, no Eigen reductions.
            const int n = model.n;
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = sample(i) - model.mean(i);
            std::vector<double> y(model.m, 0.0);
            for (int j = 0; j < model.m; ++j) {
                for (int i = 0; i < n; ++i) y[j] += model.transform(i, j) * x[i];
            }
            std::vector<double> residual(n);
            for (int i = 0; i < n; ++i) {
                double rec = 0.0;
                for (int j = 0; j < model.m; ++j) rec += model.transform(i, j) * y[j];
                residual[i] = x[i] - rec;
            }
            // Solve (S + ridge I) w = residual by Gaussian elimination.
            const double ridge = model.ridge();
            std::vector<std::vector<double>> aug(n, std::vector<double>(n + 1));
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    aug[i][j] = model.covariance(i, j) + (i == j ? ridge : 0.0);
                }
                aug[i][n] = residual[i];
            }
            for (int col = 0; col < n; ++col) {
                int pivot = col;
                for (int r = col + 1; r < n; ++r) {
                    if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
                }
                std::swap(aug[col], aug[pivot]);
                for (int r = 0; r < n; ++r) {
                    if (r == col) continue;
                    const double f = aug[r][col] / aug[col][col];
                    for (int c = col; c <= n; ++c) aug[r][c] -= f * aug[col][c];
                }
            }
            double eps_expected = 0.0;
            for (int i = 0; i < n; ++i) eps_expected += residual[i] * (aug[i][n] / aug[i][i]);
            double t2_expected = 0.0;
            for (int j = 0; j < model.m; ++j) t2_expected += y[j] * y[j] / model.eigenvalues(j);

            const ClassScore s = score(model, sample);
            CHECK(s.reconstruction_error ==
                  doctest::Approx(eps_expected).epsilon(1e-8).scale(std::max(1.0, eps_expected)));
            CHECK(s.t_squared ==
                  doctest::Approx(t2_expected).epsilon(1e-8).scale(std::max(1.0, t2_expected)));
        }
    }
}

TEST_CASE("residual is orthogonal to the retained eigenvectors") {
    SplitMix64 rng(0xF00Du);
    TrainingSet set = random_training_set(6, 60, rng);
    const PcaClassModel model = train(set, 0.2);
    for (int probe = 0; probe < 10; ++probe) {
        VectorXd sample(6);
        for (int d = 0; d < 6; ++d) sample(d) = 20.0 * rng.next_gaussian();
        const VectorXd x = sample - model.mean;
        const VectorXd residual = x - model.transform * (model.transform.transpose() * x);
        const VectorXd dots = model.transform.transpose() * residual;
        CHECK(dots.cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, x.norm()));
    }
}

TEST_CASE("training order does not change the model or the scores") {
    SplitMix64 rng(21u);
    TrainingSet set = random_training_set(4, 25, rng);
    TrainingSet shuffled = set;
    std::reverse(shuffled.vectors.begin(), shuffled.vectors.end());
    const PcaClassModel a = train(set);
    const PcaClassModel b = train(shuffled);
    VectorXd sample(4);
    sample << 1.0, 2.0, 3.0, 4.0;
    CHECK(score(a, sample).reconstruction_error ==
          doctest::Approx(score(b, sample).reconstruction_error).epsilon(1e-9));
}

TEST_CASE("RMSE is non-increasing in m and zero at m = n") {
    SplitMix64 rng(23u);
    TrainingSet set = random_training_set(5, 50, rng);
    const PcaClassModel model = train(set, 1e-12);
    double prev = 1.0;
    for (int m = 1; m <= 5; ++m) {
        const double r = rmse_for_order(model.eigenvalues, m);
        CHECK(r <= prev + 1e-15);
        prev = r;
    }
    CHECK(rmse_for_order(model.eigenvalues, 5) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("shrinking the ridge tenfold leaves well-conditioned scores unchanged") {
    SplitMix64 rng(29u);
    TrainingSet set = random_training_set(4, 60, rng);
    const PcaClassModel model = train(set, 0.3);
    REQUIRE(model.m < model.n);
    VectorXd sample(4);
    sample << 12.0, -3.0, 5.0, 8.0;
    const VectorXd x = sample - model.mean;
    const VectorXd residual = x - model.transform * (model.transform.transpose() * x);

    auto eps_with_ridge = [&](double ridge) {
        const MatrixXd reg =
            model.covariance + ridge * MatrixXd::Identity(model.n, model.n);
        return residual.dot(reg.llt().solve(residual));
    };
    const double eps_base = eps_with_ridge(model.ridge());
    const double eps_small = eps_with_ridge(model.ridge() / 10.0);
    CHECK(std::abs(eps_base - eps_small) < 1e-3 * eps_base);

    const ClassScore s = score(model, sample);
    CHECK(s.reconstruction_error == doctest::Approx(eps_base).epsilon(1e-9));
}

TEST_CASE("t2_threshold reproduces the F-based control limit") {
    SUBCASE("K=500, m=4 at 95% is about 9.6") {
        const double factor = 4.0 * 499.0 * 501.0 / (500.0 * 496.0);
        CHECK(factor == doctest::Approx(4.032).epsilon(1e-3));
        const double threshold = t2_threshold(500, 4, 0.95);
        CHECK(threshold == doctest::Approx(9.64).epsilon(0.01));
        CHECK(threshold / factor == doctest::Approx(2.39).epsilon(0.005));
    }
    SUBCASE("monotone in confidence") {
        CHECK(t2_threshold(500, 4, 0.90) < t2_threshold(500, 4, 0.95));
        CHECK(t2_threshold(500, 4, 0.95) < t2_threshold(500, 4, 0.99));
    }
    SUBCASE("m=1 with large K approaches the chi-square(1) 95% point") {
        CHECK(t2_threshold(200000, 1, 0.95) == doctest::Approx(3.8415).epsilon(0.01));
    }
    SUBCASE("K <= m is rejected") {
        CHECK_THROWS_AS(t2_threshold(4, 4, 0.95), ParameterError);
        CHECK_THROWS_AS(t2_threshold(3, 4, 0.95), ParameterError);
    }
}

TEST_CASE("dispersion_stats") {
    SUBCASE("reproduces the published class statistics within rounding") {
        // sigma = 50.92, mu = 19040 for the external-rail quarter-1 class.
        std::vector<double> synthetic = {19040.0 - 50.92, 19040.0 + 50.92};
        const DispersionStats d = dispersion_stats(synthetic);
        CHECK(d.sigma == doctest::Approx(50.92));
        CHECK(d.mu == doctest::Approx(19040.0));
        CHECK(d.index == doctest::Approx(50.92 * 50.92 / 19040.0).epsilon(1e-12));
        CHECK(d.index == doctest::Approx(0.136).epsilon(0.005));
        CHECK(std::abs(d.index - 0.13) < 0.01);
    }
    SUBCASE("constant list has zero dispersion") {
        const DispersionStats d = dispersion_stats({5.0, 5.0, 5.0});
        CHECK(d.sigma == 0.0);
        CHECK(d.index == 0.0);
    }
    SUBCASE("Poisson-like data has dispersion near 1") {
        // Knuth-style Poisson sampling with the project RNG, lambda = 40.
        SplitMix64 rng(31u);
        const double lambda = 40.0;
        std::vector<double> samples;
        for (int i = 0; i < 20000; ++i) {
            const double limit = std::exp(-lambda);
            double p = 1.0;
            int k = 0;
            do {
                ++k;
                p *= rng.next_uniform();
            } while (p > limit);
            samples.push_back(k - 1);
        }
        const DispersionStats d = dispersion_stats(samples);
        CHECK(d.index == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(dispersion_stats({}), ParameterError);
        CHECK_THROWS_AS(dispersion_stats({1.0, -1.0}), ParameterError);
    }
}
