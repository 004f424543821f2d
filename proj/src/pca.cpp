#include "railpca/pca.hpp"

#include <cmath>

#include "railpca/jacobi.hpp"
#include "railpca/stats.hpp"

namespace railpca {

namespace {
constexpr double kRidgeEps = 1e-8;
}

double PcaClassModel::ridge() const {
    return kRidgeEps * eigenvalues.sum() / n;  // trace(S)/n scaled
}

double rmse_for_order(const VectorXd& eigenvalues_desc, int m) {
    const int n = static_cast<int>(eigenvalues_desc.size());
    if (m < 0 || m > n) throw ParameterError("rmse_for_order: m out of range");
    double total = 0.0, tail = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lam = std::max(eigenvalues_desc(i), 0.0);
        total += lam;
        if (i >= m) tail += lam;
    }
    if (total <= 0.0) return 0.0;
    return tail / total;
}

PcaClassModel train(const TrainingSet& set, double rmse_cap) {
    const int K = static_cast<int>(set.vectors.size());
    const int n = set.dimension();
    if (n == 0) throw DegenerateModelError("training set '" + set.class_label + "' is empty");
    if (K < n + 1) {
        throw DegenerateModelError("training set '" + set.class_label + "' has K=" +
                                   std::to_string(K) + " < n+1=" + std::to_string(n + 1));
    }
    for (const auto& v : set.vectors) {
        if (static_cast<int>(v.size()) != n) {
            throw ParameterError("training set '" + set.class_label + "' mixes dimensions");
        }
        if (!v.allFinite()) {
            throw ParameterError("training set '" + set.class_label + "' has non-finite vectors");
        }
    }

    PcaClassModel model;
    model.class_label = set.class_label;
    model.n = n;
    model.training_K = K;

    model.mean = VectorXd::Zero(n);
    for (const auto& v : set.vectors) model.mean += v;
    model.mean /= K;

    model.covariance = MatrixXd::Zero(n, n);
    for (const auto& v : set.vectors) {
        const VectorXd x = v - model.mean;
        model.covariance.noalias() += x * x.transpose();
    }
    model.covariance /= K;

    const double mean_scale = std::max(1.0, model.mean.squaredNorm());
    if (model.covariance.cwiseAbs().maxCoeff() <= 1e-24 * mean_scale) {
        throw DegenerateModelError("training set '" + set.class_label +
                                   "' has rank-0 covariance (all vectors identical)");
    }

    const SymmetricEigen eig = jacobi_eigen_symmetric(model.covariance);
    model.eigenvalues = eig.values;

    model.m = n;
    model.degenerate = true;
    for (int m = 1; m < n; ++m) {
        if (rmse_for_order(eig.values, m) < rmse_cap) {
            model.m = m;
            model.degenerate = false;
            break;
        }
    }
    model.rmse_at_m = rmse_for_order(eig.values, model.m);
    model.transform = eig.vectors.leftCols(model.m);

    const double ridge = model.ridge();
    VectorXd inv_vals(n);
    for (int i = 0; i < n; ++i) {
        inv_vals(i) = 1.0 / (std::max(eig.values(i), 0.0) + ridge);
    }
    model.inv_covariance = eig.vectors * inv_vals.asDiagonal() * eig.vectors.transpose();

    model.t2_threshold = t2_threshold(K, model.m);
    return model;
}

ClassScore score(const PcaClassModel& model, const VectorXd& sample) {
    if (static_cast<int>(sample.size()) != model.n) {
        throw ParameterError("score: sample dimension " + std::to_string(sample.size()) +
                             " does not match model '" + model.class_label + "' dimension " +
                             std::to_string(model.n));
    }
    const VectorXd x = sample - model.mean;
    const VectorXd y = model.transform.transpose() * x;
    const VectorXd reconstructed = model.transform * y;
    const VectorXd residual = x - reconstructed;

    ClassScore s;
    s.class_label = model.class_label;
    s.reconstruction_error = std::max(0.0, residual.dot(model.inv_covariance * residual));
    const double floor = model.ridge();
    double t2 = 0.0;
    for (int i = 0; i < model.m; ++i) {
        t2 += y(i) * y(i) / std::max(model.eigenvalues(i), floor);
    }
    s.t_squared = t2;
    s.t2_threshold = model.t2_threshold;
    return s;
}

double t2_threshold(int K, int m, double confidence) {
    if (m < 1) throw ParameterError("t2_threshold: m must be >= 1");
    if (K <= m) throw ParameterError("t2_threshold: requires K > m");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ParameterError("t2_threshold: confidence must be in (0, 1)");
    }
    const double kd = K;
    const double factor = m * (kd - 1.0) * (kd + 1.0) / (kd * (kd - m));
    return factor * f_quantile(confidence, m, kd - m);
}

DispersionStats dispersion_stats(const std::vector<double>& values) {
    if (values.empty()) throw ParameterError("dispersion_stats: empty list");
    double mu = 0.0;
    for (double v : values) mu += v;
    mu /= values.size();
    if (mu == 0.0) throw ParameterError("dispersion_stats: zero mean");
    double var = 0.0;
    for (double v : values) var += (v - mu) * (v - mu);
    var /= values.size();
    return {std::sqrt(var), mu, var / mu};
}

}  // namespace railpca
