#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "railpca/types.hpp"

namespace railpca {

/// Raised when a training set cannot produce a usable model
/// (all vectors identical, or fewer than n+1 of them).
struct DegenerateModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Labelled collection of feature vectors for one class.
struct TrainingSet {
    struct Provenance {
        double snr_db = 0.0;
        std::string soil;
        std::uint64_t seed = 0;
    };

    std::string class_label;
    std::vector<VectorXd> vectors;
    std::vector<Provenance> provenance;  // optional, parallel to vectors when present

    int dimension() const {
        return vectors.empty() ? 0 : static_cast<int>(vectors.front().size());
    }
};

/// Per-class trained artifacts: mean, covariance (1/K normalisation), its
/// regularised inverse, the eigenpairs, and the retained order m selected by
/// the normalised residual RMSE criterion.
struct PcaClassModel {
    std::string class_label;
    int n = 0;
    int m = 0;
    int training_K = 0;
    VectorXd mean;            // psi
    MatrixXd covariance;      // S
    MatrixXd inv_covariance;  // (S + ridge I)^-1
    VectorXd eigenvalues;     // descending
    MatrixXd transform;       // U, n x m dominant eigenvector columns
    double rmse_at_m = 0.0;
    bool degenerate = false;  // no m < n satisfied the cap
    double t2_threshold = 0.0;

    double ridge() const;  // regularisation actually added to S
};

/// Scores of one sample against one class model.
struct ClassScore {
    std::string class_label;
    double reconstruction_error = 0.0;  // Mahalanobis-weighted residual
    double t_squared = 0.0;
    double t2_threshold = 0.0;
};

/// Relative residual eigenvalue mass sum(i>m) / sum(i), eigenvalues descending.
double rmse_for_order(const VectorXd& eigenvalues_desc, int m);

/// Trains a class model: mean, covariance with 1/K normalisation, Jacobi
/// eigendecomposition, and the smallest m whose RMSE is under the cap.
PcaClassModel train(const TrainingSet& set, double rmse_cap = 0.10);

/// Projects, reconstructs and scores one sample against a class model.
ClassScore score(const PcaClassModel& model, const VectorXd& sample);

/// Hotelling T^2 control limit m(K-1)(K+1) / (K(K-m)) * F_quantile(confidence; m, K-m).
double t2_threshold(int K, int m, double confidence = 0.95);

/// Population standard deviation, mean, and index of dispersion sigma^2 / mu.
struct DispersionStats {
    double sigma = 0.0;
    double mu = 0.0;
    double index = 0.0;
};
DispersionStats dispersion_stats(const std::vector<double>& values);

}  // namespace railpca
