#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "railpca/types.hpp"

namespace railpca {

/// Eigendecomposition of a real symmetric matrix, eigenvalues descending,
/// eigenvectors as columns with the largest-magnitude entry made positive.
struct SymmetricEigen {
    VectorXd values;
    MatrixXd vectors;
};

namespace detail {

inline double off_diagonal_norm(const MatrixXd& a) {
    double s = 0.0;
    for (int p = 0; p < a.rows(); ++p) {
        for (int q = 0; q < a.cols(); ++q) {
            if (p != q) s += a(p, q) * a(p, q);
        }
    }
    return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi rotations; converges when the off-diagonal Frobenius norm
/// drops below 1e-12 of its initial value. Sized for the small covariance
/// matrices used here (n <= 8), where it is unconditionally stable.
inline SymmetricEigen jacobi_eigen_symmetric(const MatrixXd& input) {
    if (input.rows() != input.cols()) throw ParameterError("jacobi: matrix must be square");
    const int n = static_cast<int>(input.rows());
    if ((input - input.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, input.cwiseAbs().maxCoeff())) {
        throw ParameterError("jacobi: matrix is not symmetric");
    }

    MatrixXd a = 0.5 * (input + input.transpose());
    MatrixXd v = MatrixXd::Identity(n, n);
    const double initial_off = detail::off_diagonal_norm(a);
    const double target = 1e-12 * initial_off;

    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps && detail::off_diagonal_norm(a) > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p), arq = a(r, q);
                        a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                        a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    SymmetricEigen out;
    out.values = VectorXd(n);
    out.vectors = MatrixXd(n, n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
    for (int k = 0; k < n; ++k) {
        out.values(k) = a(order[k], order[k]);
        VectorXd col = v.col(order[k]);
        int arg_max = 0;
        for (int r = 1; r < n; ++r) {
            if (std::abs(col(r)) > std::abs(col(arg_max))) arg_max = r;
        }
        if (col(arg_max) < 0.0) col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

}  // namespace railpca
