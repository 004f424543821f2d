#pragma once

namespace railpca {

/// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);

/// Quantile of the F distribution, accurate to better than 1e-6 relative.
double f_quantile(double p, double d1, double d2);

}  // namespace railpca
