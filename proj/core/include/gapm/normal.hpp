#pragma once

#include <span>

#include "gapm/linalg.hpp"

namespace gapm {

double normal_pdf(double z);
double normal_cdf(double z);
/// Inverse standard normal CDF, accurate to about 1e-15 on (0, 1).
double normal_quantile(double p);

/// CVaR at level delta of the normal loss -x^T r with r ~ N(mean, cov):
///   -mean^T x + sqrt(x^T cov x) * pdf(quantile(delta)) / delta.
double cvar_analytic_ub(std::span<const double> mean, const Matrix& cov, double delta,
                        std::span<const double> x);

}  // namespace gapm
