#pragma once

namespace disac {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Chi-square CDF with dof degrees of freedom.
double chi_square_cdf(double x, double dof);

// Inverse chi-square CDF (quantile), p in (0, 1).
double chi_square_quantile(double p, double dof);

}  // namespace disac
