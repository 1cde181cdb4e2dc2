#pragma once

namespace bell {

// Regularized incomplete gamma functions, a > 0, x >= 0.
// P is the lower tail, Q = 1 - P the upper tail; relative accuracy ~1e-14
// via the standard series (x < a + 1) and continued fraction (otherwise).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper-tail probability of a chi-square variable: Q(dof/2, chi2/2).
double chi_square_p_value(double chi2, int dof);

}  // namespace bell
