#pragma once

namespace condens {

/// Digamma function Psi(x) = d/dx log Gamma(x) for x > 0.
///
/// Shifts x upward with Psi(x) = Psi(x+1) - 1/x until x >= 10, then sums the
/// asymptotic series log x - 1/(2x) - sum B_2k / (2k x^2k) through B_14.
/// Absolute error below 1e-12 on [1e-3, 1e6]. Throws DomainError for x <= 0
/// or NaN.
double digamma(double x);

/// log Gamma(a + h) - log Gamma(a) for a > 0, h >= 0 integer (log rising factorial).
double log_rising(double a, int h);

} // namespace condens
