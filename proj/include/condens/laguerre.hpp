#pragma once

#include <optional>
#include <span>
#include <vector>

#include "condens/linalg.hpp"

namespace condens {

/// Coefficient of x^h in the generalized Laguerre polynomial
/// L_m(x, alpha) = x^(1-alpha) e^x / m! d^m/dx^m (x^(m+alpha-1) e^-x):
/// c_hm = (-1)^h Gamma(alpha+m) / (h! (m-h)! Gamma(alpha+h)).
double laguerre_coeff(int h, int m, double alpha);

/// L_m(x, alpha) as the power sum of laguerre_coeff.
double laguerre_eval(int m, double alpha, double x);

/// L_0..L_n at x by the three-term recurrence, written into `out` (size n+1).
void laguerre_values(int n, double alpha, double x, std::span<double> out);

/// Gamma(shape alpha, scale beta) density.
double gamma_density(double y, double alpha, double beta);

/// Truncated Laguerre expansion of a density on the positive half line:
///   f(y) = g(y; alpha, beta) * sum_m b[m] L_m(y / tau, alpha)
/// with g the Gamma(alpha, beta) density.
struct LaguerreExpansion {
    double alpha = 1.0;
    double beta = 1.0;
    double tau = 1.0;
    std::vector<double> b{1.0};

    std::size_t order() const { return b.empty() ? 0 : b.size() - 1; }
};

/// Which moments enter the coefficient formula.
///  - Scaled: moments of y / beta (the Gamma self-expansion terminates after b0).
///  - Raw: the sample moments of y as given.
enum class MomentScaling { Scaled, Raw };

/// Fits alpha, beta from the first two raw moments gamma_hat[0] = E[y],
/// gamma_hat[1] = E[y^2], and b_1..b_M from all M supplied moments, with
/// tau = beta and b0 = 1. Throws NumericalError unless gamma2 > gamma1^2 > 0.
LaguerreExpansion fit_from_moments(std::span<const double> gamma_hat,
                                   MomentScaling scaling = MomentScaling::Scaled);

/// Same fit computed from the sample itself: alpha, beta from its first two
/// moments and b_h = h! / (alpha)_h * mean(L_h(y_i / beta, alpha)), h = 1..order.
/// Equal to fit_from_moments on the exact sample moments, without the
/// cancellation of the alternating moment sums when alpha is large.
LaguerreExpansion fit_from_sample(std::span<const double> values, std::size_t order);

/// Density of the expansion truncated after b[n_terms]. May be negative in tails.
double density_eval(const LaguerreExpansion& exp, double y, std::size_t n_terms);

/// E[log y] under the truncated expansion (term-by-term integration).
double elog_closed_form(const LaguerreExpansion& exp, std::size_t n_terms);

/// True when tau satisfies 1/tau > 2 (1/beta - 1/(2 lambda_max)); the
/// expansion then converges uniformly.
bool tau_converges(double tau, double beta, double lambda_max);

/// Quadratic form x^T A x for x ~ N(mu, Sigma) in real coordinates.
struct QuadraticFormSpec {
    RealVector mu;
    RealMatrix sigma;
    RealMatrix a_iso;

    void validate() const;
};

struct QfMoments {
    double gamma1;
    double gamma2;
};

/// First two raw moments of x^T A x.
QfMoments qf_moments(const QuadraticFormSpec& spec);

/// One term lambda * chi^2_nu(delta) of the eigen representation.
struct QfTerm {
    double lambda;
    int nu;
    double delta;
};

/// Distinct nonzero eigenvalues of Sigma^1/2 A Sigma^1/2 (grouped at relative
/// tolerance 1e-8) with multiplicities and noncentralities.
/// Throws NumericalError if Sigma is not positive definite.
std::vector<QfTerm> qf_eigen_representation(const QuadraticFormSpec& spec);

/// Real 2p x 2p isomorph of the tridiagonal column covariance of U1 - z U0
/// (diagonal 1 + |z|^2, -conj(z) above and -z below).
RealMatrix tridiagonal_z_isomorph(Complex z, std::size_t p);

} // namespace condens
