#include "condens/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "condens/error.hpp"
#include "condens/special.hpp"

namespace condens {

namespace {

double log_factorial(int n)
{
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double binomial(int n, int k)
{
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

} // namespace

double laguerre_coeff(int h, int m, double alpha)
{
    require(h >= 0 && m >= 0 && h <= m, "laguerre_coeff: 0 <= h <= m required");
    if (!(alpha > 0.0))
        throw DomainError("laguerre_coeff: alpha must be positive");
    const double mag = std::exp(log_rising(alpha + h, m - h) - log_factorial(h) - log_factorial(m - h));
    return (h % 2 == 0) ? mag : -mag;
}

double laguerre_eval(int m, double alpha, double x)
{
    require(m >= 0, "laguerre_eval: m >= 0 required");
    double sum = 0.0;
    double power = 1.0;
    for (int h = 0; h <= m; ++h) {
        sum += laguerre_coeff(h, m, alpha) * power;
        power *= x;
    }
    return sum;
}

void laguerre_values(int n, double alpha, double x, std::span<double> out)
{
    require(n >= 0 && out.size() >= static_cast<std::size_t>(n) + 1, "laguerre_values: output too small");
    out[0] = 1.0;
    if (n == 0)
        return;
    out[1] = alpha - x;
    for (int m = 1; m < n; ++m)
        out[m + 1] = ((2.0 * m + alpha - x) * out[m] - (m + alpha - 1.0) * out[m - 1]) / (m + 1.0);
}

double gamma_density(double y, double alpha, double beta)
{
    if (y < 0.0)
        return 0.0;
    if (y == 0.0)
        return alpha < 1.0 ? INFINITY : (alpha == 1.0 ? 1.0 / beta : 0.0);
    const double logd = (alpha - 1.0) * std::log(y) - y / beta - alpha * std::log(beta) - std::lgamma(alpha);
    return std::exp(logd);
}

LaguerreExpansion fit_from_moments(std::span<const double> gamma_hat, MomentScaling scaling)
{
    if (gamma_hat.size() < 2)
        throw NumericalError("fit_from_moments: at least two moments required");
    const double g1 = gamma_hat[0];
    const double g2 = gamma_hat[1];
    const double var = g2 - g1 * g1;
    if (!(g1 > 0.0) || !(var > 0.0) || !std::isfinite(g2))
        throw NumericalError("fit_from_moments: degenerate moments (need gamma2 > gamma1^2 > 0)");

    LaguerreExpansion exp;
    exp.alpha = g1 * g1 / var;
    exp.beta = var / g1;
    exp.tau = exp.beta;

    const int order = static_cast<int>(gamma_hat.size());
    // scaled[r] = E[(y / beta)^r] / (alpha)_r, r = 0..order.
    std::vector<double> ratio(order + 1);
    ratio[0] = 1.0;
    for (int r = 1; r <= order; ++r) {
        const double moment = gamma_hat[r - 1];
        const double log_scale = scaling == MomentScaling::Scaled ? r * std::log(exp.beta) : 0.0;
        ratio[r] = moment / std::exp(log_scale + log_rising(exp.alpha, r));
    }
    exp.b.assign(order + 1, 0.0);
    exp.b[0] = 1.0;
    for (int h = 1; h <= order; ++h) {
        double s = 0.0;
        for (int r = 0; r <= h; ++r) {
            const double term = binomial(h, r) * ratio[r];
            s += (r % 2 == 0) ? term : -term;
        }
        exp.b[h] = s;
    }
    return exp;
}

LaguerreExpansion fit_from_sample(std::span<const double> values, std::size_t order)
{
    if (values.size() < 2)
        throw NumericalError("fit_from_sample: at least two values required");
    long double sum = 0.0L;
    for (double v : values)
        sum += v;
    const long double n = static_cast<long double>(values.size());
    const long double mean = sum / n;
    long double ss = 0.0L;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    const double g1 = static_cast<double>(mean);
    const double var = static_cast<double>(ss / n);
    if (!(g1 > 0.0) || !(var > 0.0))
        throw NumericalError("fit_from_sample: degenerate sample (need positive mean and variance)");

    LaguerreExpansion exp;
    exp.alpha = g1 * g1 / var;
    exp.beta = var / g1;
    exp.tau = exp.beta;
    exp.b.assign(order + 1, 0.0);
    exp.b[0] = 1.0;
    if (order < 1)
        return exp;
    std::vector<long double> acc(order + 1, 0.0L);
    std::vector<double> lag(order + 1);
    for (double v : values) {
        laguerre_values(static_cast<int>(order), exp.alpha, v / exp.beta, lag);
        for (std::size_t h = 1; h <= order; ++h)
            acc[h] += lag[h];
    }
    for (std::size_t h = 1; h <= order; ++h) {
        const int hi = static_cast<int>(h);
        const double scale = std::exp(log_factorial(hi) - log_rising(exp.alpha, hi));
        exp.b[h] = scale * static_cast<double>(acc[h] / n);
    }
    // b1 and b2 vanish for the moment-matched Gamma fit.
    exp.b[1] = 0.0;
    if (order >= 2)
        exp.b[2] = 0.0;
    return exp;
}

double density_eval(const LaguerreExpansion& exp, double y, std::size_t n_terms)
{
    require(n_terms < exp.b.size(), "density_eval: truncation order exceeds available coefficients");
    require(y >= 0.0, "density_eval: y >= 0 required");
    std::vector<double> lag(n_terms + 1);
    laguerre_values(static_cast<int>(n_terms), exp.alpha, y / exp.tau, lag);
    double series = 0.0;
    for (std::size_t m = 0; m <= n_terms; ++m)
        series += exp.b[m] * lag[m];
    return gamma_density(y, exp.alpha, exp.beta) * series;
}

double elog_closed_form(const LaguerreExpansion& exp, std::size_t n_terms)
{
    require(n_terms < exp.b.size(), "elog_closed_form: truncation order exceeds available coefficients");
    const double logb = std::log(exp.beta);
    double total = exp.b[0] * (logb + digamma(exp.alpha));
    const double log_ratio = std::log(exp.beta / exp.tau);
    for (std::size_t m = 1; m <= n_terms; ++m) {
        const int mi = static_cast<int>(m);
        double inner = 0.0;
        for (int h = 0; h <= mi; ++h) {
            // c_hm Gamma(alpha+h) / Gamma(alpha) = (-1)^h C(m,h) (alpha)_m / m!
            const double logmag = log_rising(exp.alpha, mi) - log_factorial(h) - log_factorial(mi - h) + h * log_ratio;
            const double term = std::exp(logmag) * (logb + digamma(exp.alpha + h));
            inner += (h % 2 == 0) ? term : -term;
        }
        total += exp.b[m] * inner;
    }
    return total;
}

bool tau_converges(double tau, double beta, double lambda_max)
{
    return 1.0 / tau > 2.0 * (1.0 / beta - 1.0 / (2.0 * lambda_max));
}

void QuadraticFormSpec::validate() const
{
    const Eigen::Index d = mu.size();
    require(d > 0, "QuadraticFormSpec: empty mean");
    require(sigma.rows() == d && sigma.cols() == d, "QuadraticFormSpec: Sigma dimension mismatch");
    require(a_iso.rows() == d && a_iso.cols() == d, "QuadraticFormSpec: A dimension mismatch");
}

QfMoments qf_moments(const QuadraticFormSpec& spec)
{
    spec.validate();
    const RealMatrix& a = spec.a_iso;
    const RealMatrix& s = spec.sigma;
    const double mean = (s * a).trace() + spec.mu.dot(a * spec.mu);
    const RealMatrix weight = s + 2.0 * spec.mu * spec.mu.transpose();
    const double var = 2.0 * (weight * a * s * a).trace();
    return {mean, var + mean * mean};
}

std::vector<QfTerm> qf_eigen_representation(const QuadraticFormSpec& spec)
{
    spec.validate();
    Eigen::SelfAdjointEigenSolver<RealMatrix> cov(spec.sigma);
    if (cov.info() != Eigen::Success)
        throw NumericalError("qf_eigen_representation: eigen decomposition of Sigma failed");
    const RealVector& sv = cov.eigenvalues();
    const double smax = sv.cwiseAbs().maxCoeff();
    if (!(sv.minCoeff() > 1e-14 * smax) || smax == 0.0)
        throw NumericalError("qf_eigen_representation: Sigma is not positive definite");
    const RealMatrix& v = cov.eigenvectors();
    const RealMatrix half = v * sv.cwiseSqrt().asDiagonal() * v.transpose();
    const RealMatrix inv_half = v * sv.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();

    const RealMatrix core = half * spec.a_iso * half;
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(0.5 * (core + core.transpose()));
    if (eig.info() != Eigen::Success)
        throw NumericalError("qf_eigen_representation: eigen decomposition failed");
    const RealVector& lam = eig.eigenvalues();
    const RealVector shift = eig.eigenvectors().transpose() * (inv_half * spec.mu);
    const double lmax = lam.cwiseAbs().maxCoeff();

    std::vector<QfTerm> terms;
    constexpr double tol = 1e-8;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (std::abs(lam(i)) <= tol * lmax)
            continue;
        auto it = std::find_if(terms.begin(), terms.end(), [&](const QfTerm& t) {
            return std::abs(t.lambda - lam(i)) <= tol * std::max(std::abs(t.lambda), std::abs(lam(i)));
        });
        const double d = shift(i) * shift(i);
        if (it == terms.end()) {
            terms.push_back({lam(i), 1, d});
        } else {
            it->lambda = (it->lambda * it->nu + lam(i)) / (it->nu + 1);
            it->nu += 1;
            it->delta += d;
        }
    }
    return terms;
}

RealMatrix tridiagonal_z_isomorph(Complex z, std::size_t p)
{
    require(p >= 1, "tridiagonal_z_isomorph: p >= 1 required");
    const auto n = static_cast<Eigen::Index>(p);
    const double x = z.real();
    const double y = z.imag();
    const double diag = 1.0 + std::norm(z);
    RealMatrix out = RealMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = diag;
        out(n + i, n + i) = diag;
        if (i + 1 < n) {
            // Re block (-x, 1+|z|^2, -x)
            out(i + 1, i) = -x;
            out(i, i + 1) = -x;
            out(n + i + 1, n + i) = -x;
            out(n + i, n + i + 1) = -x;
            // upper-right block (y, 0, -y), lower-left block (-y, 0, y)
            out(i + 1, n + i) = y;
            out(i, n + i + 1) = -y;
            out(n + i + 1, i) = -y;
            out(n + i, i + 1) = y;
        }
    }
    return out;
}

} // namespace condens
