#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "condens/error.hpp"
#include "condens/laguerre.hpp"
#include "condens/mc.hpp"
#include "condens/special.hpp"

using namespace condens;

namespace {

template <class F>
double integrate(F&& f, double lo, double hi)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

// moments E[y^r], r = 1..count, of Gamma(alpha, beta)
std::vector<double> gamma_moments(double alpha, double beta, std::size_t count)
{
    std::vector<double> out(count);
    double m = 1.0;
    for (std::size_t r = 0; r < count; ++r) {
        m *= beta * (alpha + static_cast<double>(r));
        out[r] = m;
    }
    return out;
}

RealMatrix random_spd(Eigen::Index d, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    RealMatrix b(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            b(i, j) = g(rng);
    return b * b.transpose() / static_cast<double>(d) + RealMatrix::Identity(d, d);
}

double two_sample_ks(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

} // namespace

TEST_CASE("laguerre coefficients")
{
    const double alpha = 2.7;
    CHECK(laguerre_coeff(0, 1, alpha) == doctest::Approx(alpha));
    CHECK(laguerre_coeff(1, 1, alpha) == doctest::Approx(-1.0));
    // Gamma(4) / (3! Gamma(1))
    CHECK(laguerre_coeff(0, 3, 1.0) == doctest::Approx(1.0));
    CHECK(laguerre_coeff(0, 3, 2.0) == doctest::Approx(4.0));
    CHECK(laguerre_coeff(2, 2, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(laguerre_coeff(3, 2, 1.0), ContractError);
    CHECK_THROWS(laguerre_coeff(0, 2, 0.0));
}

TEST_CASE("laguerre polynomials")
{
    CHECK(laguerre_eval(0, 3.3, 1.7) == doctest::Approx(1.0));
    CHECK(laguerre_eval(1, 2.0, 2.0) == doctest::Approx(0.0));
    CHECK(laguerre_eval(1, 2.0, 0.5) == doctest::Approx(1.5));

    // Rodrigues form with alpha = 1: L_2(x) = e^x / 2 d^2/dx^2 (x^2 e^-x), the
    // derivative by central differences with two Richardson steps
    const double x = 0.7;
    auto g = [](double t) { return t * t * std::exp(-t); };
    auto d2 = [&](double h) { return (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h); };
    const double h = 0.02;
    const double r1 = (4.0 * d2(h / 2) - d2(h)) / 3.0;
    const double r2 = (4.0 * d2(h / 4) - d2(h / 2)) / 3.0;
    const double rodrigues = std::exp(x) / 2.0 * (16.0 * r2 - r1) / 15.0;
    CHECK(std::abs(laguerre_eval(2, 1.0, x) - rodrigues) < 1e-10);

    // recurrence against the power sum
    std::vector<double> v(11);
    laguerre_values(10, 4.5, 3.2, v);
    for (int m = 0; m <= 10; ++m)
        CHECK(v[m] == doctest::Approx(laguerre_eval(m, 4.5, 3.2)).epsilon(1e-10));

    // orthogonality under the Gamma(alpha, 1) weight
    const double alpha = 2.5;
    for (int m = 1; m <= 4; ++m) {
        const double ip = integrate(
            [&](double t) { return gamma_density(t, alpha, 1.0) * laguerre_eval(m, alpha, t) * laguerre_eval(2, alpha, t); },
            0.0, 80.0);
        if (m != 2)
            CHECK(std::abs(ip) < 1e-9);
        else
            CHECK(ip > 0.0);
    }
}

TEST_CASE("gamma density")
{
    CHECK(gamma_density(1.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(gamma_density(2.0, 3.0, 2.0) == doctest::Approx(boost::math::gamma_p_derivative(3.0, 1.0) / 2.0));
    CHECK(gamma_density(-1.0, 2.0, 1.0) == 0.0);
}

TEST_CASE("fit from gamma moments")
{
    SUBCASE("two moments")
    {
        const std::vector<double> m{6.0, 48.0};
        const LaguerreExpansion e = fit_from_moments(m);
        CHECK(e.alpha == doctest::Approx(3.0));
        CHECK(e.beta == doctest::Approx(2.0));
        CHECK(e.tau == doctest::Approx(2.0));
        CHECK(e.b[0] == 1.0);
    }
    SUBCASE("ten moments of Gamma(3, 2), the law of chi^2 with six dof")
    {
        const LaguerreExpansion e = fit_from_moments(gamma_moments(3.0, 2.0, 10));
        REQUIRE(e.b.size() == 11);
        CHECK(e.b[0] == 1.0);
        for (std::size_t h = 1; h < e.b.size(); ++h)
            CHECK(std::abs(e.b[h]) < 1e-9);
    }
    SUBCASE("raw scaling keeps the first two corrections at zero only for beta = 1")
    {
        const LaguerreExpansion e = fit_from_moments(gamma_moments(2.0, 1.0, 6), MomentScaling::Raw);
        for (std::size_t h = 1; h < e.b.size(); ++h)
            CHECK(std::abs(e.b[h]) < 1e-9);
    }
    SUBCASE("degenerate moments")
    {
        CHECK_THROWS_AS(fit_from_moments(std::vector<double>{2.0, 4.0}), NumericalError);
        CHECK_THROWS_AS(fit_from_moments(std::vector<double>{-1.0, 4.0}), NumericalError);
        CHECK_THROWS_AS(fit_from_moments(std::vector<double>{1.0}), NumericalError);
    }
}

TEST_CASE("fit from a sample matches the moment formula")
{
    // a non-Gamma law with an expansion that is not trivial: a mixture of two Gammas
    std::mt19937_64 rng(12);
    std::gamma_distribution<double> g1(2.0, 1.0), g2(6.0, 0.7);
    std::bernoulli_distribution pick(0.3);
    std::vector<double> y(200000);
    for (auto& v : y)
        v = pick(rng) ? g1(rng) : g2(rng);

    const LaguerreExpansion s = fit_from_sample(y, 6);
    // population moments, the convention fit_from_sample uses
    long double m1 = 0, m2 = 0;
    for (double v : y) {
        m1 += v;
        m2 += static_cast<long double>(v) * v;
    }
    std::vector<double> m = raw_moments(y, 6);
    m[0] = static_cast<double>(m1 / y.size());
    m[1] = static_cast<double>(m2 / y.size());
    const LaguerreExpansion e = fit_from_moments(m);
    CHECK(s.alpha == doctest::Approx(e.alpha).epsilon(1e-9));
    CHECK(s.beta == doctest::Approx(e.beta).epsilon(1e-9));
    CHECK(s.b[1] == 0.0);
    CHECK(s.b[2] == 0.0);
    for (std::size_t h = 3; h <= 6; ++h)
        CHECK(s.b[h] == doctest::Approx(e.b[h]).epsilon(1e-6));

    // N terms reproduce the first two sample moments
    for (std::size_t n : {0u, 3u, 6u}) {
        const double q1 = integrate([&](double t) { return t * density_eval(s, t, n); }, 0.0, 60.0);
        const double q2 = integrate([&](double t) { return t * t * density_eval(s, t, n); }, 0.0, 60.0);
        CHECK(q1 == doctest::Approx(m[0]).epsilon(1e-6));
        CHECK(q2 == doctest::Approx(m[1]).epsilon(1e-6));
    }
}

TEST_CASE("density_eval")
{
    LaguerreExpansion e;
    e.alpha = 3.0;
    e.beta = 1.5;
    e.tau = 1.5;
    const double mode = e.alpha * e.beta - e.beta;
    const double closed = std::pow(mode, 2.0) * std::exp(-mode / 1.5) / (2.0 * std::pow(1.5, 3.0));
    CHECK(density_eval(e, mode, 0) == doctest::Approx(closed).epsilon(1e-13));

    LaguerreExpansion f;
    f.alpha = 2.0;
    f.beta = 1.0;
    f.tau = 1.0;
    f.b = {1.0, 0.0, 0.0, 0.05, -0.03, 0.02};
    for (std::size_t n = 0; n <= 5; ++n)
        CHECK(integrate([&](double t) { return density_eval(f, t, n); }, 0.0, 60.0) ==
              doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(density_eval(f, 1.0, 6), ContractError);
}

TEST_CASE("expected log under the expansion")
{
    LaguerreExpansion exp1;
    CHECK(elog_closed_form(exp1, 0) == doctest::Approx(digamma(1.0)));

    LaguerreExpansion g32;
    g32.alpha = 3.0;
    g32.beta = 2.0;
    g32.tau = 2.0;
    CHECK(elog_closed_form(g32, 0) == doctest::Approx(1.6159).epsilon(1e-4));
    CHECK(elog_closed_form(g32, 0) == potential_gamma(3.0, 2.0));

    // E[log y] of chi^2 with four dof by Monte Carlo
    std::mt19937_64 rng(4);
    std::chi_squared_distribution<double> chi(4.0);
    const int n = 1000000;
    double s = 0.0, q = 0.0;
    for (int i = 0; i < n; ++i) {
        const double l = std::log(chi(rng));
        s += l;
        q += l * l;
    }
    const double mean = s / n;
    const double se = std::sqrt((q / n - mean * mean) / n);
    LaguerreExpansion chi4;
    chi4.alpha = 2.0;
    chi4.beta = 2.0;
    chi4.tau = 2.0;
    CHECK(std::abs(elog_closed_form(chi4, 0) - mean) < 3.0 * se);

    // term-by-term integration against quadrature of log(y) f(y)
    LaguerreExpansion f;
    f.alpha = 4.0;
    f.beta = 0.8;
    f.tau = 0.8;
    f.b = {1.0, 0.0, 0.0, 0.04, -0.02};
    const double quad = integrate([&](double t) { return t > 0.0 ? std::log(t) * density_eval(f, t, 4) : 0.0; },
                                  0.0, 60.0);
    CHECK(elog_closed_form(f, 4) == doctest::Approx(quad).epsilon(1e-8));
}

TEST_CASE("tau convergence condition")
{
    // tau = beta converges exactly when beta > lambda_max
    CHECK(tau_converges(20.0, 20.0, 10.0));
    CHECK_FALSE(tau_converges(2.0, 2.0, 10.0));
    CHECK(tau_converges(1.0, 2.0, 10.0));
}

TEST_CASE("quadratic form moments")
{
    const Eigen::Index p = 3;
    QuadraticFormSpec white{RealVector::Zero(2 * p), RealMatrix::Identity(2 * p, 2 * p), RealMatrix::Identity(2 * p, 2 * p)};
    QfMoments m = qf_moments(white);
    CHECK(m.gamma1 == doctest::Approx(2.0 * p));
    CHECK(m.gamma2 == doctest::Approx(4.0 * p + 4.0 * p * p));

    RealMatrix proj = RealMatrix::Zero(2 * p, 2 * p);
    proj(0, 0) = proj(1, 1) = 1.0;
    QuadraticFormSpec rank2{RealVector::Zero(2 * p), RealMatrix::Identity(2 * p, 2 * p), proj};
    m = qf_moments(rank2);
    CHECK(m.gamma1 == doctest::Approx(2.0));
    CHECK(m.gamma2 == doctest::Approx(8.0));

    QuadraticFormSpec bad{RealVector::Zero(3), RealMatrix::Identity(2, 2), RealMatrix::Identity(3, 3)};
    CHECK_THROWS_AS(qf_moments(bad), ContractError);

    // random quadratic form against Monte Carlo and against the eigen representation
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    QuadraticFormSpec spec;
    spec.mu = RealVector(8);
    for (Eigen::Index i = 0; i < 8; ++i)
        spec.mu(i) = 0.5 * g(rng);
    spec.sigma = random_spd(8, rng);
    const RealMatrix b = random_spd(8, rng);
    spec.a_iso = b;
    m = qf_moments(spec);

    const std::vector<QfTerm> terms = qf_eigen_representation(spec);
    double e1 = 0.0, var = 0.0;
    for (const auto& t : terms) {
        e1 += t.lambda * (t.nu + t.delta);
        var += 2.0 * t.lambda * t.lambda * (t.nu + 2.0 * t.delta);
    }
    CHECK(e1 == doctest::Approx(m.gamma1).epsilon(1e-10));
    CHECK(var + e1 * e1 == doctest::Approx(m.gamma2).epsilon(1e-10));

    const Eigen::LLT<RealMatrix> chol(spec.sigma);
    const RealMatrix l = chol.matrixL();
    const int n = 1000000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    RealVector w(8);
    for (int r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < 8; ++i)
            w(i) = g(rng);
        const RealVector x = spec.mu + l * w;
        const double q = x.dot(spec.a_iso * x);
        s1 += q;
        s2 += q * q;
        s4 += q * q * q * q;
    }
    const double mean1 = s1 / n, mean2 = s2 / n;
    CHECK(std::abs(mean1 - m.gamma1) < 3.0 * std::sqrt((mean2 - mean1 * mean1) / n));
    CHECK(std::abs(mean2 - m.gamma2) < 3.0 * std::sqrt((s4 / n - mean2 * mean2) / n));
}

TEST_CASE("eigen representation")
{
    const Eigen::Index d = 6;
    RealMatrix proj = RealMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < 4; ++i)
        proj(i, i) = 1.0;
    std::vector<QfTerm> t = qf_eigen_representation({RealVector::Zero(d), RealMatrix::Identity(d, d), proj});
    REQUIRE(t.size() == 1);
    CHECK(t[0].lambda == doctest::Approx(1.0));
    CHECK(t[0].nu == 4);
    CHECK(t[0].delta == doctest::Approx(0.0));

    t = qf_eigen_representation({RealVector::Zero(2), 4.0 * RealMatrix::Identity(2, 2), RealMatrix::Identity(2, 2)});
    REQUIRE(t.size() == 1);
    CHECK(t[0].lambda == doctest::Approx(4.0));
    CHECK(t[0].nu == 2);

    RealMatrix singular = RealMatrix::Identity(2, 2);
    singular(1, 1) = 0.0;
    CHECK_THROWS_AS(qf_eigen_representation({RealVector::Zero(2), singular, RealMatrix::Identity(2, 2)}),
                    NumericalError);

    // sampling sum lambda_r chi^2_nu_r(delta_r) against direct sampling of x^T A x
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    QuadraticFormSpec spec;
    spec.mu = RealVector(4);
    spec.mu << 0.5, -0.2, 0.1, 0.8;
    spec.sigma = random_spd(4, rng);
    spec.a_iso = random_spd(4, rng);
    t = qf_eigen_representation(spec);
    const int n = 100000;
    std::vector<double> direct(n), mixed(n);
    const RealMatrix l = Eigen::LLT<RealMatrix>(spec.sigma).matrixL();
    RealVector w(4);
    for (int r = 0; r < n; ++r) {
        for (Eigen::Index i = 0; i < 4; ++i)
            w(i) = g(rng);
        const RealVector x = spec.mu + l * w;
        direct[r] = x.dot(spec.a_iso * x);
        double q = 0.0;
        for (const auto& term : t) {
            double c = 0.0;
            for (int i = 0; i < term.nu; ++i) {
                const double e = g(rng) + (i == 0 ? std::sqrt(term.delta) : 0.0);
                c += e * e;
            }
            q += term.lambda * c;
        }
        mixed[r] = q;
    }
    // two-sample critical value at 1%: K_0.01 sqrt(2 / n)
    CHECK(two_sample_ks(direct, mixed) < kolmogorov_critical(0.01) * std::sqrt(2.0 / n));
}

TEST_CASE("tridiagonal isomorph")
{
    CHECK(tridiagonal_z_isomorph({0.0, 0.0}, 4) == RealMatrix::Identity(8, 8));

    const RealMatrix iso = tridiagonal_z_isomorph({0.0, 1.0}, 3);
    for (Eigen::Index i = 0; i < 6; ++i)
        CHECK(iso(i, i) == 2.0);
    CHECK(iso(1, 3) == 1.0);
    CHECK(iso(0, 4) == -1.0);
    CHECK(iso(0, 1) == 0.0);
    CHECK((iso - iso.transpose()).norm() == 0.0);

    // spectrum equals that of the complex matrix, each eigenvalue twice
    const Complex z(0.3, 0.4);
    const std::size_t p = 5;
    ComplexMatrix zc = ComplexMatrix::Zero(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        zc(i, i) = 1.0 + std::norm(z);
        if (i + 1 < p) {
            zc(i, i + 1) = -std::conj(z);
            zc(i + 1, i) = -z;
        }
    }
    const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(zc).eigenvalues();
    const RealVector er = Eigen::SelfAdjointEigenSolver<RealMatrix>(tridiagonal_z_isomorph(z, p)).eigenvalues();
    for (std::size_t i = 0; i < p; ++i) {
        CHECK(er(2 * i) == doctest::Approx(ev(i)).epsilon(1e-12));
        CHECK(er(2 * i + 1) == doctest::Approx(ev(i)).epsilon(1e-12));
    }
    CHECK(er.minCoeff() >= 0.0);
}
