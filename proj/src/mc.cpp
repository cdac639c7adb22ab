#include "condens/mc.hpp"

#include <chrono>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "condens/error.hpp"
#include "condens/parallel.hpp"

namespace condens {

namespace {

constexpr std::size_t kChunk = 512;

double quantile_sorted(const std::vector<double>& v, double q)
{
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

ComplexMatrix hankel_pencil_matrix(std::span<const Complex> a, Complex z)
{
    const auto p = static_cast<Eigen::Index>(a.size() / 2);
    ComplexMatrix g(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
            g(i, j) = a[static_cast<std::size_t>(i + j + 1)] - z * a[static_cast<std::size_t>(i + j)];
    return g;
}

} // namespace

double Histogram::density(std::size_t b) const
{
    if (total == 0)
        return 0.0;
    return static_cast<double>(counts[b]) / (static_cast<double>(total) * width(b));
}

Histogram Histogram::fixed(std::span<const double> values, std::size_t bins, double lo, double hi)
{
    require(bins >= 1 && hi > lo, "Histogram::fixed: need bins >= 1 and hi > lo");
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    h.total = values.size();
    const double scale = static_cast<double>(bins) / (hi - lo);
    for (double v : values) {
        if (v < lo || v > hi)
            continue;
        auto b = static_cast<std::size_t>((v - lo) * scale);
        h.counts[std::min(b, bins - 1)] += 1;
    }
    return h;
}

Histogram Histogram::freedman_diaconis(std::span<const double> values)
{
    require(values.size() >= 2, "Histogram::freedman_diaconis: at least two values required");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (!(hi > lo))
        return fixed(values, 1, lo - 0.5, lo + 0.5);
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    std::size_t bins = 1;
    if (width > 0.0)
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::clamp<std::size_t>(bins, 1, 100000);
    return fixed(values, bins, lo, hi);
}

std::vector<double> raw_moments(std::span<const double> values, std::size_t count)
{
    require(!values.empty(), "raw_moments: empty sample");
    long double mean = 0.0L;
    for (double v : values)
        mean += v;
    mean /= static_cast<long double>(values.size());
    const long double scale = mean != 0.0L ? mean : 1.0L;
    std::vector<long double> acc(count, 0.0L);
    for (double v : values) {
        const long double y = static_cast<long double>(v) / scale;
        long double pw = 1.0L;
        for (std::size_t r = 0; r < count; ++r) {
            pw *= y;
            acc[r] += pw;
        }
    }
    std::vector<double> out(count);
    long double factor = 1.0L;
    for (std::size_t r = 0; r < count; ++r) {
        factor *= scale;
        out[r] = static_cast<double>(acc[r] / static_cast<long double>(values.size()) * factor);
    }
    return out;
}

SampleSummary summarize(std::span<const double> values)
{
    require(values.size() >= 2, "summarize: at least two values required");
    long double sum = 0.0L;
    for (double v : values)
        sum += v;
    const long double mean = sum / static_cast<long double>(values.size());
    long double ss = 0.0L;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    SampleSummary s;
    s.mean = static_cast<double>(mean);
    s.variance = static_cast<double>(ss / static_cast<long double>(values.size() - 1));
    s.std_error = std::sqrt(s.variance / static_cast<double>(values.size()));
    return s;
}

std::vector<std::vector<double>> sample_rkk(std::span<const Complex> signal, double sigma, Complex z,
                                            std::span<const std::size_t> ks, const McConfig& config)
{
    require(signal.size() >= 4 && signal.size() % 2 == 0, "sample_rkk: signal length must be even and >= 4");
    const std::size_t p = signal.size() / 2;
    for (std::size_t k : ks)
        require(k >= 1 && k <= p, "sample_rkk: k must lie in 1..p");
    require(config.replicates >= 1, "sample_rkk: at least one replicate required");

    std::vector<std::vector<double>> out(ks.size(), std::vector<double>(config.replicates));
    parallel_chunks(config.replicates, kChunk, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng(derive_seed(config.seed, r));
            const NoisySeries a = add_noise(signal, sigma, rng, config.convention);
            const Eigen::HouseholderQR<ComplexMatrix> qr(hankel_pencil_matrix(a.a(), z));
            for (std::size_t i = 0; i < ks.size(); ++i) {
                const auto kk = static_cast<Eigen::Index>(ks[i] - 1);
                out[i][r] = std::norm(qr.matrixQR()(kk, kk));
            }
        }
    });
    return out;
}

EmpiricalRkk summarize_rkk(std::vector<double> values)
{
    EmpiricalRkk e;
    e.histogram = Histogram::freedman_diaconis(values);
    e.moments = raw_moments(values, 10);
    e.summary = summarize(values);
    e.values = std::move(values);
    return e;
}

EmpiricalRkk empirical_rkk(std::span<const Complex> signal, double sigma, Complex z, std::size_t k,
                           const McConfig& config)
{
    const std::size_t ks[] = {k};
    return summarize_rkk(std::move(sample_rkk(signal, sigma, z, ks, config)[0]));
}

LaguerreFitReport laguerre_fit_report(const EmpiricalRkk& sample, std::size_t k, std::size_t terms,
                                      MomentScaling scaling)
{
    require(terms >= 2 && sample.moments.size() >= terms, "laguerre_fit_report: need 2 <= terms <= moments");
    LaguerreFitReport rep;
    rep.k = k;
    rep.terms = terms;
    if (scaling == MomentScaling::Scaled && !sample.values.empty())
        rep.fit = fit_from_sample(sample.values, terms);
    else
        rep.fit = fit_from_moments(std::span<const double>(sample.moments.data(), terms), scaling);
    rep.l2_one_term = l2_to_histogram(sample.histogram, [&](double y) { return density_eval(rep.fit, std::max(y, 0.0), 0); });
    rep.l2_full = l2_to_histogram(sample.histogram, [&](double y) { return density_eval(rep.fit, std::max(y, 0.0), terms); });
    return rep;
}

double kolmogorov_cdf(double x)
{
    if (x <= 0.0)
        return 0.0;
    constexpr double pi2 = 9.869604401089358;
    if (x < 1.0) {
        // sqrt(2 pi) / x sum exp(-(2j-1)^2 pi^2 / (8 x^2))
        double s = 0.0;
        for (int j = 1; j <= 20; ++j) {
            const double t = (2.0 * j - 1.0);
            s += std::exp(-t * t * pi2 / (8.0 * x * x));
        }
        return std::sqrt(2.0 * std::numbers::pi) / x * s;
    }
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        s += (j % 2 == 1) ? term : -term;
        if (term < 1e-18)
            break;
    }
    return 1.0 - 2.0 * s;
}

double kolmogorov_critical(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("kolmogorov_critical: alpha must lie in (0, 1)");
    double lo = 0.1;
    double hi = 5.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid) < 1.0 - alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double chi2_cdf(double x, double dof)
{
    if (!(dof > 0.0))
        throw DomainError("chi2_cdf: dof must be positive");
    if (x <= 0.0)
        return 0.0;
    return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

Chi2Report chi2_check(std::size_t p, std::size_t k, std::size_t replicates, std::uint64_t seed, double reference_dof)
{
    require(p >= 1 && k >= 1 && k <= p, "chi2_check: need 1 <= k <= p");
    require(replicates >= 1000, "chi2_check: at least 1000 replicates required");
    Chi2Report rep;
    rep.p = p;
    rep.k = k;
    rep.replicates = replicates;
    rep.seed = seed;
    rep.reference_dof = reference_dof > 0.0 ? reference_dof : 2.0 * static_cast<double>(p - k + 1);

    std::vector<double> values(replicates);
    const auto n = static_cast<Eigen::Index>(p);
    const auto kk = static_cast<Eigen::Index>(k - 1);
    parallel_chunks(replicates, kChunk, [&](std::size_t begin, std::size_t end) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        ComplexMatrix g(n, n);
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng(derive_seed(seed, r));
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    g(i, j) = Complex(re, im);
                }
            const Eigen::HouseholderQR<ComplexMatrix> qr(g);
            values[r] = std::norm(qr.matrixQR()(kk, kk));
        }
    });
    const SampleSummary s = summarize(values);
    rep.mean = s.mean;
    rep.variance = s.variance;
    rep.mean_std_error = s.std_error;
    const double dof = rep.reference_dof;
    rep.ks = ks_statistic(std::move(values), [dof](double x) { return chi2_cdf(x, dof); });
    rep.ks_critical = kolmogorov_critical(0.01) / std::sqrt(static_cast<double>(replicates));
    rep.pass = rep.ks < rep.ks_critical;
    return rep;
}

DensityField mc_condensed_density(std::span<const Complex> signal, double sigma, const Grid& grid,
                                  const SmoothingParams& params, const McConfig& config, PotentialKind kind)
{
    require(config.replicates >= 1, "mc_condensed_density: at least one replicate required");
    std::vector<HankelPencil> pencils;
    pencils.reserve(config.replicates);
    for (std::size_t r = 0; r < config.replicates; ++r) {
        Rng rng(derive_seed(config.seed, r));
        pencils.push_back(build_pencil(add_noise(signal, sigma, rng, config.convention)));
    }
    return condensed_density_grid(pencils, grid, params, kind);
}

namespace {

std::pair<double, double> gamma_fit(double m1, double m2)
{
    const double var = m2 - m1 * m1;
    if (!(m1 > 0.0) || !(var > 0.0))
        return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    return {m1 * m1 / var, var / m1};
}

} // namespace

MonotonicityReport monotonicity_check(std::span<const Complex> signal, std::span<const double> sigmas, Complex z,
                                      std::size_t k, const McConfig& config, std::size_t bootstrap)
{
    require(sigmas.size() >= 2, "monotonicity_check: at least two sigma values required");
    MonotonicityReport rep;
    rep.k = k;
    rep.z = z;
    const std::size_t ks[] = {k};
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
        McConfig cfg = config;
        cfg.seed = derive_seed(config.seed, 1000003 + s);
        const std::vector<double> v = std::move(sample_rkk(signal, sigmas[s], z, ks, cfg)[0]);
        const std::vector<double> mom = raw_moments(v, 2);
        MonotonicityRow row;
        row.sigma = sigmas[s];
        std::tie(row.alpha, row.beta) = gamma_fit(mom[0], mom[1]);

        std::vector<double> alphas, betas;
        Rng rng(derive_seed(cfg.seed, 0xB007));
        std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
        for (std::size_t b = 0; b < bootstrap; ++b) {
            long double s1 = 0.0L, s2 = 0.0L;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const long double y = v[pick(rng)];
                s1 += y;
                s2 += y * y;
            }
            const double n = static_cast<double>(v.size());
            const auto [a, bb] = gamma_fit(static_cast<double>(s1 / n), static_cast<double>(s2 / n));
            alphas.push_back(a);
            betas.push_back(bb);
        }
        if (bootstrap >= 2) {
            row.alpha_se = std::sqrt(summarize(alphas).variance);
            row.beta_se = std::sqrt(summarize(betas).variance);
        }
        rep.rows.push_back(row);
    }
    rep.nondecreasing = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = rep.rows[i + 1];
        const double slack = 2.0 * std::hypot(a.beta_se, b.beta_se);
        if (b.sigma >= a.sigma && b.beta < a.beta - slack)
            rep.nondecreasing = false;
    }
    return rep;
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need two or more points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

BenchReport bench_profiles(std::span<const std::size_t> ps, std::size_t m, std::uint64_t seed, double min_seconds)
{
    require(ps.size() >= 2, "bench_profiles: at least two sizes required");
    using clock = std::chrono::steady_clock;
    BenchReport rep;
    rep.m = m;
    const Grid grid = Grid::square(-1.5, 1.5, m);
    const unsigned saved = thread_count();
    set_thread_count(1);

    // Best of five timing windows, each at least min_seconds / 5 long.
    auto time_per_point = [&](const HankelPencil& pencil, const SmoothingParams& params, ProfilePath path) {
        double best = std::numeric_limits<double>::infinity();
        double sink = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            std::size_t reps = 0;
            const auto start = clock::now();
            double elapsed = 0.0;
            do {
                sink += potential_grid(pencil, grid, params, PotentialKind::Smoothed, path)[0];
                ++reps;
                elapsed = std::chrono::duration<double>(clock::now() - start).count();
            } while (elapsed < min_seconds / 5.0);
            best = std::min(best, elapsed / static_cast<double>(reps * m * m));
        }
        if (!std::isfinite(sink))
            throw NumericalError("bench_profiles: non-finite potential");
        return best;
    };

    std::vector<double> px, fast, direct;
    for (std::size_t p : ps) {
        require(p >= 2, "bench_profiles: p >= 2 required");
        // unit-variance noise plus the five-component test signal
        const auto model = ExponentialModel::reference();
        Rng rng(derive_seed(seed, p));
        const NoisySeries a = add_noise(synth_signal(model, 2 * p), 1.0, rng);
        const HankelPencil pencil = build_pencil(a);
        const SmoothingParams params{1.0, 5.0 * static_cast<double>(2 * p)};

        BenchRow row;
        row.p = p;
        row.fast_seconds_per_point = time_per_point(pencil, params, ProfilePath::Fast);
        row.direct_seconds_per_point = time_per_point(pencil, params, ProfilePath::Direct);
        ProfileWorkspace ws(p);
        for (std::size_t j = 0; j < m; j += std::max<std::size_t>(1, m / 8))
            for (std::size_t i = 0; i < m; i += std::max<std::size_t>(1, m / 8)) {
                const Complex z = grid.node(i, j);
                const auto f = ws.evaluate(pencil, z);
                const auto d = rkk_profile_direct(pencil, z);
                row.max_rel_deviation = std::max(row.max_rel_deviation, profile_deviation(f, d, 0.0));
            }
        rep.rows.push_back(row);
        px.push_back(static_cast<double>(p));
        fast.push_back(row.fast_seconds_per_point);
        direct.push_back(row.direct_seconds_per_point);
    }
    set_thread_count(saved);
    rep.fast_exponent = loglog_slope(px, fast);
    rep.direct_exponent = loglog_slope(px, direct);
    return rep;
}

} // namespace condens
