#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "condens/density.hpp"
#include "condens/laguerre.hpp"
#include "condens/model.hpp"

namespace condens {

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;

    std::size_t bins() const { return counts.size(); }
    double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
    double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
    /// counts[b] / (total * width(b)); values outside [edges.front(), edges.back()] are not counted
    /// but do enter `total`.
    double density(std::size_t b) const;

    /// Bin width 2 IQR / n^(1/3) over [min, max].
    static Histogram freedman_diaconis(std::span<const double> values);
    static Histogram fixed(std::span<const double> values, std::size_t bins, double lo, double hi);
};

/// L2 distance between a density and a histogram, integrated bin by bin at the bin centers.
template <class F>
double l2_to_histogram(const Histogram& h, F&& density)
{
    double s = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b) {
        const double d = density(h.center(b)) - h.density(b);
        s += d * d * h.width(b);
    }
    return std::sqrt(s);
}

/// First `count` raw moments E[y^r], r = 1..count, accumulated in extended precision
/// on y / mean(y) and rescaled.
std::vector<double> raw_moments(std::span<const double> values, std::size_t count);

struct SampleSummary {
    double mean = 0.0;
    double variance = 0.0; ///< unbiased
    double std_error = 0.0;
};
SampleSummary summarize(std::span<const double> values);

/// Monte Carlo configuration shared by the experiments. Replicate r draws its
/// noise from Rng(derive_seed(seed, r)).
struct McConfig {
    std::size_t replicates = 100000;
    std::uint64_t seed = 1;
    NoiseConvention convention = NoiseConvention::PerComponent;
};

/// |R_kk(z)|^2 of the Hankel pencil of s + noise for each 1-based k in `ks`,
/// one value per replicate: result[i][r] belongs to ks[i].
std::vector<std::vector<double>> sample_rkk(std::span<const Complex> signal, double sigma, Complex z,
                                            std::span<const std::size_t> ks, const McConfig& config);

struct EmpiricalRkk {
    std::vector<double> values;
    Histogram histogram;
    std::vector<double> moments; ///< gamma_hat_1..gamma_hat_10
    SampleSummary summary;
};

/// Freedman-Diaconis histogram, first 10 raw moments and summary of a sample.
EmpiricalRkk summarize_rkk(std::vector<double> values);

/// sample_rkk for one k plus summarize_rkk.
EmpiricalRkk empirical_rkk(std::span<const Complex> signal, double sigma, Complex z, std::size_t k,
                           const McConfig& config);

/// 1-term and `terms`-term Laguerre fits of an empirical sample and their L2
/// distances to its histogram.
struct LaguerreFitReport {
    std::size_t k = 0;
    LaguerreExpansion fit;
    double l2_one_term = 0.0;
    double l2_full = 0.0;
    std::size_t terms = 10;
};
LaguerreFitReport laguerre_fit_report(const EmpiricalRkk& sample, std::size_t k, std::size_t terms = 10,
                                      MomentScaling scaling = MomentScaling::Scaled);

/// sup_x |F_n(x) - F(x)| of a sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> values, Cdf&& cdf)
{
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// Kolmogorov distribution P(sqrt(n) D <= x) as n -> infinity.
double kolmogorov_cdf(double x);
/// x with kolmogorov_cdf(x) = 1 - alpha.
double kolmogorov_critical(double alpha);

/// CDF of chi^2 with `dof` degrees of freedom.
double chi2_cdf(double x, double dof);

struct Chi2Report {
    std::size_t p = 0;
    std::size_t k = 0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double reference_dof = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double mean_std_error = 0.0;
    double ks = 0.0;
    double ks_critical = 0.0; ///< at the 1% level, already divided by sqrt(N)
    bool pass = false;
};

/// |R_kk|^2 of p x p matrices with iid standard complex Gaussian entries
/// (unit variance per real component) against chi^2 with reference_dof
/// degrees of freedom (0 selects 2(p-k+1)). Passes when the KS statistic is
/// below the 1% critical value.
Chi2Report chi2_check(std::size_t p, std::size_t k, std::size_t replicates, std::uint64_t seed,
                      double reference_dof = 0.0);

/// Condensed density from the potentials of `replicates` independent noisy pencils.
DensityField mc_condensed_density(std::span<const Complex> signal, double sigma, const Grid& grid,
                                  const SmoothingParams& params, const McConfig& config,
                                  PotentialKind kind = PotentialKind::Smoothed);

struct MonotonicityRow {
    double sigma = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_se = 0.0; ///< bootstrap standard errors
    double beta_se = 0.0;
};

struct MonotonicityReport {
    std::vector<MonotonicityRow> rows;
    std::size_t k = 0;
    Complex z;
    /// beta_hat(sigma_{i+1}) >= beta_hat(sigma_i) - 2 sqrt(se_i^2 + se_{i+1}^2) for every i.
    bool nondecreasing = false;
};

/// Gamma fits of |R_kk(z)|^2 for each sigma with bootstrap error bars.
MonotonicityReport monotonicity_check(std::span<const Complex> signal, std::span<const double> sigmas, Complex z,
                                      std::size_t k, const McConfig& config, std::size_t bootstrap = 200);

struct BenchRow {
    std::size_t p = 0;
    double fast_seconds_per_point = 0.0;
    double direct_seconds_per_point = 0.0;
    double max_rel_deviation = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::size_t m = 0;
    double fast_exponent = 0.0;
    double direct_exponent = 0.0;
};

/// Per-grid-point cost of the smoothed potential through the fast and the direct
/// profile paths on an m x m grid, with log-log exponents in p.
BenchReport bench_profiles(std::span<const std::size_t> ps, std::size_t m, std::uint64_t seed, double min_seconds = 0.2);

/// Least squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

} // namespace condens
