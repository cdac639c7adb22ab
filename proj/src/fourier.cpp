#include "condens/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "condens/error.hpp"
#include "condens/estimate.hpp"

namespace condens {

namespace {

constexpr double kPi = std::numbers::pi;

// (1/2) int_u^v e^{itk} dt
Complex interval_coeff(double u, double v, std::size_t k)
{
    if (k == 0)
        return 0.5 * (v - u);
    const double kk = static_cast<double>(k);
    const double half = 0.5 * (v - u);
    const double mid = 0.5 * (v + u);
    return std::sin(half * kk) / kk * std::polar(1.0, mid * kk);
}

double median_of(std::vector<double>& v)
{
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1)
        return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace

void PiecewiseConstant::validate() const
{
    if (breakpoints.empty()) {
        require(weights.empty(), "PiecewiseConstant: weights without breakpoints");
        return;
    }
    require(breakpoints.size() >= 2, "PiecewiseConstant: need at least two breakpoints");
    require(weights.size() + 1 == breakpoints.size(), "PiecewiseConstant: need one weight per interval");
    require(breakpoints.front() >= -kPi && breakpoints.back() <= kPi, "PiecewiseConstant: breakpoints outside [-pi, pi]");
    for (std::size_t j = 1; j < breakpoints.size(); ++j)
        require(breakpoints[j] > breakpoints[j - 1], "PiecewiseConstant: breakpoints must be strictly increasing");
    for (double w : weights)
        require(std::isfinite(w), "PiecewiseConstant: weights must be finite");
}

double PiecewiseConstant::operator()(double t) const
{
    const double off = outer.value_or(0.0);
    if (breakpoints.empty() || t < breakpoints.front() || t > breakpoints.back())
        return off;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    std::size_t j = static_cast<std::size_t>(it - breakpoints.begin());
    j = std::min(j, weights.size());
    return weights[j - 1];
}

double PiecewiseConstant::l2_norm() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j)
        s += weights[j] * weights[j] * (breakpoints[j + 1] - breakpoints[j]);
    if (outer) {
        const double inner = breakpoints.empty() ? 0.0 : breakpoints.back() - breakpoints.front();
        s += *outer * *outer * (2.0 * kPi - inner);
    }
    return std::sqrt(s);
}

std::vector<Complex> fourier_coeffs(const PiecewiseConstant& f, std::size_t n)
{
    require(n >= 2, "fourier_coeffs: n >= 2 required");
    f.validate();
    std::vector<Complex> s(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        Complex sum = 0.0;
        for (std::size_t j = 0; j < f.weights.size(); ++j)
            sum += f.weights[j] * interval_coeff(f.breakpoints[j], f.breakpoints[j + 1], k);
        if (f.outer && *f.outer != 0.0) {
            // full circle minus the covered span
            Complex wrap = k == 0 ? Complex(kPi) : Complex(0.0);
            if (!f.breakpoints.empty())
                wrap -= interval_coeff(f.breakpoints.front(), f.breakpoints.back(), k);
            sum += *f.outer * wrap;
        }
        s[k] = sum;
    }
    return s;
}

std::vector<double> uniform_t_grid(std::size_t count)
{
    require(count >= 2, "uniform_t_grid: count >= 2 required");
    std::vector<double> t(count);
    const double step = 2.0 * kPi / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = -kPi + step * static_cast<double>(i);
    return t;
}

std::vector<double> rough_estimate(std::span<const Complex> a, std::span<const double> t)
{
    std::vector<double> out(t.size(), 0.0);
    if (a.empty())
        return out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        require(t[i] >= -kPi && t[i] <= kPi, "rough_estimate: t outside [-pi, pi]");
        const Complex step = std::polar(1.0, -t[i]);
        Complex w = step;
        double acc = 0.0;
        for (std::size_t k = 1; k < a.size(); ++k) {
            acc += (a[k] * w).real();
            w *= step;
        }
        out[i] = a[0].real() / kPi + 2.0 / kPi * acc;
    }
    return out;
}

std::vector<double> breakpoints_from_density(const DensityField& field, std::size_t n_breaks)
{
    require(n_breaks >= 1, "breakpoints_from_density: n_breaks >= 1 required");
    const std::vector<Peak> peaks = local_maxima(field);
    if (peaks.size() < n_breaks)
        throw EstimationError("breakpoints_from_density: " + std::to_string(peaks.size()) + " maxima for " +
                              std::to_string(n_breaks) + " breakpoints");
    std::vector<double> l(n_breaks);
    for (std::size_t j = 0; j < n_breaks; ++j)
        l[j] = std::arg(peaks[j].z);
    std::sort(l.begin(), l.end());
    return l;
}

std::vector<double> weights_by_median(std::span<const double> t, std::span<const double> f_rough,
                                      std::span<const double> l_hat)
{
    require(l_hat.size() >= 2, "weights_by_median: at least two breakpoints required");
    require(t.size() == f_rough.size(), "weights_by_median: t and F sizes differ");
    std::vector<double> w(l_hat.size() - 1);
    std::vector<double> bucket;
    for (std::size_t j = 0; j + 1 < l_hat.size(); ++j) {
        bucket.clear();
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= l_hat[j] && t[i] <= l_hat[j + 1])
                bucket.push_back(f_rough[i]);
        if (bucket.empty())
            throw EstimationError("weights_by_median: no grid point in interval " + std::to_string(j + 1));
        w[j] = median_of(bucket);
    }
    return w;
}

double wrap_weight_by_median(std::span<const double> t, std::span<const double> f_rough,
                             std::span<const double> l_hat)
{
    require(!l_hat.empty(), "wrap_weight_by_median: breakpoints required");
    require(t.size() == f_rough.size(), "wrap_weight_by_median: t and F sizes differ");
    std::vector<double> bucket;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= l_hat.back() || t[i] <= l_hat.front())
            bucket.push_back(f_rough[i]);
    if (bucket.empty())
        throw EstimationError("wrap_weight_by_median: no grid point in the wrap interval");
    return median_of(bucket);
}

double sigma_for_snr(std::span<const Complex> s, double snr, NoiseConvention convention)
{
    require(!s.empty(), "sigma_for_snr: empty signal");
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("sigma_for_snr: snr must be positive");
    Complex mean = 0.0;
    for (Complex v : s)
        mean += v;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (Complex v : s)
        var += std::norm(v - mean);
    const double sd = std::sqrt(var / static_cast<double>(s.size()));
    const double total = sd / snr;
    return convention == NoiseConvention::PerComponent ? total / std::numbers::sqrt2 : total;
}

Reconstruction reconstruct(const NoisySeries& a, std::size_t n_breaks, const ReconstructOptions& options)
{
    require(n_breaks >= 2, "reconstruct: at least two breakpoints required");
    SmoothingParams params = options.params;
    if (params.beta == 0.0)
        params.beta = 5.0 * static_cast<double>(a.n());

    Reconstruction out;
    out.field = condensed_density_grid(build_pencil(a), options.grid, params);
    const std::vector<double> l_hat = breakpoints_from_density(out.field, n_breaks);
    for (std::size_t j = 1; j < l_hat.size(); ++j)
        if (!(l_hat[j] > l_hat[j - 1]))
            throw EstimationError("reconstruct: two maxima share the same argument");
    out.t = uniform_t_grid(options.t_points);
    out.rough = rough_estimate(a.a(), out.t);
    out.f.breakpoints = l_hat;
    out.f.weights = weights_by_median(out.t, out.rough, l_hat);
    if (options.wrap)
        out.f.outer = wrap_weight_by_median(out.t, out.rough, l_hat);
    out.f.validate();
    out.reconstructed.resize(out.t.size());
    for (std::size_t i = 0; i < out.t.size(); ++i)
        out.reconstructed[i] = out.f(out.t[i]);
    return out;
}

double l2_distance(std::span<const double> t, std::span<const double> f, const PiecewiseConstant& g)
{
    require(t.size() == f.size() && !t.empty(), "l2_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = f[i] - g(t[i]);
        s += d * d;
    }
    return std::sqrt(s * 2.0 * kPi / static_cast<double>(t.size()));
}

} // namespace condens
