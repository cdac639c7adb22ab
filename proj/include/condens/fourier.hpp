#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "condens/density.hpp"
#include "condens/model.hpp"

namespace condens {

/// F(t) = sum_j w_j chi_[l_j, l_{j+1}](t) on [-pi, pi].
///
/// `outer`, when set, is the value on the wrap-around interval
/// [l_{N+1}, l_1 + 2 pi]; otherwise F is zero there.
struct PiecewiseConstant {
    std::vector<double> breakpoints;
    std::vector<double> weights;
    std::optional<double> outer;

    void validate() const;
    double operator()(double t) const;
    /// sqrt(integral of F^2 over [-pi, pi]).
    double l2_norm() const;
};

/// s_k = (1/2) int F(t) e^{itk} dt = sum_j w_j sin(beta_j k) / k e^{i lambda_j k}, k = 0..n-1.
std::vector<Complex> fourier_coeffs(const PiecewiseConstant& f, std::size_t n);

/// `count` equispaced points on [-pi, pi).
std::vector<double> uniform_t_grid(std::size_t count = 2048);

/// a_0 / pi + (2 / pi) Re sum_{k>=1} a_k e^{-ikt} at every t.
std::vector<double> rough_estimate(std::span<const Complex> a, std::span<const double> t);

/// Arguments of the `n_breaks` largest local maxima, sorted ascending.
/// Throws EstimationError when the field has fewer maxima.
std::vector<double> breakpoints_from_density(const DensityField& field, std::size_t n_breaks);

/// Median of f_rough over the t-grid points in each [l_j, l_{j+1}].
/// Throws EstimationError when an interval holds no grid point.
std::vector<double> weights_by_median(std::span<const double> t, std::span<const double> f_rough,
                                      std::span<const double> l_hat);

/// Median of f_rough over the wrap interval t >= l_{N+1} or t <= l_1.
double wrap_weight_by_median(std::span<const double> t, std::span<const double> f_rough,
                             std::span<const double> l_hat);

/// sigma (under `convention`) giving std(s) / std(eps) = snr.
double sigma_for_snr(std::span<const Complex> s, double snr,
                     NoiseConvention convention = NoiseConvention::PerComponent);

struct ReconstructOptions {
    Grid grid;
    /// sigma of the data; beta defaults to 5n when left at 0.
    SmoothingParams params{0.0, 0.0};
    std::size_t t_points = 2048;
    /// Estimate the value on the wrap interval instead of fixing it to zero.
    bool wrap = true;
};

struct Reconstruction {
    PiecewiseConstant f;
    std::vector<double> t;
    std::vector<double> rough;
    std::vector<double> reconstructed;
    DensityField field;
};

/// build_pencil, condensed_density_grid, breakpoints_from_density,
/// rough_estimate, weights_by_median.
Reconstruction reconstruct(const NoisySeries& a, std::size_t n_breaks, const ReconstructOptions& options);

/// Root-mean-square difference on a uniform t-grid scaled to an L2 norm on [-pi, pi].
double l2_distance(std::span<const double> t, std::span<const double> f, const PiecewiseConstant& g);

} // namespace condens
