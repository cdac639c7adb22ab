#pragma once

#include <span>
#include <vector>

#include "condens/linalg.hpp"
#include "condens/model.hpp"

namespace condens {

/// Square lattice of m x m nodes z = (x0 + i delta) + 1i (y0 + j delta).
/// Node (i, j) is stored at index j * m + i (rows run along y).
struct Grid {
    double x0 = -1.5;
    double y0 = -1.5;
    double delta = 3.0 / 99.0;
    std::size_t m = 100;

    /// m nodes spanning [lo, hi] on both axes.
    static Grid square(double lo, double hi, std::size_t m);

    void validate() const;
    Complex node(std::size_t i, std::size_t j) const
    {
        return {x0 + static_cast<double>(i) * delta, y0 + static_cast<double>(j) * delta};
    }
    std::size_t interior() const { return m - 2; }
};

/// Noise scale and smoothing parameter; the Gamma scale is fixed to sigma^2 * beta.
struct SmoothingParams {
    double sigma = 0.0;
    double beta = 1.0;

    void validate() const;
    double gamma_scale() const { return sigma * sigma * beta; }
};

enum class PotentialKind {
    Smoothed, ///< (1/p) sum Psi(|R_kk|^2 / (sigma^2 beta) + 1)
    Exact,    ///< (1/p) sum log(max(|R_kk|^2, 1e-300))
};

enum class ProfilePath { Fast, Direct };

/// Potential on all m^2 nodes plus the Laplacian-derived density on the
/// (m-2)^2 interior nodes. Interior node (i, j) of the density maps to grid
/// node (i+1, j+1) and is stored at j * (m-2) + i.
struct DensityField {
    Grid grid;
    std::vector<double> potential;
    std::vector<double> raw_density; ///< Laplacian / (4 pi), unclamped
    std::vector<double> density;     ///< clamped at 0 and renormalized when `normalized`
    bool normalized = false;

    double density_at(std::size_t i, std::size_t j) const { return density[j * grid.interior() + i]; }
    Complex interior_node(std::size_t i, std::size_t j) const { return grid.node(i + 1, j + 1); }
    /// Sum of density * delta^2.
    double mass() const;
};

/// |R_kk(z)|^2 of U1 - z U0 through the cached factor of U and Givens rotations on C(z).
std::vector<double> rkk_profile(const HankelPencil& pencil, Complex z);

/// Reusable buffers for repeated rkk_profile calls on pencils of one size.
class ProfileWorkspace {
public:
    explicit ProfileWorkspace(std::size_t p) : carry_(2 * p), out_(p) {}
    std::span<const double> evaluate(const HankelPencil& pencil, Complex z);

private:
    std::vector<double> carry_;
    std::vector<double> out_;
};

/// Same contract through a Gram-Schmidt factorization of U1 - z U0 formed explicitly.
std::vector<double> rkk_profile_direct(const HankelPencil& pencil, Complex z);

/// max_k |f_k - d_k| / max(|d_k|, floor * max_j |d_j|): relative deviation of a
/// profile from a reference, with entries far below the profile scale measured
/// against that scale.
double profile_deviation(std::span<const double> f, std::span<const double> d, double floor);

/// (1/p) sum_k Psi(rkk2[k] / (sigma^2 beta) + 1).
double potential_smoothed(std::span<const double> rkk2, const SmoothingParams& params);

/// (1/p) sum_k log(max(rkk2[k], 1e-300)).
double potential_exact(std::span<const double> rkk2);

/// E[log Y] for Y ~ Gamma(shape alpha, scale beta): log(beta) + Psi(alpha).
double potential_gamma(double alpha, double beta);

/// Five-point Laplacian on the interior of an m x m field (index j * m + i).
std::vector<double> discrete_laplacian(std::span<const double> field, std::size_t m, double delta);

/// Mesh size C * epsilon^(1/4) balancing discretization and potential error.
double mesh_from_epsilon(double epsilon, double c = 1.0);

/// Potential of one pencil at every grid node.
std::vector<double> potential_grid(const HankelPencil& pencil, const Grid& grid, const SmoothingParams& params,
                                   PotentialKind kind = PotentialKind::Smoothed,
                                   ProfilePath path = ProfilePath::Fast);

/// Laplacian / (4 pi), clamp at zero, renormalize to unit mass over the grid.
DensityField density_from_potential(const Grid& grid, std::vector<double> potential);

/// Condensed density from the potential averaged over one or more pencils.
DensityField condensed_density_grid(std::span<const HankelPencil> pencils, const Grid& grid,
                                    const SmoothingParams& params,
                                    PotentialKind kind = PotentialKind::Smoothed);

DensityField condensed_density_grid(const HankelPencil& pencil, const Grid& grid,
                                    const SmoothingParams& params,
                                    PotentialKind kind = PotentialKind::Smoothed);

} // namespace condens
