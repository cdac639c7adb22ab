#include "condens/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "condens/error.hpp"
#include "condens/parallel.hpp"
#include "condens/special.hpp"

namespace condens {

Grid Grid::square(double lo, double hi, std::size_t m)
{
    require(m >= 3 && hi > lo, "Grid::square: m >= 3 and hi > lo required");
    return Grid{lo, lo, (hi - lo) / static_cast<double>(m - 1), m};
}

void Grid::validate() const
{
    require(delta > 0.0 && std::isfinite(delta), "Grid: delta must be positive");
    require(m >= 3, "Grid: m >= 3 required");
    require(std::isfinite(x0) && std::isfinite(y0), "Grid: corner must be finite");
}

void SmoothingParams::validate() const
{
    require(beta > 0.0 && std::isfinite(beta), "SmoothingParams: beta must be positive");
    require(gamma_scale() > 0.0 && std::isfinite(gamma_scale()), "SmoothingParams: sigma^2 * beta must be positive");
}

double DensityField::mass() const
{
    double s = 0.0;
    for (double d : density)
        s += d;
    return s * grid.delta * grid.delta;
}

std::span<const double> ProfileWorkspace::evaluate(const HankelPencil& pencil, Complex z)
{
    const std::size_t p = pencil.p();
    require(out_.size() == p, "ProfileWorkspace: pencil size mismatch");
    givens_pencil_diag_sq(pencil.r_re(), pencil.r_im(), p, z, out_, carry_);
    return out_;
}

std::vector<double> rkk_profile(const HankelPencil& pencil, Complex z)
{
    ProfileWorkspace ws(pencil.p());
    const auto view = ws.evaluate(pencil, z);
    return {view.begin(), view.end()};
}

std::vector<double> rkk_profile_direct(const HankelPencil& pencil, Complex z)
{
    return qr_gram_schmidt(pencil.pencil_at(z)).diag_sq;
}

double profile_deviation(std::span<const double> f, std::span<const double> d, double floor)
{
    require(f.size() == d.size() && !f.empty(), "profile_deviation: profiles differ in size");
    double scale = 0.0;
    for (double v : d)
        scale = std::max(scale, std::abs(v));
    double dev = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double ref = std::max(std::abs(d[k]), floor * scale);
        if (ref > 0.0)
            dev = std::max(dev, std::abs(f[k] - d[k]) / ref);
        else if (f[k] != 0.0)
            return std::numeric_limits<double>::infinity();
    }
    return dev;
}

double potential_smoothed(std::span<const double> rkk2, const SmoothingParams& params)
{
    require(!rkk2.empty(), "potential_smoothed: empty profile");
    const double scale = params.gamma_scale();
    double s = 0.0;
    for (double r : rkk2) {
        require(r >= 0.0, "potential_smoothed: negative |R_kk|^2");
        s += digamma(r / scale + 1.0);
    }
    return s / static_cast<double>(rkk2.size());
}

double potential_exact(std::span<const double> rkk2)
{
    require(!rkk2.empty(), "potential_exact: empty profile");
    double s = 0.0;
    for (double r : rkk2)
        s += std::log(std::max(r, kSingularFloor));
    return s / static_cast<double>(rkk2.size());
}

double potential_gamma(double alpha, double beta)
{
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("potential_gamma: alpha and beta must be positive");
    return std::log(beta) + digamma(alpha);
}

std::vector<double> discrete_laplacian(std::span<const double> field, std::size_t m, double delta)
{
    require(m >= 3, "discrete_laplacian: m >= 3 required");
    require(field.size() == m * m, "discrete_laplacian: field must hold m*m values");
    require(delta > 0.0, "discrete_laplacian: delta must be positive");
    const std::size_t mi = m - 2;
    const double inv = 1.0 / (delta * delta);
    std::vector<double> out(mi * mi);
    for (std::size_t j = 1; j + 1 < m; ++j) {
        for (std::size_t i = 1; i + 1 < m; ++i) {
            const double c = field[j * m + i];
            const double sum = field[j * m + i - 1] + field[j * m + i + 1] + field[(j - 1) * m + i] +
                               field[(j + 1) * m + i] - 4.0 * c;
            out[(j - 1) * mi + (i - 1)] = sum * inv;
        }
    }
    return out;
}

double mesh_from_epsilon(double epsilon, double c)
{
    if (!(epsilon > 0.0) || !(c > 0.0))
        throw DomainError("mesh_from_epsilon: epsilon and C must be positive");
    return c * std::sqrt(std::sqrt(epsilon));
}

std::vector<double> potential_grid(const HankelPencil& pencil, const Grid& grid, const SmoothingParams& params,
                                   PotentialKind kind, ProfilePath path)
{
    grid.validate();
    if (kind == PotentialKind::Smoothed)
        params.validate();
    const std::size_t m = grid.m;
    std::vector<double> pot(m * m);
    parallel_chunks(m, 1, [&](std::size_t jbegin, std::size_t jend) {
        ProfileWorkspace ws(pencil.p());
        std::vector<double> direct;
        for (std::size_t j = jbegin; j < jend; ++j) {
            for (std::size_t i = 0; i < m; ++i) {
                const Complex z = grid.node(i, j);
                std::span<const double> prof;
                if (path == ProfilePath::Fast) {
                    prof = ws.evaluate(pencil, z);
                } else {
                    direct = rkk_profile_direct(pencil, z);
                    prof = direct;
                }
                pot[j * m + i] = kind == PotentialKind::Smoothed ? potential_smoothed(prof, params)
                                                                  : potential_exact(prof);
            }
        }
    });
    return pot;
}

DensityField density_from_potential(const Grid& grid, std::vector<double> potential)
{
    grid.validate();
    require(potential.size() == grid.m * grid.m, "density_from_potential: potential size must be m*m");
    DensityField field;
    field.grid = grid;
    field.raw_density = discrete_laplacian(potential, grid.m, grid.delta);
    field.potential = std::move(potential);
    const double inv4pi = 1.0 / (4.0 * std::numbers::pi);
    for (double& v : field.raw_density)
        v *= inv4pi;
    field.density.resize(field.raw_density.size());
    double total = 0.0;
    for (std::size_t k = 0; k < field.density.size(); ++k) {
        field.density[k] = std::max(field.raw_density[k], 0.0);
        total += field.density[k];
    }
    total *= grid.delta * grid.delta;
    if (total > 0.0 && std::isfinite(total)) {
        for (double& v : field.density)
            v /= total;
        field.normalized = true;
    }
    return field;
}

DensityField condensed_density_grid(std::span<const HankelPencil> pencils, const Grid& grid,
                                    const SmoothingParams& params, PotentialKind kind)
{
    require(!pencils.empty(), "condensed_density_grid: at least one pencil required");
    std::vector<double> acc(grid.m * grid.m, 0.0);
    for (const HankelPencil& pencil : pencils) {
        const std::vector<double> pot = potential_grid(pencil, grid, params, kind);
        for (std::size_t k = 0; k < acc.size(); ++k)
            acc[k] += pot[k];
    }
    if (pencils.size() > 1) {
        const double inv = 1.0 / static_cast<double>(pencils.size());
        for (double& v : acc)
            v *= inv;
    }
    return density_from_potential(grid, std::move(acc));
}

DensityField condensed_density_grid(const HankelPencil& pencil, const Grid& grid, const SmoothingParams& params,
                                    PotentialKind kind)
{
    return condensed_density_grid(std::span<const HankelPencil>(&pencil, 1), grid, params, kind);
}

} // namespace condens
