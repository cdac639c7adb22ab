#include "condens/condens.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "condens/commands.hpp"
#include "condens/error.hpp"
#include "condens/parallel.hpp"

struct condens_series {
    condens::NoisySeries a;
};

struct condens_field {
    condens::DensityField field;
};

struct condens_estimate {
    condens::EstimateResult result;
};

namespace {

thread_local std::string g_last_error;

template <class F>
condens_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return CONDENS_OK;
    } catch (const condens::EstimationError& e) {
        g_last_error = e.what();
        return CONDENS_E_ESTIMATION;
    } catch (const condens::NumericalError& e) {
        g_last_error = e.what();
        return CONDENS_E_NUMERICAL;
    } catch (const condens::DomainError& e) {
        g_last_error = e.what();
        return CONDENS_E_DOMAIN;
    } catch (const condens::ContractError& e) {
        g_last_error = e.what();
        return CONDENS_E_CONTRACT;
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return CONDENS_E_CONTRACT;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return CONDENS_E_CONTRACT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CONDENS_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return CONDENS_E_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    if (p == nullptr)
        throw condens::ContractError(std::string(what) + " must not be NULL");
}

std::vector<condens::Complex> unpack(const double* v, std::size_t n)
{
    std::vector<condens::Complex> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = {v[2 * k], v[2 * k + 1]};
    return out;
}

void pack(std::span<const condens::Complex> z, double* out)
{
    for (std::size_t k = 0; k < z.size(); ++k) {
        out[2 * k] = z[k].real();
        out[2 * k + 1] = z[k].imag();
    }
}

condens::NoiseConvention convention(condens_convention c)
{
    return c == CONDENS_TOTAL ? condens::NoiseConvention::Total : condens::NoiseConvention::PerComponent;
}

} // namespace

extern "C" {

const char* condens_last_error(void)
{
    return g_last_error.c_str();
}

const char* condens_version(void)
{
    return "1.0.0";
}

void condens_set_threads(unsigned count)
{
    condens::set_thread_count(count);
}

condens_status condens_synth(const double* c, const double* xi, size_t p, size_t n, double* out)
{
    return guarded([&] {
        need(c, "c");
        need(xi, "xi");
        need(out, "out");
        std::vector<condens::Component> comps(p);
        for (std::size_t j = 0; j < p; ++j)
            comps[j] = {{c[2 * j], c[2 * j + 1]}, {xi[2 * j], xi[2 * j + 1]}};
        pack(condens::synth_signal(condens::ExponentialModel(std::move(comps)), n), out);
    });
}

void condens_reference_model(double* c, double* xi)
{
    const auto model = condens::ExponentialModel::reference();
    std::size_t j = 0;
    for (const auto& comp : model.components()) {
        c[2 * j] = comp.c.real();
        c[2 * j + 1] = comp.c.imag();
        xi[2 * j] = comp.xi.real();
        xi[2 * j + 1] = comp.xi.imag();
        ++j;
    }
}

condens_status condens_series_create(const double* a, size_t n, double sigma, condens_convention conv,
                                     condens_series** out)
{
    return guarded([&] {
        need(a, "a");
        need(out, "out");
        *out = new condens_series{condens::NoisySeries(unpack(a, n), sigma, convention(conv))};
    });
}

condens_status condens_series_noisy(const double* s, size_t n, double sigma, condens_convention conv, uint64_t seed,
                                    condens_series** out)
{
    return guarded([&] {
        need(s, "s");
        need(out, "out");
        condens::Rng rng(seed);
        *out = new condens_series{condens::add_noise(unpack(s, n), sigma, rng, convention(conv))};
    });
}

void condens_series_destroy(condens_series* series)
{
    delete series;
}

size_t condens_series_length(const condens_series* series)
{
    return series ? series->a.n() : 0;
}

condens_status condens_series_values(const condens_series* series, double* out)
{
    return guarded([&] {
        need(series, "series");
        need(out, "out");
        pack(series->a.a(), out);
    });
}

condens_status condens_rkk_profile(const condens_series* series, double z_re, double z_im, condens_path path,
                                   double* out)
{
    return guarded([&] {
        need(series, "series");
        need(out, "out");
        const condens::HankelPencil pencil = condens::build_pencil(series->a);
        const condens::Complex z(z_re, z_im);
        const std::vector<double> prof =
            path == CONDENS_DIRECT ? condens::rkk_profile_direct(pencil, z) : condens::rkk_profile(pencil, z);
        std::copy(prof.begin(), prof.end(), out);
    });
}

condens_status condens_density(const condens_series* const* series, size_t count, const condens_grid* grid,
                               double sigma, double beta, condens_kind kind, condens_field** out)
{
    return guarded([&] {
        need(series, "series");
        need(grid, "grid");
        need(out, "out");
        condens::require(count >= 1, "condens_density: at least one series required");
        std::vector<condens::HankelPencil> pencils;
        pencils.reserve(count);
        for (std::size_t r = 0; r < count; ++r) {
            need(series[r], "series[r]");
            pencils.push_back(condens::build_pencil(series[r]->a));
        }
        const condens::Grid g{grid->x0, grid->y0, grid->delta, grid->m};
        const auto k = kind == CONDENS_EXACT ? condens::PotentialKind::Exact : condens::PotentialKind::Smoothed;
        auto field = std::make_unique<condens_field>();
        field->field = condens::condensed_density_grid(pencils, g, {sigma, beta}, k);
        *out = field.release();
    });
}

void condens_field_destroy(condens_field* field)
{
    delete field;
}

condens_status condens_field_grid(const condens_field* field, condens_grid* grid)
{
    return guarded([&] {
        need(field, "field");
        need(grid, "grid");
        const condens::Grid& g = field->field.grid;
        *grid = {g.x0, g.y0, g.delta, g.m};
    });
}

condens_status condens_field_density(const condens_field* field, double* out)
{
    return guarded([&] {
        need(field, "field");
        need(out, "out");
        std::copy(field->field.density.begin(), field->field.density.end(), out);
    });
}

condens_status condens_field_potential(const condens_field* field, double* out)
{
    return guarded([&] {
        need(field, "field");
        need(out, "out");
        std::copy(field->field.potential.begin(), field->field.potential.end(), out);
    });
}

double condens_field_mass(const condens_field* field)
{
    return field ? field->field.mass() : 0.0;
}

condens_status condens_estimate_run(const condens_field* field, const condens_series* series, size_t p_hat,
                                    condens_estimate** out)
{
    return guarded([&] {
        need(field, "field");
        need(series, "series");
        need(out, "out");
        condens::EstimateResult r = p_hat > 0 ? condens::estimate_model_fixed(field->field, series->a, p_hat)
                                              : condens::estimate_model(field->field, series->a);
        *out = new condens_estimate{std::move(r)};
    });
}

void condens_estimate_destroy(condens_estimate* est)
{
    delete est;
}

size_t condens_estimate_order(const condens_estimate* est)
{
    return est ? est->result.p_hat : 0;
}

condens_status condens_estimate_params(const condens_estimate* est, double* xi, double* c)
{
    return guarded([&] {
        need(est, "est");
        need(xi, "xi");
        need(c, "c");
        pack(est->result.xi, xi);
        pack(est->result.c, c);
    });
}

double condens_estimate_residual(const condens_estimate* est)
{
    return est ? est->result.residual : 0.0;
}

int condens_estimate_significant(const condens_estimate* est)
{
    return est && est->result.significant ? 1 : 0;
}

condens_status condens_elog_gamma(double alpha, double beta, double* out)
{
    return guarded([&] {
        need(out, "out");
        *out = condens::potential_gamma(alpha, beta);
    });
}

condens_status condens_run(const char* command, const char* config_json, char** report)
{
    return guarded([&] {
        need(command, "command");
        need(report, "report");
        *report = nullptr;
        const condens::Json config =
            config_json && *config_json ? condens::Json::parse(config_json) : condens::Json::object();
        const std::string text = condens::run_command(command, config).dump(2);
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf)
            throw std::bad_alloc();
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *report = buf;
    });
}

void condens_string_free(char* s)
{
    std::free(s);
}

} // extern "C"
