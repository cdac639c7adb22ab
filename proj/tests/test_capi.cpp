// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "condens/condens.h"

namespace {

std::vector<double> reference_signal(size_t n)
{
    std::vector<double> c(10), xi(10), s(2 * n);
    condens_reference_model(c.data(), xi.data());
    REQUIRE(condens_synth(c.data(), xi.data(), 5, n, s.data()) == CONDENS_OK);
    return s;
}

} // namespace

TEST_CASE("version and errors")
{
    CHECK(std::strlen(condens_version()) > 0);
    CHECK(condens_last_error() != nullptr);
    double out = 0.0;
    CHECK(condens_synth(nullptr, nullptr, 1, 4, &out) == CONDENS_E_CONTRACT);
    CHECK(std::strlen(condens_last_error()) > 0);
    CHECK(condens_elog_gamma(-1.0, 1.0, &out) == CONDENS_E_DOMAIN);
    CHECK(condens_elog_gamma(1.0, 1.0, nullptr) == CONDENS_E_CONTRACT);
    REQUIRE(condens_elog_gamma(1.0, 1.0, &out) == CONDENS_OK);
    CHECK(out == doctest::Approx(-0.5772156649015329));
}

TEST_CASE("synth")
{
    const std::vector<double> s = reference_signal(74);
    CHECK(s[0] == doctest::Approx(31.0));
    CHECK(s[1] == doctest::Approx(0.0));
    double c[2] = {2.0, 0.0}, xi[2] = {0.0, 0.5}, out[6];
    REQUIRE(condens_synth(c, xi, 1, 3, out) == CONDENS_OK);
    CHECK(out[2] == doctest::Approx(0.0));
    CHECK(out[3] == doctest::Approx(1.0));
    CHECK(out[4] == doctest::Approx(-0.5));
}

TEST_CASE("series handles")
{
    const std::vector<double> s = reference_signal(74);
    condens_series* a = nullptr;
    REQUIRE(condens_series_create(s.data(), 74, 0.0, CONDENS_PER_COMPONENT, &a) == CONDENS_OK);
    CHECK(condens_series_length(a) == 74);
    std::vector<double> back(148);
    REQUIRE(condens_series_values(a, back.data()) == CONDENS_OK);
    CHECK(back == s);
    condens_series_destroy(a);

    condens_series *b = nullptr, *c = nullptr;
    REQUIRE(condens_series_noisy(s.data(), 74, 0.5, CONDENS_PER_COMPONENT, 9, &b) == CONDENS_OK);
    REQUIRE(condens_series_noisy(s.data(), 74, 0.5, CONDENS_PER_COMPONENT, 9, &c) == CONDENS_OK);
    std::vector<double> vb(148), vc(148);
    condens_series_values(b, vb.data());
    condens_series_values(c, vc.data());
    CHECK(vb == vc);
    CHECK(vb != s);
    condens_series_destroy(b);
    condens_series_destroy(c);

    condens_series* bad = nullptr;
    CHECK(condens_series_create(s.data(), 73, 0.5, CONDENS_PER_COMPONENT, &bad) == CONDENS_E_CONTRACT);
    CHECK(bad == nullptr);
    CHECK(condens_series_create(s.data(), 74, -1.0, CONDENS_PER_COMPONENT, &bad) == CONDENS_E_CONTRACT);
    condens_series_destroy(nullptr);
}

TEST_CASE("profile paths agree")
{
    const std::vector<double> s = reference_signal(40);
    condens_series* a = nullptr;
    REQUIRE(condens_series_noisy(s.data(), 40, 0.3, CONDENS_PER_COMPONENT, 1, &a) == CONDENS_OK);
    std::vector<double> fast(20), direct(20);
    REQUIRE(condens_rkk_profile(a, 0.3, -0.7, CONDENS_FAST, fast.data()) == CONDENS_OK);
    REQUIRE(condens_rkk_profile(a, 0.3, -0.7, CONDENS_DIRECT, direct.data()) == CONDENS_OK);
    for (size_t k = 0; k < 20; ++k)
        CHECK(std::abs(fast[k] - direct[k]) <= 1e-8 * std::max(1.0, direct[k]));
    CHECK(condens_rkk_profile(a, 0.0, 0.0, CONDENS_FAST, nullptr) == CONDENS_E_CONTRACT);
    condens_series_destroy(a);
}

TEST_CASE("density and estimate")
{
    const std::vector<double> s = reference_signal(74);
    condens_series* a = nullptr;
    REQUIRE(condens_series_noisy(s.data(), 74, 0.05, CONDENS_PER_COMPONENT, 2, &a) == CONDENS_OK);
    const condens_grid grid{-1.5, -1.5, 0.05, 61};
    condens_field* field = nullptr;
    REQUIRE(condens_density(&a, 1, &grid, 0.05, 370.0, CONDENS_SMOOTHED, &field) == CONDENS_OK);
    CHECK(condens_field_mass(field) == doctest::Approx(1.0).epsilon(1e-9));
    condens_grid g{};
    REQUIRE(condens_field_grid(field, &g) == CONDENS_OK);
    CHECK(g.m == 61);
    std::vector<double> dens(59 * 59), pot(61 * 61);
    REQUIRE(condens_field_density(field, dens.data()) == CONDENS_OK);
    REQUIRE(condens_field_potential(field, pot.data()) == CONDENS_OK);
    for (double v : dens)
        CHECK(v >= 0.0);

    condens_estimate* est = nullptr;
    REQUIRE(condens_estimate_run(field, a, 5, &est) == CONDENS_OK);
    REQUIRE(condens_estimate_order(est) == 5);
    std::vector<double> xi(10), c(10);
    REQUIRE(condens_estimate_params(est, xi.data(), c.data()) == CONDENS_OK);
    // the strongest component sits near 1
    std::vector<double> tc(10), txi(10);
    condens_reference_model(tc.data(), txi.data());
    double best = 1e9;
    for (size_t j = 0; j < 5; ++j)
        best = std::min(best, std::hypot(xi[2 * j] - txi[0], xi[2 * j + 1] - txi[1]));
    CHECK(best < 0.05);
    CHECK(condens_estimate_residual(est) >= 0.0);
    condens_estimate_destroy(est);

    CHECK(condens_estimate_run(field, a, 10000, &est) == CONDENS_E_ESTIMATION);
    const condens_grid tiny{-1.0, -1.0, 0.5, 2};
    condens_field* f2 = nullptr;
    CHECK(condens_density(&a, 1, &tiny, 0.05, 370.0, CONDENS_SMOOTHED, &f2) == CONDENS_E_CONTRACT);
    CHECK(condens_density(&a, 0, &grid, 0.05, 370.0, CONDENS_SMOOTHED, &f2) == CONDENS_E_CONTRACT);
    condens_field_destroy(field);
    condens_series_destroy(a);
}

TEST_CASE("run")
{
    char* report = nullptr;
    REQUIRE(condens_run("density", R"({"grid": [-1, -1, 0.1, 21], "sigma": 0.2, "output_dir": "capi_out"})",
                        &report) == CONDENS_OK);
    CHECK(std::string(report).find("\"mass\"") != std::string::npos);
    condens_string_free(report);

    report = nullptr;
    CHECK(condens_run("synth", R"({"bogus": 1})", &report) == CONDENS_E_CONTRACT);
    CHECK(report == nullptr);
    CHECK(std::string(condens_last_error()).find("bogus") != std::string::npos);
    CHECK(condens_run("synth", "{not json", &report) == CONDENS_E_CONTRACT);
    CHECK(condens_run(nullptr, "{}", &report) == CONDENS_E_CONTRACT);
}
