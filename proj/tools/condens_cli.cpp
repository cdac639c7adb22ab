#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condens/condens.h"

using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int fail(int code, const std::string& kind, const std::string& message)
{
    const Json err = {{"error", {{"code", code}, {"kind", kind}, {"message", message}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(s);
    while (std::getline(is, cell, sep))
        out.push_back(cell);
    return out;
}

// Flags given on the command line, merged over the config file.
struct Overrides {
    Json j = Json::object();

    template <class T>
    void set(const char* key, const std::optional<T>& v)
    {
        if (v)
            j[key] = *v;
    }
};

Json parse_grid(const std::string& text)
{
    const auto parts = split(text, ',');
    if (parts.size() != 4)
        throw std::invalid_argument("--grid expects x0,y0,delta,m");
    return Json::array({std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                        static_cast<std::size_t>(std::stoull(parts[3]))});
}

Json read_json_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::invalid_argument("cannot open '" + path + "'");
    return Json::parse(is);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Condensed density of noisy Hankel pencils"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> output_dir;
    app.add_option("--config", config_path, "JSON configuration file (flags win)");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--threads", threads, "Worker threads (default: CONDENS_THREADS or all cores)");
    app.add_option("--output-dir", output_dir, "Directory for output files");

    std::optional<std::string> input, model, grid, kind, convention, output, pgm, rule, stats, report, function, checks,
        ps;
    std::optional<std::size_t> n, mc, p_hat, replicates, max_candidates, n_breaks, t_points, m, bins;
    std::optional<double> sigma, beta, snr, min_seconds;
    bool refine = false, no_wrap = false, full = false;

    auto common_series = [&](CLI::App* c) {
        c->add_option("--input", input, "Series CSV (k,re,im or k,s_re,s_im,a_re,a_im)");
        c->add_option("--model", model, "Model JSON file used when no input is given");
        c->add_option("--n", n, "Series length when synthesizing");
        c->add_option("--convention", convention, "per_component or total");
    };
    auto common_density = [&](CLI::App* c) {
        c->add_option("--grid", grid, "x0,y0,delta,m");
        c->add_option("--sigma", sigma, "Noise level");
        c->add_option("--beta", beta, "Smoothing parameter (default 5n)");
    };

    auto* synth = app.add_subcommand("synth", "Write the signal and a noisy copy");
    common_series(synth);
    synth->add_option("--sigma", sigma, "Noise level");
    synth->add_option("-o,--output", output, "Series CSV");

    auto* density = app.add_subcommand("density", "Condensed density on a grid");
    common_series(density);
    common_density(density);
    density->add_option("--mc", mc, "Average the potential over N noisy replicates");
    density->add_option("--kind", kind, "smoothed or exact");
    density->add_option("--pgm", pgm, "Also write a PGM image");
    density->add_option("-o,--output", output, "Density CSV");

    auto* estimate = app.add_subcommand("estimate", "Estimate nodes and amplitudes");
    common_series(estimate);
    common_density(estimate);
    estimate->add_option("--p-hat", p_hat, "Fix the number of components");
    estimate->add_option("--replicates", replicates, "Run N seeded replicates and write statistics");
    estimate->add_option("--rule", rule, "leave_one_out or min_residual");
    estimate->add_option("--max-candidates", max_candidates, "Largest prefix tried (default 2p)");
    estimate->add_flag("--refine", refine, "Sub-grid peak refinement");
    estimate->add_option("-o,--output", output, "EstimateResult JSON");
    estimate->add_option("--stats", stats, "Statistics CSV for --replicates");

    auto* recon = app.add_subcommand("reconstruct", "Piecewise-constant reconstruction from Fourier data");
    recon->add_option("--input", input, "Series CSV of noisy coefficients");
    recon->add_option("--function", function, "PiecewiseConstant JSON used when no input is given");
    recon->add_option("--n", n, "Number of coefficients");
    recon->add_option("--snr", snr, "Signal-to-noise ratio of the synthesized data");
    common_density(recon);
    recon->add_option("--n-breaks,--p-hat", n_breaks, "Number of breakpoints");
    recon->add_option("--t-points", t_points, "Evaluation grid size");
    recon->add_flag("--no-wrap", no_wrap, "Fix the wrap-around interval to zero");
    recon->add_option("-o,--output", output, "PiecewiseConstant JSON");
    recon->add_option("--report", report, "t,F_rough,F_reconstructed CSV");

    auto* validate = app.add_subcommand("validate", "Monte Carlo checks of the distributional claims");
    validate->add_option("--checks", checks, "Comma list of chi2,laguerre,monotonicity");
    validate->add_option("--replicates", replicates, "Replicates for every check");
    validate->add_flag("--full", full, "Laguerre check at the full replicate count");
    validate->add_option("--bins", bins, "Fixed histogram bins instead of Freedman-Diaconis");
    validate->add_option("-o,--output", output, "Report JSON");

    auto* bench = app.add_subcommand("bench", "Per-point cost of the fast and direct profiles");
    bench->add_option("--ps", ps, "Comma list of pencil sizes");
    bench->add_option("--m", m, "Grid size");
    bench->add_option("--min-seconds", min_seconds, "Minimum timing window per size");
    bench->add_option("-o,--output", output, "Timing CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kExitConfig, "usage", e.what());
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();

    Json config = Json::object();
    Overrides o;
    try {
        if (!config_path.empty())
            config = read_json_file(config_path);
        if (!config.is_object())
            throw std::invalid_argument("configuration must be a JSON object");
        if (!threads) {
            if (const char* env = std::getenv("CONDENS_THREADS"))
                threads = static_cast<unsigned>(std::stoul(env));
        }
        o.set("seed", seed);
        o.set("threads", threads);
        o.set("output_dir", output_dir);
        o.set("input", input);
        if (model)
            o.j["model"] = read_json_file(*model);
        if (function)
            o.j["function"] = read_json_file(*function);
        if (grid)
            o.j["grid"] = parse_grid(*grid);
        o.set("n", n);
        o.set("convention", convention);
        o.set("sigma", sigma);
        o.set("beta", beta);
        o.set("mc", mc);
        o.set("kind", kind);
        o.set("pgm", pgm);
        o.set("p_hat", p_hat);
        o.set("rule", rule);
        o.set("max_candidates", max_candidates);
        if (refine)
            o.j["refine"] = true;
        o.set("stats_output", stats);
        o.set("snr", snr);
        o.set("n_breaks", n_breaks);
        o.set("t_points", t_points);
        if (no_wrap)
            o.j["wrap"] = false;
        o.set("report_output", report);
        o.set("output", output);
        o.set("m", m);
        o.set("min_seconds", min_seconds);
        if (ps) {
            Json list = Json::array();
            for (const auto& v : split(*ps, ','))
                list.push_back(static_cast<std::size_t>(std::stoull(v)));
            o.j["ps"] = list;
        }
        if (command == "validate") {
            if (checks)
                o.j["checks"] = split(*checks, ',');
            for (const char* section : {"chi2", "laguerre", "monotonicity"}) {
                if (replicates)
                    o.j[section]["replicates"] = *replicates;
            }
            if (full)
                o.j["laguerre"]["full"] = true;
            if (bins)
                o.j["laguerre"]["bins"] = *bins;
        } else {
            o.set("replicates", replicates);
        }
    } catch (const std::exception& e) {
        return fail(kExitConfig, "config", e.what());
    }
    config.merge_patch(o.j);

    char* text = nullptr;
    const condens_status st = condens_run(command.c_str(), config.dump().c_str(), &text);
    switch (st) {
    case CONDENS_OK:
        std::cout << text << '\n';
        condens_string_free(text);
        return 0;
    case CONDENS_E_CONTRACT:
        return fail(kExitConfig, "contract", condens_last_error());
    case CONDENS_E_DOMAIN:
        return fail(kExitConfig, "domain", condens_last_error());
    case CONDENS_E_NUMERICAL:
        return fail(kExitNumerical, "numerical", condens_last_error());
    case CONDENS_E_ESTIMATION:
        return fail(kExitNumerical, "estimation", condens_last_error());
    default:
        return fail(kExitNumerical, "internal", condens_last_error());
    }
}
