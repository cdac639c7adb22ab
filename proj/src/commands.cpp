#include "condens/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>

#include "condens/error.hpp"
#include "condens/parallel.hpp"

namespace condens {

namespace fs = std::filesystem;

namespace {

const char* const kGlobalKeys[] = {"seed", "threads", "output_dir"};

struct Context {
    Json cfg; // with defaults filled in
    std::uint64_t seed = 1;
    fs::path out_dir = ".";

    template <class T>
    T get(const char* key, T fallback)
    {
        if (!cfg.contains(key) || cfg[key].is_null()) {
            cfg[key] = fallback;
            return fallback;
        }
        try {
            return cfg[key].get<T>();
        } catch (const Json::exception&) {
            throw ContractError(std::string("config: '") + key + "' has the wrong type");
        }
    }

    fs::path output(const char* key, const std::string& fallback)
    {
        const fs::path p = get<std::string>(key, fallback);
        if (p.is_absolute())
            return p;
        fs::create_directories(out_dir);
        return out_dir / p;
    }
};

Context make_context(const Json& config, std::initializer_list<const char*> keys, const std::string& where)
{
    if (!config.is_object())
        throw ContractError(where + ": configuration must be a JSON object");
    for (const auto& [key, value] : config.items()) {
        bool known = std::any_of(std::begin(kGlobalKeys), std::end(kGlobalKeys), [&](const char* k) { return key == k; });
        known = known || std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
        if (!known)
            throw ContractError(where + ": unknown key '" + key + "'");
    }
    Context ctx;
    ctx.cfg = config;
    ctx.seed = ctx.get<std::uint64_t>("seed", 1);
    ctx.out_dir = ctx.get<std::string>("output_dir", ".");
    const auto threads = ctx.get<unsigned>("threads", 0);
    set_thread_count(threads);
    return ctx;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os)
        throw ContractError("cannot open '" + p.string() + "' for writing");
    return os;
}

NoiseConvention convention_of(Context& ctx)
{
    const std::string c = ctx.get<std::string>("convention", "per_component");
    if (c == "per_component")
        return NoiseConvention::PerComponent;
    if (c == "total")
        return NoiseConvention::Total;
    throw ContractError("config: convention must be 'per_component' or 'total'");
}

ExponentialModel model_of(Context& ctx)
{
    if (!ctx.cfg.contains("model")) {
        ctx.cfg["model"] = to_json(ExponentialModel::reference());
        return ExponentialModel::reference();
    }
    return model_from_json(ctx.cfg["model"]);
}

Grid grid_of(Context& ctx)
{
    if (!ctx.cfg.contains("grid")) {
        const Grid g;
        ctx.cfg["grid"] = Json::array({g.x0, g.y0, g.delta, g.m});
        return g;
    }
    return grid_from_json(ctx.cfg["grid"]);
}

struct Series {
    std::vector<Complex> s; // clean signal when known
    NoisySeries a;
};

// The series of a command: read from `input`, or synthesized from `model` with
// noise from Rng(derive_seed(seed, stream)).
Series series_of(Context& ctx, double sigma, NoiseConvention conv, std::uint64_t stream = 0)
{
    if (ctx.cfg.contains("input")) {
        const std::string path = ctx.get<std::string>("input", "");
        std::ifstream is(path);
        if (!is)
            throw ContractError("cannot open input '" + path + "'");
        SeriesTable t = read_series_csv(is);
        return {std::move(t.s), NoisySeries(std::move(t.a), sigma, conv)};
    }
    const ExponentialModel model = model_of(ctx);
    const auto n = ctx.get<std::size_t>("n", 74);
    std::vector<Complex> s = synth_signal(model, n);
    Rng rng(derive_seed(ctx.seed, stream));
    NoisySeries a = add_noise(s, sigma, rng, conv);
    return {std::move(s), std::move(a)};
}

SmoothingParams params_of(Context& ctx, std::size_t n)
{
    SmoothingParams p;
    p.sigma = ctx.get<double>("sigma", 0.0);
    p.beta = ctx.get<double>("beta", 5.0 * static_cast<double>(n));
    return p;
}

Json run_synth(const Json& config)
{
    Context ctx = make_context(config, {"model", "n", "sigma", "convention", "output"}, "synth");
    const double sigma = ctx.get<double>("sigma", 0.0);
    require(sigma >= 0.0, "synth: sigma must be nonnegative");
    const NoiseConvention conv = convention_of(ctx);
    const Series sr = series_of(ctx, sigma, conv);
    const fs::path out = ctx.output("output", "signal.csv");
    auto os = open_out(out);
    write_series_csv(os, sr.s, sr.a.a());
    return {{"command", "synth"}, {"config", ctx.cfg}, {"rows", sr.a.n()}, {"output", out.string()}};
}

Json run_density(const Json& config)
{
    Context ctx = make_context(config,
                               {"input", "model", "n", "grid", "sigma", "beta", "mc", "kind", "convention", "output", "pgm"},
                               "density");
    const NoiseConvention conv = convention_of(ctx);
    const double sigma = ctx.get<double>("sigma", 0.0);
    const Grid grid = grid_of(ctx);
    grid.validate();
    const std::string kind_name = ctx.get<std::string>("kind", "smoothed");
    PotentialKind kind;
    if (kind_name == "smoothed")
        kind = PotentialKind::Smoothed;
    else if (kind_name == "exact")
        kind = PotentialKind::Exact;
    else
        throw ContractError("density: kind must be 'smoothed' or 'exact'");
    const auto mc = ctx.get<std::size_t>("mc", 0);

    const Series sr = series_of(ctx, sigma, conv);
    const SmoothingParams params = params_of(ctx, sr.a.n());
    DensityField field;
    if (mc > 0) {
        require(!sr.s.empty(), "density: --mc needs the clean signal (s columns or a model)");
        McConfig mcfg;
        mcfg.replicates = mc;
        mcfg.seed = ctx.seed;
        mcfg.convention = conv;
        field = mc_condensed_density(sr.s, sigma, grid, params, mcfg, kind);
    } else {
        field = condensed_density_grid(build_pencil(sr.a), grid, params, kind);
    }
    const fs::path out = ctx.output("output", "density.csv");
    {
        auto os = open_out(out);
        write_density_csv(os, field);
    }
    Json report = {{"command", "density"}, {"config", ctx.cfg},      {"output", out.string()},
                   {"interior", grid.interior()}, {"mass", field.mass()}, {"normalized", field.normalized}};
    if (ctx.cfg.contains("pgm")) {
        const fs::path pgm = ctx.output("pgm", "density.pgm");
        auto os = open_out(pgm);
        write_pgm(os, field);
        report["pgm"] = pgm.string();
    }
    const std::vector<Peak> peaks = local_maxima(field);
    Json top = Json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(peaks.size(), 10); ++i)
        top.push_back({{"z", complex_json(peaks[i].z)}, {"value", peaks[i].value}});
    report["peaks"] = top;
    return report;
}

SelectionOptions selection_of(Context& ctx)
{
    SelectionOptions opt;
    opt.max_candidates = ctx.get<std::size_t>("max_candidates", 0);
    const std::string rule = ctx.get<std::string>("rule", "leave_one_out");
    if (rule == "leave_one_out")
        opt.rule = SelectionRule::LeaveOneOut;
    else if (rule == "min_residual")
        opt.rule = SelectionRule::MinResidual;
    else
        throw ContractError("estimate: rule must be 'leave_one_out' or 'min_residual'");
    opt.refine = ctx.get<bool>("refine", false);
    return opt;
}

EstimateResult estimate_one(const NoisySeries& a, const Grid& grid, const SmoothingParams& params,
                            const SelectionOptions& opt, std::size_t p_hat)
{
    const DensityField field = condensed_density_grid(build_pencil(a), grid, params);
    if (p_hat > 0)
        return estimate_model_fixed(field, a, p_hat, opt.refine);
    return estimate_model(field, a, opt);
}

Json run_estimate(const Json& config)
{
    Context ctx = make_context(config,
                               {"input", "model", "n", "grid", "sigma", "beta", "p_hat", "rule", "max_candidates",
                                "refine", "replicates", "convention", "output", "stats_output"},
                               "estimate");
    const NoiseConvention conv = convention_of(ctx);
    const double sigma = ctx.get<double>("sigma", 0.2);
    const Grid grid = grid_of(ctx);
    grid.validate();
    const SelectionOptions opt = selection_of(ctx);
    const auto p_hat = ctx.get<std::size_t>("p_hat", 0);
    const auto replicates = ctx.get<std::size_t>("replicates", 0);

    if (replicates == 0) {
        const Series sr = series_of(ctx, sigma, conv);
        const SmoothingParams params = params_of(ctx, sr.a.n());
        if (!(params.sigma > 0.0))
            throw ContractError("estimate: sigma must be positive for the smoothed density");
        const EstimateResult r = estimate_one(sr.a, grid, params, opt, p_hat);
        const fs::path out = ctx.output("output", "estimate.json");
        auto os = open_out(out);
        os << to_json(r).dump(2) << '\n';
        return {{"command", "estimate"}, {"config", ctx.cfg}, {"output", out.string()}, {"result", to_json(r)}};
    }

    require(!ctx.cfg.contains("input"), "estimate: replicates are synthesized from the model; drop 'input'");
    const ExponentialModel model = model_of(ctx);
    const auto n = ctx.get<std::size_t>("n", 74);
    const SmoothingParams params = params_of(ctx, n);
    if (!(params.sigma > 0.0))
        throw ContractError("estimate: sigma must be positive for the smoothed density");
    const std::vector<Complex> s = synth_signal(model, n);
    std::vector<EstimateResult> results(replicates);
    std::vector<std::string> failures(replicates);
    // Grid evaluation is already parallel; replicates run in order.
    for (std::size_t r = 0; r < replicates; ++r) {
        Rng rng(derive_seed(ctx.seed, r));
        const NoisySeries a = add_noise(s, sigma, rng, conv);
        try {
            results[r] = estimate_one(a, grid, params, opt, p_hat);
        } catch (const EstimationError& e) {
            failures[r] = e.what();
        }
    }
    std::vector<EstimateResult> ok;
    Json failed = Json::array();
    for (std::size_t r = 0; r < replicates; ++r) {
        if (failures[r].empty())
            ok.push_back(results[r]);
        else
            failed.push_back({{"replicate", r}, {"error", failures[r]}});
    }
    const ReplicateStats stats = score_replicates(ok, model);
    const fs::path out = ctx.output("stats_output", "stats.csv");
    {
        auto os = open_out(out);
        write_stats_csv(os, stats);
    }
    Json orders = Json::array();
    for (const auto& r : ok)
        orders.push_back(r.p_hat);
    return {{"command", "estimate"},
            {"config", ctx.cfg},
            {"stats_output", out.string()},
            {"used", stats.used},
            {"discarded", stats.discarded + failed.size()},
            {"failed", failed},
            {"p_hat", orders}};
}

Json run_reconstruct(const Json& config)
{
    Context ctx = make_context(config,
                               {"input", "function", "n", "snr", "sigma", "n_breaks", "grid", "beta", "wrap",
                                "t_points", "convention", "output", "report_output"},
                               "reconstruct");
    const NoiseConvention conv = convention_of(ctx);
    std::optional<PiecewiseConstant> truth;
    std::optional<NoisySeries> a;
    if (ctx.cfg.contains("input")) {
        require(!ctx.cfg.contains("function"), "reconstruct: give either 'input' or 'function'");
        const std::string path = ctx.get<std::string>("input", "");
        std::ifstream is(path);
        if (!is)
            throw ContractError("cannot open input '" + path + "'");
        a.emplace(read_series_csv(is).a, ctx.get<double>("sigma", 0.0), conv);
    } else {
        if (!ctx.cfg.contains("function"))
            ctx.cfg["function"] = {{"breakpoints", {-2.0, -0.5, 1.0, 2.5}}, {"weights", {1.0, 3.0, 2.0}}};
        const Json& fj = ctx.cfg["function"];
        reject_unknown_keys(fj, {"breakpoints", "weights", "outer"}, "reconstruct.function");
        PiecewiseConstant f;
        try {
            f.breakpoints = fj.at("breakpoints").get<std::vector<double>>();
            f.weights = fj.at("weights").get<std::vector<double>>();
            if (fj.contains("outer") && !fj["outer"].is_null())
                f.outer = fj["outer"].get<double>();
        } catch (const Json::exception& e) {
            throw ContractError(std::string("reconstruct.function: ") + e.what());
        }
        f.validate();
        const auto n = ctx.get<std::size_t>("n", 64);
        const std::vector<Complex> s = fourier_coeffs(f, n);
        double sigma = 0.0;
        if (ctx.cfg.contains("snr")) {
            require(!ctx.cfg.contains("sigma"), "reconstruct: give either 'snr' or 'sigma'");
            sigma = sigma_for_snr(s, ctx.get<double>("snr", 7.0), conv);
        } else {
            sigma = ctx.get<double>("sigma", 0.0);
        }
        Rng rng(derive_seed(ctx.seed, 0));
        a.emplace(add_noise(s, sigma, rng, conv));
        truth = f;
    }

    ReconstructOptions opt;
    opt.grid = grid_of(ctx);
    opt.params.sigma = a->sigma();
    opt.params.beta = ctx.get<double>("beta", 5.0 * static_cast<double>(a->n()));
    opt.t_points = ctx.get<std::size_t>("t_points", 2048);
    opt.wrap = ctx.get<bool>("wrap", true);
    if (!(opt.params.sigma > 0.0))
        throw ContractError("reconstruct: noiseless data needs an explicit positive 'sigma' for the smoothing");
    const auto n_breaks = ctx.get<std::size_t>("n_breaks", truth ? truth->breakpoints.size() : 4);
    const Reconstruction rec = reconstruct(*a, n_breaks, opt);

    const fs::path out = ctx.output("output", "reconstruction.json");
    {
        auto os = open_out(out);
        os << to_json(rec.f).dump(2) << '\n';
    }
    const fs::path rep = ctx.output("report_output", "reconstruction.csv");
    {
        auto os = open_out(rep);
        write_reconstruction_csv(os, rec);
    }
    Json report = {{"command", "reconstruct"}, {"config", ctx.cfg}, {"output", out.string()},
                   {"report_output", rep.string()}, {"function", to_json(rec.f)}, {"sigma", a->sigma()}};
    if (truth) {
        std::vector<double> f_true(rec.t.size());
        for (std::size_t i = 0; i < rec.t.size(); ++i)
            f_true[i] = (*truth)(rec.t[i]);
        report["l2_error"] = l2_distance(rec.t, f_true, rec.f);
        PiecewiseConstant zero;
        std::vector<double> diff(rec.t.size());
        for (std::size_t i = 0; i < rec.t.size(); ++i)
            diff[i] = rec.rough[i] - f_true[i];
        report["l2_error_rough"] = l2_distance(rec.t, diff, zero);
        report["l2_norm"] = truth->l2_norm();
    }
    return report;
}

Json run_validate(const Json& config)
{
    Context ctx = make_context(config, {"checks", "model", "chi2", "laguerre", "monotonicity", "output", "histograms"},
                               "validate");
    const auto checks = ctx.get<std::vector<std::string>>("checks", {"chi2", "laguerre", "monotonicity"});
    const ExponentialModel model = model_of(ctx);
    const Complex z_default(std::cos(1.0), 0.8);
    Json report = {{"command", "validate"}};

    auto section = [&](const char* name, std::initializer_list<const char*> keys) {
        Json j = ctx.cfg.contains(name) ? ctx.cfg[name] : Json::object();
        reject_unknown_keys(j, keys, std::string("validate.") + name);
        return j;
    };
    auto num = [](Json& j, const char* key, auto fallback) {
        using T = decltype(fallback);
        if (!j.contains(key))
            j[key] = fallback;
        try {
            return j[key].template get<T>();
        } catch (const Json::exception&) {
            throw ContractError(std::string("validate: '") + key + "' has the wrong type");
        }
    };

    for (const std::string& check : checks) {
        if (check == "chi2") {
            Json j = section("chi2", {"p", "ks", "replicates", "reference_dof"});
            const auto p = num(j, "p", std::size_t{8});
            const auto ks = num(j, "ks", std::vector<std::size_t>{1, 4, 8});
            const auto n = num(j, "replicates", std::size_t{100000});
            const auto dof = num(j, "reference_dof", 0.0);
            Json rows = Json::array();
            for (std::size_t i = 0; i < ks.size(); ++i)
                rows.push_back(to_json(chi2_check(p, ks[i], n, derive_seed(ctx.seed, 100 + i), dof)));
            ctx.cfg["chi2"] = j;
            report["chi2"] = rows;
        } else if (check == "laguerre") {
            Json j = section("laguerre", {"sigma", "z", "ks", "replicates", "terms", "full", "n", "bins"});
            const auto sigma = num(j, "sigma", 0.5);
            if (!j.contains("z"))
                j["z"] = complex_json(z_default);
            const Complex z = complex_from_json(j["z"], "validate.laguerre.z");
            const auto ks = num(j, "ks", std::vector<std::size_t>{1, 18, 36});
            const bool full = num(j, "full", false);
            const auto n = num(j, "replicates", full ? std::size_t{4000000} : std::size_t{200000});
            const auto terms = num(j, "terms", std::size_t{10});
            const auto len = num(j, "n", std::size_t{74});
            const auto bins = num(j, "bins", std::size_t{0});
            McConfig mcfg;
            mcfg.replicates = n;
            mcfg.seed = derive_seed(ctx.seed, 200);
            const auto samples = sample_rkk(synth_signal(model, len), sigma, z, ks, mcfg);
            Json rows = Json::array();
            std::ofstream hist = open_out(ctx.output("histograms", "laguerre_histograms.csv"));
            hist << "k,center,empirical,one_term,full\n" << std::setprecision(10);
            for (std::size_t i = 0; i < ks.size(); ++i) {
                EmpiricalRkk e = summarize_rkk(samples[i]);
                if (bins > 0) {
                    const auto [lo, hi] = std::minmax_element(e.values.begin(), e.values.end());
                    e.histogram = Histogram::fixed(e.values, bins, *lo, *hi);
                }
                const LaguerreFitReport fit = laguerre_fit_report(e, ks[i], terms);
                Json row = to_json(fit);
                row["mean"] = e.summary.mean;
                row["mean_std_error"] = e.summary.std_error;
                row["variance"] = e.summary.variance;
                row["moments"] = e.moments;
                row["bins"] = e.histogram.bins();
                rows.push_back(row);
                for (std::size_t b = 0; b < e.histogram.bins(); ++b) {
                    const double y = std::max(e.histogram.center(b), 0.0);
                    hist << ks[i] << ',' << e.histogram.center(b) << ',' << e.histogram.density(b) << ','
                         << density_eval(fit.fit, y, 0) << ',' << density_eval(fit.fit, y, terms) << '\n';
                }
            }
            ctx.cfg["laguerre"] = j;
            report["laguerre"] = rows;
            report["replicates"] = n;
        } else if (check == "monotonicity") {
            Json j = section("monotonicity", {"sigmas", "z", "k", "replicates", "bootstrap", "n"});
            const auto sigmas = num(j, "sigmas", std::vector<double>{0.1, 0.2, 0.4});
            if (!j.contains("z"))
                j["z"] = complex_json(z_default);
            const Complex z = complex_from_json(j["z"], "validate.monotonicity.z");
            const auto k = num(j, "k", std::size_t{18});
            const auto n = num(j, "replicates", std::size_t{20000});
            const auto boot = num(j, "bootstrap", std::size_t{200});
            const auto len = num(j, "n", std::size_t{74});
            McConfig mcfg;
            mcfg.replicates = n;
            mcfg.seed = derive_seed(ctx.seed, 300);
            report["monotonicity"] = to_json(monotonicity_check(synth_signal(model, len), sigmas, z, k, mcfg, boot));
            ctx.cfg["monotonicity"] = j;
        } else {
            throw ContractError("validate: unknown check '" + check + "'");
        }
    }
    report["config"] = ctx.cfg;
    report["seed"] = ctx.seed;
    const fs::path out = ctx.output("output", "validate.json");
    auto os = open_out(out);
    os << report.dump(2) << '\n';
    report["output"] = out.string();
    return report;
}

Json run_bench(const Json& config)
{
    Context ctx = make_context(config, {"ps", "m", "min_seconds", "output", "report_output"}, "bench");
    const auto ps = ctx.get<std::vector<std::size_t>>("ps", {16, 32, 64, 128});
    const auto m = ctx.get<std::size_t>("m", 32);
    const auto min_seconds = ctx.get<double>("min_seconds", 0.2);
    const BenchReport rep = bench_profiles(ps, m, ctx.seed, min_seconds);
    const fs::path out = ctx.output("output", "bench.csv");
    {
        auto os = open_out(out);
        write_bench_csv(os, rep);
    }
    return {{"command", "bench"}, {"config", ctx.cfg}, {"output", out.string()}, {"report", to_json(rep)}};
}

} // namespace

Grid grid_from_json(const Json& j)
{
    Grid g;
    try {
        if (j.is_array()) {
            require(j.size() == 4, "grid: expected [x0, y0, delta, m]");
            g = Grid{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<std::size_t>()};
        } else {
            reject_unknown_keys(j, {"x0", "y0", "delta", "m"}, "grid");
            g = Grid{j.at("x0").get<double>(), j.at("y0").get<double>(), j.at("delta").get<double>(),
                     j.at("m").get<std::size_t>()};
        }
    } catch (const Json::exception& e) {
        throw ContractError(std::string("grid: ") + e.what());
    }
    g.validate();
    return g;
}

Json run_command(const std::string& name, const Json& config)
{
    if (name == "synth")
        return run_synth(config);
    if (name == "density")
        return run_density(config);
    if (name == "estimate")
        return run_estimate(config);
    if (name == "reconstruct")
        return run_reconstruct(config);
    if (name == "validate")
        return run_validate(config);
    if (name == "bench")
        return run_bench(config);
    throw ContractError("unknown command '" + name + "'");
}

} // namespace condens
