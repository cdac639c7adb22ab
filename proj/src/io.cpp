#include "condens/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "condens/error.hpp"

namespace condens {

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

double parse_double(const std::string& cell, std::size_t line)
{
    const std::string t = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ContractError("series CSV line " + std::to_string(line) + ": '" + t + "' is not a number");
    return v;
}

void write_complex_row(std::ostream& os, Complex z)
{
    os << ',' << z.real() << ',' << z.imag();
}

} // namespace

void write_series_csv(std::ostream& os, std::span<const Complex> s, std::span<const Complex> a)
{
    require(s.size() == a.size(), "write_series_csv: s and a differ in length");
    os << std::setprecision(17) << "k,s_re,s_im,a_re,a_im\n";
    for (std::size_t k = 0; k < a.size(); ++k) {
        os << k;
        write_complex_row(os, s[k]);
        write_complex_row(os, a[k]);
        os << '\n';
    }
}

void write_series_csv(std::ostream& os, std::span<const Complex> a)
{
    os << std::setprecision(17) << "k,re,im\n";
    for (std::size_t k = 0; k < a.size(); ++k) {
        os << k;
        write_complex_row(os, a[k]);
        os << '\n';
    }
}

SeriesTable read_series_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw ContractError("series CSV: empty input");
    std::vector<std::string> header = split_csv(line);
    for (auto& h : header)
        h = trim(h);
    const bool full = header == std::vector<std::string>{"k", "s_re", "s_im", "a_re", "a_im"};
    const bool plain = header == std::vector<std::string>{"k", "re", "im"};
    if (!full && !plain)
        throw ContractError("series CSV: header must be 'k,re,im' or 'k,s_re,s_im,a_re,a_im'");

    SeriesTable t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != header.size())
            throw ContractError("series CSV line " + std::to_string(lineno) + ": expected " +
                                std::to_string(header.size()) + " fields");
        const double k = parse_double(cells[0], lineno);
        if (k != static_cast<double>(t.a.size()))
            throw ContractError("series CSV line " + std::to_string(lineno) + ": k must run 0, 1, 2, ...");
        if (full) {
            t.s.emplace_back(parse_double(cells[1], lineno), parse_double(cells[2], lineno));
            t.a.emplace_back(parse_double(cells[3], lineno), parse_double(cells[4], lineno));
        } else {
            t.a.emplace_back(parse_double(cells[1], lineno), parse_double(cells[2], lineno));
        }
    }
    return t;
}

void write_density_csv(std::ostream& os, const DensityField& field)
{
    const std::size_t mi = field.grid.interior();
    const std::size_t m = field.grid.m;
    os << std::setprecision(17) << "x,y,potential,density\n";
    for (std::size_t j = 0; j < mi; ++j)
        for (std::size_t i = 0; i < mi; ++i) {
            const Complex z = field.interior_node(i, j);
            os << z.real() << ',' << z.imag() << ',' << field.potential[(j + 1) * m + i + 1] << ','
               << field.density_at(i, j) << '\n';
        }
}

void write_pgm(std::ostream& os, const DensityField& field)
{
    const std::size_t mi = field.grid.interior();
    double peak = 0.0;
    for (double d : field.density)
        peak = std::max(peak, d);
    os << "P2\n" << mi << ' ' << mi << "\n255\n";
    for (std::size_t row = 0; row < mi; ++row) {
        const std::size_t j = mi - 1 - row;
        for (std::size_t i = 0; i < mi; ++i) {
            const double v = peak > 0.0 ? std::max(field.density_at(i, j), 0.0) / peak : 0.0;
            os << (i ? " " : "") << static_cast<int>(std::lround(255.0 * v));
        }
        os << '\n';
    }
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object())
        throw ContractError(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known)
            throw ContractError(where + ": unknown key '" + key + "'");
    }
}

Json complex_json(Complex z)
{
    return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j, const std::string& where)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ContractError(where + ": complex value must be a number or [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ExponentialModel model_from_json(const Json& j)
{
    reject_unknown_keys(j, {"components"}, "model");
    if (!j.contains("components") || !j["components"].is_array())
        throw ContractError("model: 'components' must be an array");
    std::vector<Component> comps;
    std::size_t idx = 0;
    for (const Json& c : j["components"]) {
        const std::string where = "model.components[" + std::to_string(idx++) + "]";
        reject_unknown_keys(c, {"c", "xi"}, where);
        if (!c.contains("c") || !c.contains("xi"))
            throw ContractError(where + ": 'c' and 'xi' are required");
        comps.push_back({complex_from_json(c["c"], where + ".c"), complex_from_json(c["xi"], where + ".xi")});
    }
    return ExponentialModel(std::move(comps));
}

Json to_json(const ExponentialModel& model)
{
    Json comps = Json::array();
    for (const Component& c : model.components())
        comps.push_back({{"c", complex_json(c.c)}, {"xi", complex_json(c.xi)}});
    return {{"components", comps}};
}

Json to_json(const EstimateResult& r)
{
    Json xi = Json::array(), c = Json::array();
    for (Complex z : r.xi)
        xi.push_back(complex_json(z));
    for (Complex v : r.c)
        c.push_back(complex_json(v));
    return {{"p_hat", r.p_hat},     {"xi", xi},
            {"c", c},               {"residual", r.residual},
            {"threshold", r.threshold}, {"fit_ratio", std::isfinite(r.fit_ratio) ? Json(r.fit_ratio) : Json(nullptr)},
            {"significant", r.significant}};
}

Json to_json(const PiecewiseConstant& f)
{
    Json j = {{"breakpoints", f.breakpoints}, {"weights", f.weights}};
    j["outer"] = f.outer ? Json(*f.outer) : Json(nullptr);
    return j;
}

Json to_json(const Chi2Report& r)
{
    return {{"p", r.p},
            {"k", r.k},
            {"replicates", r.replicates},
            {"seed", r.seed},
            {"reference_dof", r.reference_dof},
            {"mean", r.mean},
            {"mean_std_error", r.mean_std_error},
            {"variance", r.variance},
            {"ks", r.ks},
            {"ks_critical", r.ks_critical},
            {"pass", r.pass}};
}

Json to_json(const LaguerreFitReport& r)
{
    return {{"k", r.k},
            {"terms", r.terms},
            {"alpha", r.fit.alpha},
            {"beta", r.fit.beta},
            {"tau", r.fit.tau},
            {"b", r.fit.b},
            {"l2_one_term", r.l2_one_term},
            {"l2_full", r.l2_full}};
}

Json to_json(const MonotonicityReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"sigma", row.sigma},
                        {"alpha", row.alpha},
                        {"alpha_se", row.alpha_se},
                        {"beta", row.beta},
                        {"beta_se", row.beta_se}});
    return {{"k", r.k}, {"z", complex_json(r.z)}, {"rows", rows}, {"nondecreasing", r.nondecreasing}};
}

Json to_json(const BenchReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"p", row.p},
                        {"fast_seconds_per_point", row.fast_seconds_per_point},
                        {"direct_seconds_per_point", row.direct_seconds_per_point},
                        {"max_rel_deviation", row.max_rel_deviation}});
    return {{"m", r.m}, {"rows", rows}, {"fast_exponent", r.fast_exponent}, {"direct_exponent", r.direct_exponent}};
}

Json to_json(const Selection& s)
{
    Json prefixes = Json::array();
    for (const auto& ps : s.prefixes) {
        Json row = {{"q", ps.q}, {"accepted", ps.accepted}};
        row["residual"] = ps.accepted ? Json(ps.residual) : Json(nullptr);
        row["score"] = ps.accepted && std::isfinite(ps.score) ? Json(ps.score) : Json(nullptr);
        prefixes.push_back(row);
    }
    return {{"q", s.q}, {"threshold", s.threshold}, {"prefixes", prefixes}};
}

void write_stats_csv(std::ostream& os, const ReplicateStats& stats)
{
    os << std::setprecision(10) << "parameter,truth_re,truth_im,bias_re,bias_im,sd,mse\n";
    for (const ParameterStat& s : stats.rows)
        os << s.parameter << ',' << s.truth.real() << ',' << s.truth.imag() << ',' << s.bias.real() << ','
           << s.bias.imag() << ',' << s.sd << ',' << s.mse << '\n';
}

void write_reconstruction_csv(std::ostream& os, const Reconstruction& r)
{
    os << std::setprecision(12) << "t,F_rough,F_reconstructed\n";
    for (std::size_t i = 0; i < r.t.size(); ++i)
        os << r.t[i] << ',' << r.rough[i] << ',' << r.reconstructed[i] << '\n';
}

void write_bench_csv(std::ostream& os, const BenchReport& r)
{
    os << std::setprecision(8) << "p,fast_seconds_per_point,direct_seconds_per_point,max_rel_deviation\n";
    for (const auto& row : r.rows)
        os << row.p << ',' << row.fast_seconds_per_point << ',' << row.direct_seconds_per_point << ','
           << row.max_rel_deviation << '\n';
}

} // namespace condens
