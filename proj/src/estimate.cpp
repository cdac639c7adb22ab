#include "condens/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "condens/error.hpp"

namespace condens {

std::vector<Peak> local_maxima(const DensityField& field, Neighbourhood hood)
{
    const std::size_t mi = field.grid.interior();
    require(field.density.size() == mi * mi, "local_maxima: density has wrong size");
    std::vector<Peak> peaks;
    for (std::size_t j = 0; j < mi; ++j) {
        for (std::size_t i = 0; i < mi; ++i) {
            const double v = field.density_at(i, j);
            if (!(v > 0.0))
                continue;
            bool strict = true;
            for (int dj = -1; dj <= 1 && strict; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0)
                        continue;
                    if (hood == Neighbourhood::Four && di != 0 && dj != 0)
                        continue;
                    const auto ni = static_cast<std::ptrdiff_t>(i) + di;
                    const auto nj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ni < 0 || nj < 0 || ni >= static_cast<std::ptrdiff_t>(mi) ||
                        nj >= static_cast<std::ptrdiff_t>(mi))
                        continue;
                    if (!(v > field.density_at(static_cast<std::size_t>(ni), static_cast<std::size_t>(nj)))) {
                        strict = false;
                        break;
                    }
                }
            }
            if (strict)
                peaks.push_back({field.interior_node(i, j), v, i, j});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
    return peaks;
}

Complex refine_peak(const DensityField& field, const Peak& peak)
{
    const std::size_t mi = field.grid.interior();
    auto offset = [](double lo, double mid, double hi) {
        const double curv = lo - 2.0 * mid + hi;
        if (!(curv < 0.0))
            return 0.0;
        return std::clamp(0.5 * (lo - hi) / curv, -0.5, 0.5);
    };
    double dx = 0.0, dy = 0.0;
    const double v = field.density_at(peak.i, peak.j);
    if (peak.i > 0 && peak.i + 1 < mi)
        dx = offset(field.density_at(peak.i - 1, peak.j), v, field.density_at(peak.i + 1, peak.j));
    if (peak.j > 0 && peak.j + 1 < mi)
        dy = offset(field.density_at(peak.i, peak.j - 1), v, field.density_at(peak.i, peak.j + 1));
    const Complex z = field.interior_node(peak.i, peak.j);
    return z + field.grid.delta * Complex(dx, dy);
}

LsFit vandermonde_ls(std::span<const Complex> xi, std::span<const Complex> a)
{
    const std::size_t q = xi.size();
    const std::size_t n = a.size();
    require(q >= 1 && q <= n, "vandermonde_ls: need 1 <= q <= n");
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t l = j + 1; l < q; ++l)
            require(xi[j] != xi[l], "vandermonde_ls: nodes must be pairwise distinct");

    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(q);
    ComplexMatrix v(rows, cols);
    RealVector scale(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        Complex power = 1.0;
        for (Eigen::Index k = 0; k < rows; ++k) {
            v(k, j) = power;
            power *= xi[j];
        }
        const double norm = v.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw EstimationError("vandermonde_ls: degenerate column for node " + std::to_string(j));
        scale(j) = norm;
        v.col(j) /= norm;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(v);
    const RealVector& sv = svd.singularValues();
    const double cond = sv(0) / sv(cols - 1);
    if (!(cond <= kVandermondeConditionLimit)) {
        std::ostringstream msg;
        msg << "vandermonde_ls: Vandermonde matrix numerically rank deficient (condition " << cond << ")";
        throw EstimationError(msg.str());
    }

    ComplexVector rhs(rows);
    for (Eigen::Index k = 0; k < rows; ++k)
        rhs(k) = a[static_cast<std::size_t>(k)];
    Eigen::HouseholderQR<ComplexMatrix> qr(v);
    const ComplexVector y = qr.solve(rhs);

    LsFit fit;
    fit.condition = cond;
    fit.c.resize(q);
    for (Eigen::Index j = 0; j < cols; ++j)
        fit.c[static_cast<std::size_t>(j)] = y(j) / scale(j);
    fit.residual = (v * y - rhs).norm();

    const ComplexMatrix thin = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
    fit.leverage.resize(n);
    for (Eigen::Index k = 0; k < rows; ++k)
        fit.leverage[static_cast<std::size_t>(k)] = thin.row(k).squaredNorm();
    return fit;
}

namespace {

double loo_score(const LsFit& fit, std::span<const Complex> xi, std::span<const Complex> a)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        Complex model = 0.0;
        for (std::size_t j = 0; j < xi.size(); ++j)
            model += fit.c[j] * std::pow(xi[j], static_cast<double>(k));
        const double denom = 1.0 - fit.leverage[k];
        if (!(denom > 1e-12))
            return std::numeric_limits<double>::infinity();
        s += std::norm((a[k] - model) / denom);
    }
    return s;
}

} // namespace

Selection threshold_select(std::span<const Peak> peaks, const NoisySeries& a, const SelectionOptions& options)
{
    if (peaks.empty())
        throw EstimationError("threshold_select: no peaks");
    const std::size_t cap = options.max_candidates == 0 ? 2 * a.p() : options.max_candidates;
    const std::size_t qmax = std::min({cap, peaks.size(), a.n()});
    require(qmax >= 1, "threshold_select: max_candidates must be positive");

    double energy = 0.0;
    for (Complex v : a.a())
        energy += std::norm(v);
    // Improvements below this are rounding noise (exact fits of noiseless data).
    const double floor = 1e-12 * energy;

    std::vector<Complex> nodes;
    nodes.reserve(qmax);
    Selection best;
    double best_score = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t q = 1; q <= qmax; ++q) {
        nodes.push_back(peaks[q - 1].z);
        PrefixScore ps{q, false, nan, nan};
        try {
            LsFit fit = vandermonde_ls(nodes, a.a());
            ps.accepted = true;
            ps.residual = fit.residual;
            ps.score = options.rule == SelectionRule::MinResidual ? fit.residual * fit.residual
                                                                   : loo_score(fit, nodes, a.a());
            if (best.q == 0 || ps.score < best_score - floor) {
                best_score = ps.score;
                best.q = q;
                best.threshold = peaks[q - 1].value;
                best.fit = std::move(fit);
            }
        } catch (const EstimationError&) {
        }
        best.prefixes.push_back(ps);
    }
    if (best.q == 0)
        throw EstimationError("threshold_select: every prefix was rejected by the conditioning guard");
    return best;
}

namespace {

EstimateResult make_result(std::span<const Peak> peaks, std::size_t q, LsFit fit, const NoisySeries& a)
{
    EstimateResult r;
    r.p_hat = q;
    for (std::size_t j = 0; j < q; ++j)
        r.xi.push_back(peaks[j].z);
    r.c = std::move(fit.c);
    r.residual = fit.residual;
    r.threshold = peaks[q - 1].value;
    double energy = 0.0;
    for (Complex v : a.a())
        energy += std::norm(v);
    const double rss = r.residual * r.residual;
    const double dof = static_cast<double>(a.n() - q) / static_cast<double>(q);
    r.fit_ratio = rss > 0.0 ? (energy - rss) / rss * dof : std::numeric_limits<double>::infinity();
    r.significant = r.fit_ratio > kSignificanceRatio;
    return r;
}

} // namespace

EstimateResult estimate_model(const DensityField& field, const NoisySeries& a, const SelectionOptions& options)
{
    std::vector<Peak> peaks = local_maxima(field);
    if (options.refine)
        for (Peak& pk : peaks)
            pk.z = refine_peak(field, pk);
    Selection sel = threshold_select(peaks, a, options);
    return make_result(peaks, sel.q, std::move(sel.fit), a);
}

EstimateResult estimate_model_fixed(const DensityField& field, const NoisySeries& a, std::size_t p_hat,
                                    bool refine)
{
    require(p_hat >= 1, "estimate_model_fixed: p_hat must be positive");
    std::vector<Peak> peaks = local_maxima(field);
    if (refine)
        for (Peak& pk : peaks)
            pk.z = refine_peak(field, pk);
    if (peaks.size() < p_hat)
        throw EstimationError("estimate_model_fixed: only " + std::to_string(peaks.size()) + " peaks for p_hat = " +
                              std::to_string(p_hat));
    std::vector<Complex> nodes;
    for (std::size_t j = 0; j < p_hat; ++j)
        nodes.push_back(peaks[j].z);
    return make_result(peaks, p_hat, vandermonde_ls(nodes, a.a()), a);
}

namespace {

struct Accumulator {
    Complex sum = 0.0;
    double sum_sq = 0.0; // of |x - truth|^2
    Complex truth;
    std::size_t n = 0;

    void add(Complex x)
    {
        sum += x;
        sum_sq += std::norm(x - truth);
        ++n;
    }
    ParameterStat stat(std::string name) const
    {
        ParameterStat s;
        s.parameter = std::move(name);
        s.truth = truth;
        if (n == 0) {
            s.bias = std::numeric_limits<double>::quiet_NaN();
            s.sd = s.mse = std::numeric_limits<double>::quiet_NaN();
            return s;
        }
        const double dn = static_cast<double>(n);
        const Complex mean = sum / dn;
        s.bias = mean - truth;
        s.mse = sum_sq / dn;
        s.sd = std::sqrt(std::max(0.0, s.mse - std::norm(s.bias)));
        return s;
    }
};

} // namespace

ReplicateStats score_replicates(std::span<const EstimateResult> results, const ExponentialModel& truth)
{
    const auto comps = truth.components();
    const std::size_t ps = comps.size();
    Accumulator order;
    order.truth = static_cast<double>(ps);
    std::vector<Accumulator> xi(ps), c(ps);
    for (std::size_t k = 0; k < ps; ++k) {
        xi[k].truth = comps[k].xi;
        c[k].truth = comps[k].c;
    }

    ReplicateStats out;
    std::vector<std::size_t> match(ps);
    for (const EstimateResult& r : results) {
        order.add(static_cast<double>(r.p_hat));
        if (r.p_hat < ps || r.xi.size() < ps) {
            ++out.discarded;
            continue;
        }
        bool clash = false;
        for (std::size_t k = 0; k < ps; ++k) {
            std::size_t arg = 0;
            for (std::size_t j = 1; j < r.xi.size(); ++j)
                if (std::abs(r.xi[j] - comps[k].xi) < std::abs(r.xi[arg] - comps[k].xi))
                    arg = j;
            match[k] = arg;
            for (std::size_t l = 0; l < k; ++l)
                clash = clash || match[l] == arg;
        }
        if (clash) {
            ++out.discarded;
            continue;
        }
        ++out.used;
        for (std::size_t k = 0; k < ps; ++k) {
            xi[k].add(r.xi[match[k]]);
            c[k].add(r.c[match[k]]);
        }
    }
    out.rows.push_back(order.stat("p"));
    for (std::size_t k = 0; k < ps; ++k)
        out.rows.push_back(xi[k].stat("xi_" + std::to_string(k + 1)));
    for (std::size_t k = 0; k < ps; ++k)
        out.rows.push_back(c[k].stat("c_" + std::to_string(k + 1)));
    return out;
}

} // namespace condens
