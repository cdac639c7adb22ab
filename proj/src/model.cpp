#include "condens/model.hpp"

#include <cmath>
#include <numbers>

#include "condens/error.hpp"

namespace condens {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

ExponentialModel::ExponentialModel(std::vector<Component> components)
    : components_(std::move(components))
{
    require(!components_.empty(), "ExponentialModel: at least one component required");
    for (std::size_t j = 0; j < components_.size(); ++j) {
        require(std::abs(components_[j].c) > 0.0, "ExponentialModel: amplitudes must be nonzero");
        for (std::size_t i = 0; i < j; ++i)
            require(components_[i].xi != components_[j].xi, "ExponentialModel: nodes must be distinct");
    }
}

ExponentialModel ExponentialModel::reference()
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto node = [&](double damping, double freq) { return std::exp(Complex(-damping, two_pi * freq)); };
    return ExponentialModel({
        {6.0, node(0.1, -0.3)},
        {3.0, node(0.05, -0.28)},
        {1.0, node(0.0001, 0.2)},
        {1.0, node(0.0001, 0.21)},
        {20.0, node(0.3, -0.35)},
    });
}

std::vector<Complex> synth_signal(const ExponentialModel& model, std::size_t n)
{
    require(n >= 2, "synth_signal: n >= 2 required");
    std::vector<Complex> s(n, Complex(0.0));
    for (const Component& comp : model.components()) {
        Complex power(1.0);
        for (std::size_t k = 0; k < n; ++k) {
            s[k] += comp.c * power;
            power *= comp.xi;
        }
    }
    return s;
}

double component_stddev(double sigma, NoiseConvention convention)
{
    return convention == NoiseConvention::PerComponent ? sigma : sigma / std::numbers::sqrt2;
}

NoisySeries::NoisySeries(std::vector<Complex> a, double sigma, NoiseConvention convention)
    : a_(std::move(a)), sigma_(sigma), convention_(convention)
{
    require(!a_.empty() && a_.size() % 2 == 0, "NoisySeries: even, non-zero number of samples required");
    require(sigma >= 0.0, "NoisySeries: sigma >= 0 required");
}

NoisySeries add_noise(std::span<const Complex> s, double sigma, Rng& rng, NoiseConvention convention)
{
    require(sigma >= 0.0, "add_noise: sigma >= 0 required");
    std::vector<Complex> a(s.begin(), s.end());
    if (sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, component_stddev(sigma, convention));
        for (Complex& v : a) {
            const double re = normal(rng);
            const double im = normal(rng);
            v += Complex(re, im);
        }
    }
    return NoisySeries(std::move(a), sigma, convention);
}

HankelPencil::HankelPencil(std::span<const Complex> a)
{
    require(a.size() % 2 == 0, "build_pencil: even number of samples required");
    require(a.size() >= 4, "build_pencil: at least 4 samples required");
    p_ = a.size() / 2;
    const auto p = static_cast<Eigen::Index>(p_);
    u0_.resize(p, p);
    u1_.resize(p, p);
    u_.resize(p, p + 1);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            u0_(i, j) = a[i + j];
            u1_(i, j) = a[i + j + 1];
        }
        for (Eigen::Index j = 0; j <= p; ++j)
            u_(i, j) = a[i + j];
    }
    r_ = qr_householder(u_).r;
    r_rows_.resize(p_ * (p_ + 1));
    r_re_.resize(r_rows_.size());
    r_im_.resize(r_rows_.size());
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j <= p; ++j) {
            const auto idx = static_cast<std::size_t>(i * (p + 1) + j);
            r_rows_[idx] = r_(i, j);
            r_re_[idx] = r_(i, j).real();
            r_im_[idx] = r_(i, j).imag();
        }
}

ComplexMatrix HankelPencil::pencil_at(Complex z) const
{
    return u1_ - z * u0_;
}

ComplexMatrix HankelPencil::hessenberg_at(Complex z) const
{
    const auto p = static_cast<Eigen::Index>(p_);
    return r_.rightCols(p) - z * r_.leftCols(p);
}

void HankelPencil::hessenberg_at(Complex z, std::span<Complex> out) const
{
    require(out.size() == p_ * p_, "hessenberg_at: output buffer size must be p*p");
    const std::size_t w = p_ + 1;
    for (std::size_t i = 0; i < p_; ++i) {
        const Complex* row = r_rows_.data() + i * w;
        Complex* dst = out.data() + i * p_;
        // R is upper trapezoidal: entries left of column i-1 are zero.
        const std::size_t first = i == 0 ? 0 : i - 1;
        for (std::size_t j = 0; j < first; ++j)
            dst[j] = 0.0;
        for (std::size_t j = first; j < p_; ++j)
            dst[j] = row[j + 1] - z * row[j];
    }
}

HankelPencil build_pencil(const NoisySeries& series)
{
    return HankelPencil(series.a());
}

} // namespace condens
