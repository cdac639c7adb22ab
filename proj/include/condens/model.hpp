#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "condens/linalg.hpp"

namespace condens {

using Rng = std::mt19937_64;

/// Deterministic seed splitting (splitmix64 of master and stream index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// One term c * xi^k of a sum of complex exponentials.
struct Component {
    Complex c;
    Complex xi;
};

/// Sum of complex exponentials s_k = sum_j c_j xi_j^k.
class ExponentialModel {
public:
    /// Throws ContractError on empty input, zero amplitude or repeated node.
    explicit ExponentialModel(std::vector<Component> components);

    std::span<const Component> components() const { return components_; }
    std::size_t p_star() const { return components_.size(); }

    /// The five-component test model with n = 74 used throughout the test suite.
    static ExponentialModel reference();

private:
    std::vector<Component> components_;
};

std::vector<Complex> synth_signal(const ExponentialModel& model, std::size_t n);

/// How `sigma` relates to the complex noise variance.
///  - PerComponent: Re and Im each have variance sigma^2 (E|eps|^2 = 2 sigma^2).
///  - Total: E|eps|^2 = sigma^2.
enum class NoiseConvention { PerComponent, Total };

/// Standard deviation of the real and imaginary parts under a convention.
double component_stddev(double sigma, NoiseConvention convention);

/// Noisy samples a_k = s_k + eps_k of even length n = 2p.
class NoisySeries {
public:
    NoisySeries(std::vector<Complex> a, double sigma,
                NoiseConvention convention = NoiseConvention::PerComponent);

    std::span<const Complex> a() const { return a_; }
    double sigma() const { return sigma_; }
    NoiseConvention convention() const { return convention_; }
    std::size_t n() const { return a_.size(); }
    std::size_t p() const { return a_.size() / 2; }

private:
    std::vector<Complex> a_;
    double sigma_;
    NoiseConvention convention_;
};

NoisySeries add_noise(std::span<const Complex> s, double sigma, Rng& rng,
                      NoiseConvention convention = NoiseConvention::PerComponent);

/// Hankel pencil U1 - z U0 built from a noisy series, with the factor of the
/// p x (p+1) Hankel matrix U cached once so that U1 - z U0 = U (E1 - z E0).
class HankelPencil {
public:
    explicit HankelPencil(std::span<const Complex> a);

    std::size_t p() const { return p_; }
    const ComplexMatrix& u0() const { return u0_; }
    const ComplexMatrix& u1() const { return u1_; }
    const ComplexMatrix& u() const { return u_; }
    /// Upper trapezoidal p x (p+1) factor R of U = QR.
    const ComplexMatrix& r_of_u() const { return r_; }

    /// Row-major real and imaginary planes of r_of_u(), p x (p+1) each.
    const double* r_re() const { return r_re_.data(); }
    const double* r_im() const { return r_im_.data(); }

    /// U1 - z U0, formed directly.
    ComplexMatrix pencil_at(Complex z) const;
    /// C(z) = R (E1 - z E0): column j is R[:, j+1] - z R[:, j].
    ComplexMatrix hessenberg_at(Complex z) const;
    /// Row-major C(z) written into `out` (size p*p).
    void hessenberg_at(Complex z, std::span<Complex> out) const;

private:
    std::size_t p_;
    ComplexMatrix u0_, u1_, u_, r_;
    std::vector<Complex> r_rows_; // row-major copy of r_, p x (p+1)
    std::vector<double> r_re_, r_im_;
};

HankelPencil build_pencil(const NoisySeries& series);

} // namespace condens
