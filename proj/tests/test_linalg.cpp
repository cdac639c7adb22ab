#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "condens/error.hpp"
#include "condens/linalg.hpp"
#include "condens/model.hpp"

using namespace condens;

namespace {

ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = {g(rng), g(rng)};
    return m;
}

ComplexMatrix random_hessenberg(std::size_t p, std::uint64_t seed)
{
    ComplexMatrix c = random_matrix(p, p, seed);
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j + 1 < i; ++j)
            c(i, j) = 0.0;
    return c;
}

} // namespace

TEST_CASE("gram-schmidt on 1x1 and identity")
{
    ComplexMatrix g(1, 1);
    g(0, 0) = {1.0, 1.0};
    const GramSchmidtQR f = qr_gram_schmidt(g);
    CHECK(std::abs(f.q(0, 0) - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
    CHECK(f.r(0, 0).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(f.diag_sq[0] == doctest::Approx(2.0));

    const GramSchmidtQR id = qr_gram_schmidt(ComplexMatrix::Identity(2, 2));
    CHECK((id.q - ComplexMatrix::Identity(2, 2)).norm() == 0.0);
    CHECK(id.diag_sq == std::vector<double>{1.0, 1.0});
}

TEST_CASE("factorizations reconstruct and stay orthogonal up to p = 64")
{
    for (std::size_t p : {5u, 16u, 64u}) {
        const ComplexMatrix g = random_matrix(p, p, 100 + p);
        const GramSchmidtQR gs = qr_gram_schmidt(g);
        CHECK(relative_reconstruction_error(gs.q, gs.r, g) < 1e-12);
        // classical Gram-Schmidt loses orthogonality like cond(G) * eps
        CHECK(orthogonality_error(gs.q) < 1e-10);

        const ComplexMatrix a = random_matrix(p, p + 1, 200 + p);
        const HouseholderQR hh = qr_householder(a);
        CHECK(relative_reconstruction_error(hh.q, hh.r, a) < 1e-12);
        CHECK(orthogonality_error(hh.q) < 1e-12);
        for (Eigen::Index k = 0; k < hh.r.rows(); ++k) {
            CHECK(hh.r(k, k).imag() == 0.0);
            CHECK(hh.r(k, k).real() >= 0.0);
        }
    }
}

TEST_CASE("householder edge cases")
{
    ComplexMatrix a(1, 2);
    a << 1.0, 0.0;
    const HouseholderQR f = qr_householder(a);
    CHECK(std::abs(f.r(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(f.r(0, 1)) < 1e-15);

    ComplexMatrix b = random_matrix(3, 4, 7);
    b.col(1) = b.col(0);
    CHECK(std::abs(qr_householder(b).r(1, 1)) < 1e-12);

    CHECK_THROWS_AS(qr_householder(random_matrix(3, 2, 1)), ContractError);
}

TEST_CASE("householder and gram-schmidt agree on the noiseless hankel matrix")
{
    const std::vector<Complex> s = synth_signal(ExponentialModel::reference(), 74);
    const HankelPencil pencil(s);
    const HouseholderQR hh = qr_householder(pencil.u());
    // Gram-Schmidt of the square leading block has the same diagonal
    const GramSchmidtQR gs = qr_gram_schmidt(pencil.u().leftCols(pencil.p()));
    for (std::size_t k = 0; k < 5; ++k)
        CHECK(std::abs(std::abs(hh.r(k, k)) - std::sqrt(gs.diag_sq[k])) < 1e-10 * std::abs(hh.r(0, 0)));
}

TEST_CASE("givens reduction")
{
    SUBCASE("upper triangular input is unchanged")
    {
        ComplexMatrix c = random_matrix(4, 4, 3).triangularView<Eigen::Upper>();
        const std::vector<double> d = givens_reduce_hessenberg(c);
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(d[k] == doctest::Approx(std::norm(c(k, k))).epsilon(1e-14));
    }
    SUBCASE("row swap")
    {
        ComplexMatrix c(2, 2);
        c << 0.0, 1.0, 1.0, 0.0;
        const std::vector<double> d = givens_reduce_hessenberg(c);
        CHECK(d[0] == doctest::Approx(1.0));
        CHECK(d[1] == doctest::Approx(1.0));
    }
    SUBCASE("non-hessenberg input")
    {
        ComplexMatrix c = ComplexMatrix::Identity(3, 3);
        c(2, 0) = 1.0;
        CHECK_THROWS_AS(givens_reduce_hessenberg(c), ContractError);
    }
    SUBCASE("matches eigen's QR on random hessenberg matrices")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ComplexMatrix c = random_hessenberg(3 + seed, seed);
            const std::vector<double> d = givens_reduce_hessenberg(c);
            const ComplexMatrix r = Eigen::HouseholderQR<ComplexMatrix>(c).matrixQR();
            for (std::size_t k = 0; k < d.size(); ++k)
                CHECK(d[k] == doctest::Approx(std::norm(r(k, k))).epsilon(1e-10));
        }
    }
    SUBCASE("triangular factor has a real nonnegative diagonal and the same moduli")
    {
        const ComplexMatrix c = random_hessenberg(6, 11);
        const ComplexMatrix r = givens_triangular_factor(c);
        const std::vector<double> d = givens_reduce_hessenberg(c);
        for (Eigen::Index k = 0; k < r.rows(); ++k) {
            CHECK(std::abs(r(k, k).imag()) < 1e-14);
            CHECK(r(k, k).real() >= 0.0);
            CHECK(std::norm(r(k, k)) == doctest::Approx(d[k]).epsilon(1e-12));
            for (Eigen::Index j = 0; j < k; ++j)
                CHECK(std::abs(r(k, j)) < 1e-12);
        }
        // R^H R = C^H C since C = Q R with Q unitary
        CHECK(((r.adjoint() * r) - (c.adjoint() * c)).norm() < 1e-12 * (c.adjoint() * c).norm());
    }
}

TEST_CASE("buffer kernels agree with the matrix form")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    std::vector<Complex> a(24);
    for (auto& v : a)
        v = {g(rng), g(rng)};
    const HankelPencil pencil(a);
    const std::size_t p = pencil.p();
    const Complex z(0.3, 0.2);
    const std::vector<double> ref = givens_reduce_hessenberg(pencil.hessenberg_at(z));

    std::vector<Complex> rows(p * p), carry(p);
    std::vector<double> out(p);
    pencil.hessenberg_at(z, rows);
    givens_hessenberg_diag_sq(rows.data(), p, out, carry);
    for (std::size_t k = 0; k < p; ++k)
        CHECK(out[k] == doctest::Approx(ref[k]).epsilon(1e-12));

    std::vector<double> split(2 * p);
    givens_pencil_diag_sq(pencil.r_re(), pencil.r_im(), p, z, out, split);
    for (std::size_t k = 0; k < p; ++k)
        CHECK(out[k] == doctest::Approx(ref[k]).epsilon(1e-12));
}

TEST_CASE("real isomorph")
{
    ComplexMatrix g(1, 1);
    g(0, 0) = {0.0, 1.0};
    RealMatrix expect(2, 2);
    expect << 0.0, -1.0, 1.0, 0.0;
    CHECK(real_isomorph(g) == expect);

    g(0, 0) = {1.0, 1.0};
    expect << 1.0, -1.0, 1.0, 1.0;
    CHECK(real_isomorph(g) == expect);
    CHECK(real_isomorph(g).determinant() == doctest::Approx(2.0));

    const ComplexMatrix h = random_matrix(3, 3, 9);
    const RealMatrix iso = real_isomorph(h);
    CHECK(iso.block(0, 3, 3, 3) == -h.imag());
    CHECK(iso.block(3, 0, 3, 3) == h.imag());
    CHECK(iso.block(3, 3, 3, 3) == h.real());
}

TEST_CASE("det_abs2")
{
    CHECK(det_abs2(ComplexMatrix::Identity(3, 3)) == doctest::Approx(1.0));
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = {0.0, 3.0};
    CHECK(det_abs2(d) == doctest::Approx(36.0));
    CHECK(det_abs2(ComplexMatrix::Zero(2, 2)) == 0.0);

    // |det G|^2 = det of the real isomorph, against Eigen's LU on both sides
    for (std::size_t p : {4u, 5u, 16u}) {
        const ComplexMatrix g = random_matrix(p, p, 40 + p);
        const double lu = std::norm(g.determinant());
        const double iso = real_isomorph(g).determinant();
        CHECK(det_abs2(g) == doctest::Approx(lu).epsilon(1e-10));
        CHECK(iso == doctest::Approx(lu).epsilon(1e-10));
    }
}
