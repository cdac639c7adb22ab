#include "condens/linalg.hpp"

#include <cmath>
#include <string>

#include "condens/error.hpp"

namespace condens {

namespace {

// Rotation [[c, s], [-conj(s), c]] with real c mapping (x, y) to (r, 0), r >= 0.
struct Rotation {
    double c;
    Complex s;
    double r;
};

Rotation make_rotation(Complex x, Complex y)
{
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (ay == 0.0)
        return {1.0, Complex(0.0), ax};
    const double r = std::hypot(ax, ay);
    if (ax == 0.0)
        return {0.0, std::conj(y) / ay, r};
    const Complex phase = x / ax;
    return {ax / r, phase * std::conj(y) / r, r};
}

} // namespace

GramSchmidtQR qr_gram_schmidt(const ComplexMatrix& g)
{
    require(g.rows() == g.cols() && g.rows() >= 1, "qr_gram_schmidt: square non-empty matrix required");
    const Eigen::Index p = g.rows();
    GramSchmidtQR out{ComplexMatrix::Zero(p, p), ComplexMatrix::Zero(p, p), std::vector<double>(p, 0.0)};

    for (Eigen::Index k = 0; k < p; ++k) {
        ComplexVector w = g.col(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            out.r(i, k) = out.q.col(i).dot(g.col(k));
        }
        for (Eigen::Index i = 0; i < k; ++i)
            w -= out.r(i, k) * out.q.col(i);
        const double wsq = w.squaredNorm();
        out.diag_sq[k] = wsq;
        const double rkk = std::sqrt(wsq);
        out.r(k, k) = rkk;
        if (rkk > 0.0)
            out.q.col(k) = w / rkk;
    }
    return out;
}

HouseholderQR qr_householder(const ComplexMatrix& a)
{
    require(a.rows() >= 1 && a.rows() <= a.cols(), "qr_householder: rows <= cols required");
    const Eigen::Index p = a.rows();
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    HouseholderQR out;
    out.q = qr.householderQ() * ComplexMatrix::Identity(p, p);
    out.r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < p; ++k) {
        const Complex d = out.r(k, k);
        const double ad = std::abs(d);
        if (ad == 0.0)
            continue;
        const Complex phase = d / ad;
        out.r.row(k) *= std::conj(phase);
        out.q.col(k) *= phase;
        out.r(k, k) = ad;
    }
    return out;
}

void givens_hessenberg_diag_sq(const Complex* rows, std::size_t p, std::span<double> out,
                               std::span<Complex> carry)
{
    for (std::size_t j = 0; j < p; ++j)
        carry[j] = rows[j];
    for (std::size_t j = 0; j + 1 < p; ++j) {
        const Complex* next = rows + (j + 1) * p;
        const Complex x = carry[j];
        const Complex y = next[j];
        out[j] = std::norm(x) + std::norm(y);
        const Rotation rot = make_rotation(x, y);
        const Complex ms = -std::conj(rot.s);
        for (std::size_t col = j + 1; col < p; ++col)
            carry[col] = ms * carry[col] + rot.c * next[col];
    }
    out[p - 1] = std::norm(carry[p - 1]);
}

void givens_pencil_diag_sq(const double* r_re, const double* r_im, std::size_t p, Complex z, std::span<double> out,
                           std::span<double> carry)
{
    const std::size_t w = p + 1;
    const double zr = z.real();
    const double zi = z.imag();
    double* __restrict kr = carry.data();
    double* __restrict ki = carry.data() + p;
    for (std::size_t col = 0; col < p; ++col) {
        kr[col] = r_re[col + 1] - (zr * r_re[col] - zi * r_im[col]);
        ki[col] = r_im[col + 1] - (zr * r_im[col] + zi * r_re[col]);
    }
    for (std::size_t j = 0; j + 1 < p; ++j) {
        const double* __restrict ar = r_re + (j + 1) * w;
        const double* __restrict ai = r_im + (j + 1) * w;
        const Complex x(kr[j], ki[j]);
        const Complex y(ar[j + 1], ai[j + 1]);
        out[j] = std::norm(x) + std::norm(y);
        const Rotation rot = make_rotation(x, y);
        const double sr = -rot.s.real(), si = rot.s.imag(); // -conj(s)
        const double c = rot.c;
        for (std::size_t col = j + 1; col < p; ++col) {
            const double nr = ar[col + 1] - (zr * ar[col] - zi * ai[col]);
            const double ni = ai[col + 1] - (zr * ai[col] + zi * ar[col]);
            const double cr = kr[col], ci = ki[col];
            kr[col] = sr * cr - si * ci + c * nr;
            ki[col] = sr * ci + si * cr + c * ni;
        }
    }
    out[p - 1] = kr[p - 1] * kr[p - 1] + ki[p - 1] * ki[p - 1];
}

std::vector<double> givens_reduce_hessenberg(const ComplexMatrix& c)
{
    require(c.rows() == c.cols() && c.rows() >= 1, "givens_reduce_hessenberg: square non-empty matrix required");
    const Eigen::Index p = c.rows();
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = j + 2; i < p; ++i)
            if (c(i, j) != Complex(0.0))
                throw ContractError("givens_reduce_hessenberg: matrix is not upper Hessenberg (entry " +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = c;
    std::vector<double> out(p);
    std::vector<Complex> carry(p);
    givens_hessenberg_diag_sq(rows.data(), static_cast<std::size_t>(p), out, carry);
    return out;
}

ComplexMatrix givens_triangular_factor(const ComplexMatrix& c)
{
    require(c.rows() == c.cols() && c.rows() >= 1, "givens_triangular_factor: square non-empty matrix required");
    const Eigen::Index p = c.rows();
    ComplexMatrix r = c;
    for (Eigen::Index j = 0; j + 1 < p; ++j) {
        const Rotation rot = make_rotation(r(j, j), r(j + 1, j));
        for (Eigen::Index col = j; col < p; ++col) {
            const Complex a = r(j, col);
            const Complex b = r(j + 1, col);
            r(j, col) = rot.c * a + rot.s * b;
            r(j + 1, col) = -std::conj(rot.s) * a + rot.c * b;
        }
        r(j + 1, j) = 0.0;
    }
    // Unitary diagonal rescaling of the rows makes the diagonal real.
    for (Eigen::Index j = 0; j < p; ++j) {
        const Complex d = r(j, j);
        const double ad = std::abs(d);
        if (ad > 0.0) {
            r.row(j).tail(p - j) *= std::conj(d) / ad;
            r(j, j) = ad;
        }
    }
    return r;
}

RealMatrix real_isomorph(const ComplexMatrix& g)
{
    require(g.rows() == g.cols(), "real_isomorph: square matrix required");
    const Eigen::Index p = g.rows();
    RealMatrix out(2 * p, 2 * p);
    out.topLeftCorner(p, p) = g.real();
    out.topRightCorner(p, p) = -g.imag();
    out.bottomLeftCorner(p, p) = g.imag();
    out.bottomRightCorner(p, p) = g.real();
    return out;
}

double det_abs2(const ComplexMatrix& g)
{
    const GramSchmidtQR qr = qr_gram_schmidt(g);
    double prod = 1.0;
    for (double d : qr.diag_sq)
        prod *= d;
    return prod;
}

double relative_reconstruction_error(const ComplexMatrix& q, const ComplexMatrix& r, const ComplexMatrix& a)
{
    const double na = a.norm();
    return (q * r - a).norm() / (na > 0.0 ? na : 1.0);
}

double orthogonality_error(const ComplexMatrix& q)
{
    return (q.adjoint() * q - ComplexMatrix::Identity(q.cols(), q.cols())).norm();
}

} // namespace condens
