#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace condens {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Squared diagonal entries at or below this value are treated as exact zeros.
inline constexpr double kSingularFloor = 1e-300;

/// Classical Gram-Schmidt factorization G = QR of a square matrix.
///
/// Columns are orthogonalized against the already computed q_i using the
/// original column g_k (not the partially updated one). `diag_sq[k]` holds
/// w_k^H w_k, the squared norm of the orthogonalized column, so that
/// R_kk = sqrt(diag_sq[k]) is real and nonnegative. A column that becomes
/// exactly zero yields R_kk = 0 and a zero column in Q; no exception is raised.
struct GramSchmidtQR {
    ComplexMatrix q;
    ComplexMatrix r;
    std::vector<double> diag_sq;
};

GramSchmidtQR qr_gram_schmidt(const ComplexMatrix& g);

/// Householder factorization of a wide (rows <= cols) matrix A = QR.
/// Q is unitary rows x rows, R is upper trapezoidal with real nonnegative diagonal.
struct HouseholderQR {
    ComplexMatrix q;
    ComplexMatrix r;
};

HouseholderQR qr_householder(const ComplexMatrix& a);

/// Squared moduli |R_kk|^2 of the triangular factor of an upper Hessenberg matrix.
///
/// Uses p-1 Givens rotations. Only the row that is still being reduced is
/// carried, rows that are final are discarded after their diagonal is read.
/// Throws ContractError if an entry below the first subdiagonal is nonzero.
std::vector<double> givens_reduce_hessenberg(const ComplexMatrix& c);

/// Same as above on a dense row-major buffer, writing into `out` (size p).
/// `carry` is scratch space of size p. No structural check.
void givens_hessenberg_diag_sq(const Complex* rows, std::size_t p, std::span<double> out,
                               std::span<Complex> carry);

/// |R_kk|^2 of C = R (E1 - z E0) for an upper trapezoidal p x (p+1) R given as
/// row-major real and imaginary planes, forming each row of C on the fly inside
/// the Givens sweep. `carry` is scratch space of size 2p.
void givens_pencil_diag_sq(const double* r_re, const double* r_im, std::size_t p, Complex z, std::span<double> out,
                           std::span<double> carry);

/// Full Givens triangularization of an upper Hessenberg matrix (returns R).
/// Rotations are chosen so that every diagonal entry of R is real and nonnegative.
ComplexMatrix givens_triangular_factor(const ComplexMatrix& c);

/// Real 2p x 2p block form [[Re G, -Im G], [Im G, Re G]].
RealMatrix real_isomorph(const ComplexMatrix& g);

/// |det G|^2 as the product of the Gram-Schmidt squared diagonal.
double det_abs2(const ComplexMatrix& g);

/// Frobenius-norm helpers used by tests and diagnostics.
double relative_reconstruction_error(const ComplexMatrix& q, const ComplexMatrix& r,
                                     const ComplexMatrix& a);
double orthogonality_error(const ComplexMatrix& q);

} // namespace condens
