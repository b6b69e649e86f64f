#pragma once

// Dense complex linear algebra for Hermitian/unitary operators on a
// qubit (x) N-level environment. Joint indices are qubit * N + env, i.e. the
// qubit is the slow index; every block formula in this library assumes it.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qee {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultMaxDim = 4096;

enum class Keep { qubit, environment };

struct HermitianEig {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns, orthonormal
};

struct SpectralSummary {
  double frobenius = 0.0;
  double trace_norm = 0.0;
  double min_eigenvalue = 0.0;
};

// Throws DimensionError unless m is square (and non-empty).
void require_square(const ComplexMatrix& m, const char* what);
// Throws ContractError if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

ComplexMatrix identity(std::size_t n);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxDim);

// ||h - h^dagger||_F relative to ||h||_F (0 for the zero matrix).
double hermiticity_defect(const ComplexMatrix& h);

// Throws ContractError naming the symmetry defect when
// ||h - h^dagger||_F > tol * ||h||_F.
HermitianEig hermitian_eig(const ComplexMatrix& h, double tol = 1e-10);

// exp(-i h t) assembled from the spectral decomposition of h.
ComplexMatrix unitary_exp(const ComplexMatrix& h, double t, double tol = 1e-10);

// Transpose over the qubit factor: [[A, B], [C, D]] -> [[A, C], [B, D]].
ComplexMatrix partial_transpose_qubit(const ComplexMatrix& s, std::size_t env_dim);
// Transpose over the environment factor (each N x N block transposed).
ComplexMatrix partial_transpose_env(const ComplexMatrix& s, std::size_t env_dim);

ComplexMatrix partial_trace(const ComplexMatrix& s, std::size_t env_dim, Keep keep);

double frobenius_norm(const ComplexMatrix& s);
// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const ComplexMatrix& s, double tol = 1e-10);
// ||a - b||_tr for Hermitian a, b. Each operand is checked on its own scale;
// the difference is symmetrized, since for nearly equal inputs it is mostly
// rounding noise and would fail a relative Hermiticity test.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b, double tol = 1e-10);
double min_eigenvalue(const ComplexMatrix& s, double tol = 1e-10);
SpectralSummary norms_and_psd(const ComplexMatrix& s, double tol = 1e-10);

// LU with partial pivoting. Singular input returns (numerically) zero.
Complex determinant(const ComplexMatrix& s);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Keeps rows/columns listed in `keep` (in that order).
ComplexMatrix principal_submatrix(const ComplexMatrix& s,
                                  const std::vector<std::size_t>& keep);

// Validates Hermiticity, unit trace and min eigenvalue >= -psd_tol; the
// error message names the first violated property.
void require_density_matrix(const ComplexMatrix& rho, const char* what,
                            double herm_tol = 1e-10, double trace_tol = 1e-10,
                            double psd_tol = 1e-9);
bool is_density_matrix(const ComplexMatrix& rho, double herm_tol = 1e-10,
                       double trace_tol = 1e-10, double psd_tol = 1e-9);

}  // namespace qee
