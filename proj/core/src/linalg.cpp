#include "qee/linalg.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "qee/error.hpp"

namespace qee {

namespace {

using Index = Eigen::Index;

void require_bipartite(const ComplexMatrix& s, std::size_t env_dim, const char* what) {
  require_square(s, what);
  if (env_dim == 0 || static_cast<std::size_t>(s.rows()) != 2 * env_dim) {
    std::ostringstream os;
    os << what << ": dimension " << s.rows() << " is not 2 * env_dim (env_dim = " << env_dim
       << ")";
    throw DimensionError(os.str());
  }
}

RealVector hermitian_eigenvalues(const ComplexMatrix& s, double tol, const char* what) {
  require_square(s, what);
  const double defect = hermiticity_defect(s);
  if (defect > tol) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (||h - h^dagger||_F / ||h||_F = " << defect
       << " > " << tol << ")";
    throw ContractError(os.str());
  }
  const ComplexMatrix sym = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ContractError(std::string(what) + ": eigensolver did not converge");
  }
  return solver.eigenvalues();
}

}  // namespace

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw ContractError(std::string(what) + ": matrix has non-finite entries");
  }
}

ComplexMatrix identity(std::size_t n) {
  return ComplexMatrix::Identity(static_cast<Index>(n), static_cast<Index>(n));
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0,
       1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0),
       Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0,
       0.0, -1.0;
  return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
  const auto ar = static_cast<std::size_t>(a.rows());
  const auto ac = static_cast<std::size_t>(a.cols());
  const auto br = static_cast<std::size_t>(b.rows());
  const auto bc = static_cast<std::size_t>(b.cols());
  if (ar * br > max_dim || ac * bc > max_dim) {
    std::ostringstream os;
    os << "kron: result dimension " << ar * br << "x" << ac * bc << " exceeds maximum "
       << max_dim;
    throw DimensionError(os.str());
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const ComplexMatrix& h) {
  const double scale = h.norm();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).norm() / scale;
}

HermitianEig hermitian_eig(const ComplexMatrix& h, double tol) {
  require_square(h, "hermitian_eig");
  require_finite(h, "hermitian_eig");
  const double defect = hermiticity_defect(h);
  if (defect > tol) {
    std::ostringstream os;
    os << "hermitian_eig: matrix is not Hermitian (||h - h^dagger||_F / ||h||_F = " << defect
       << " > " << tol << ")";
    throw ContractError(os.str());
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ContractError("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_exp(const ComplexMatrix& h, double t, double tol) {
  if (!std::isfinite(t)) throw ContractError("unitary_exp: time is not finite");
  const HermitianEig eig = hermitian_eig(h, tol);
  if (t == 0.0) return identity(static_cast<std::size_t>(h.rows()));
  ComplexVector phases(eig.eigenvalues.size());
  for (Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -eig.eigenvalues(k) * t);
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix partial_transpose_qubit(const ComplexMatrix& s, std::size_t env_dim) {
  require_bipartite(s, env_dim, "partial_transpose_qubit");
  const auto n = static_cast<Index>(env_dim);
  ComplexMatrix out = s;
  out.block(0, n, n, n) = s.block(n, 0, n, n);
  out.block(n, 0, n, n) = s.block(0, n, n, n);
  return out;
}

ComplexMatrix partial_transpose_env(const ComplexMatrix& s, std::size_t env_dim) {
  require_bipartite(s, env_dim, "partial_transpose_env");
  const auto n = static_cast<Index>(env_dim);
  ComplexMatrix out(s.rows(), s.cols());
  for (Index p = 0; p < 2; ++p) {
    for (Index q = 0; q < 2; ++q) {
      out.block(p * n, q * n, n, n) = s.block(p * n, q * n, n, n).transpose();
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& s, std::size_t env_dim, Keep keep) {
  require_bipartite(s, env_dim, "partial_trace");
  const auto n = static_cast<Index>(env_dim);
  if (keep == Keep::environment) {
    return s.block(0, 0, n, n) + s.block(n, n, n, n);
  }
  ComplexMatrix out(2, 2);
  for (Index p = 0; p < 2; ++p) {
    for (Index q = 0; q < 2; ++q) {
      out(p, q) = s.block(p * n, q * n, n, n).trace();
    }
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& s) { return s.norm(); }

double trace_norm(const ComplexMatrix& s, double tol) {
  return hermitian_eigenvalues(s, tol, "trace_norm").cwiseAbs().sum();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("trace_distance: operand shapes differ");
  }
  for (const ComplexMatrix* m : {&a, &b}) {
    const double defect = hermiticity_defect(*m);
    if (defect > tol) {
      std::ostringstream os;
      os << "trace_distance: operand is not Hermitian (relative defect " << defect << ")";
      throw ContractError(os.str());
    }
  }
  const ComplexMatrix d = a - b;
  return trace_norm(0.5 * (d + d.adjoint()), tol);
}

double min_eigenvalue(const ComplexMatrix& s, double tol) {
  return hermitian_eigenvalues(s, tol, "min_eigenvalue").minCoeff();
}

SpectralSummary norms_and_psd(const ComplexMatrix& s, double tol) {
  const RealVector ev = hermitian_eigenvalues(s, tol, "norms_and_psd");
  return {s.norm(), ev.cwiseAbs().sum(), ev.minCoeff()};
}

Complex determinant(const ComplexMatrix& s) {
  require_square(s, "determinant");
  return s.partialPivLu().determinant();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

ComplexMatrix principal_submatrix(const ComplexMatrix& s, const std::vector<std::size_t>& keep) {
  require_square(s, "principal_submatrix");
  const auto k = static_cast<Index>(keep.size());
  ComplexMatrix out(k, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      const auto i = keep[static_cast<std::size_t>(r)];
      const auto j = keep[static_cast<std::size_t>(c)];
      if (i >= static_cast<std::size_t>(s.rows()) || j >= static_cast<std::size_t>(s.rows())) {
        throw DimensionError("principal_submatrix: index out of range");
      }
      out(r, c) = s(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return out;
}

void require_density_matrix(const ComplexMatrix& rho, const char* what, double herm_tol,
                            double trace_tol, double psd_tol) {
  require_square(rho, what);
  require_finite(rho, what);
  std::ostringstream os;
  const double defect = hermiticity_defect(rho);
  if (defect > herm_tol) {
    os << what << ": not Hermitian (relative defect " << defect << ")";
    throw ContractError(os.str());
  }
  const Complex tr = rho.trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    os << what << ": trace is " << tr.real() << (tr.imag() < 0 ? "-" : "+")
       << std::abs(tr.imag()) << "i, not 1";
    throw ContractError(os.str());
  }
  const double lo = min_eigenvalue(rho, herm_tol);
  if (lo < -psd_tol) {
    os << what << ": not positive semidefinite (min eigenvalue " << lo << ")";
    throw ContractError(os.str());
  }
}

bool is_density_matrix(const ComplexMatrix& rho, double herm_tol, double trace_tol,
                       double psd_tol) {
  try {
    require_density_matrix(rho, "density matrix", herm_tol, trace_tol, psd_tol);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace qee
