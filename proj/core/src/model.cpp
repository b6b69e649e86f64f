#include "qee/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qee/error.hpp"
#include "qee/rng.hpp"

namespace qee {

namespace {

using Index = Eigen::Index;

constexpr double kModelHermTol = 1e-10;

void require_env_operator(const ComplexMatrix& m, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n) {
    std::ostringstream os;
    os << "PureDephasingModel: " << what << " is " << m.rows() << "x" << m.cols()
       << ", expected " << n << "x" << n;
    throw DimensionError(os.str());
  }
  require_finite(m, what);
  const double defect = hermiticity_defect(m);
  if (defect > kModelHermTol) {
    std::ostringstream os;
    os << "PureDephasingModel: " << what << " is not Hermitian (relative defect " << defect
       << ")";
    throw ContractError(os.str());
  }
}

ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix thermal_weights_diag(const RealVector& energies, double beta) {
  const double e_min = energies.minCoeff();
  RealVector w(energies.size());
  for (Index k = 0; k < energies.size(); ++k) w(k) = std::exp(-beta * (energies(k) - e_min));
  w /= w.sum();
  return w.cast<Complex>().asDiagonal();
}

}  // namespace

// ---------------------------------------------------------------------------

PureDephasingModel::PureDephasingModel(double eps0, double eps1, ComplexMatrix h_env,
                                       ComplexMatrix v0, ComplexMatrix v1)
    : eps0_(eps0), eps1_(eps1) {
  if (!std::isfinite(eps0) || !std::isfinite(eps1)) {
    throw ContractError("PureDephasingModel: qubit energies must be finite");
  }
  require_square(h_env, "PureDephasingModel: h_env");
  const auto n = static_cast<std::size_t>(h_env.rows());
  require_env_operator(h_env, n, "h_env");
  require_env_operator(v0, n, "v0");
  require_env_operator(v1, n, "v1");
  h_env_ = hermitize(h_env);
  v0_ = hermitize(v0);
  v1_ = hermitize(v1);
}

ComplexMatrix PureDephasingModel::joint_hamiltonian() const {
  const auto n = static_cast<Index>(env_dim());
  ComplexMatrix h = ComplexMatrix::Zero(2 * n, 2 * n);
  h.block(0, 0, n, n) = h0() + eps0_ * ComplexMatrix::Identity(n, n);
  h.block(n, n, n, n) = h1() + eps1_ * ComplexMatrix::Identity(n, n);
  return h;
}

QubitState::QubitState(Complex a, Complex b) : a_(a), b_(b) {
  const double norm2 = std::norm(a) + std::norm(b);
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "QubitState: |a|^2 + |b|^2 = " << norm2 << ", expected 1";
    throw ContractError(os.str());
  }
}

QubitState QubitState::normalized(Complex a, Complex b) {
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ContractError("QubitState: cannot normalize a zero amplitude pair");
  }
  return QubitState(a / norm, b / norm);
}

ComplexMatrix QubitState::density_matrix() const {
  ComplexMatrix rho(2, 2);
  rho << std::norm(a_), a_ * std::conj(b_),
         std::conj(a_) * b_, std::norm(b_);
  return rho;
}

// ---------------------------------------------------------------------------

std::size_t EnvironmentState::subspace_of(std::size_t n) const {
  for (std::size_t s = 0; s < partition.size(); ++s) {
    const auto& idx = partition[s].indices;
    if (std::find(idx.begin(), idx.end(), n) != idx.end()) return s;
  }
  throw DimensionError("EnvironmentState::subspace_of: index out of range");
}

std::vector<std::size_t> EnvironmentState::zero_indices() const {
  for (const auto& s : partition) {
    if (s.is_zero) return s.indices;
  }
  return {};
}

ComplexMatrix EnvironmentState::reassemble() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EnvironmentState analyze_environment(const ComplexMatrix& rho, EnvironmentTolerances tol) {
  require_density_matrix(rho, "analyze_environment", 1e-10, 1e-10, 1e-12);
  const HermitianEig eig = hermitian_eig(rho);
  const Index n = eig.eigenvalues.size();

  EnvironmentState env;
  env.rho = rho;
  env.tolerances = tol;
  env.eigenvalues.resize(n);
  env.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    env.eigenvalues(k) = eig.eigenvalues(n - 1 - k);
    env.eigenvectors.col(k) = eig.eigenvectors.col(n - 1 - k);
  }

  Subspace zero{0.0, {}, true};
  for (Index k = 0; k < n; ++k) {
    const double c = env.eigenvalues(k);
    const auto idx = static_cast<std::size_t>(k);
    if (c < tol.zero) {
      zero.indices.push_back(idx);
      continue;
    }
    // Sorted descending, so a new group starts whenever the gap to the
    // previous nonzero eigenvalue exceeds the grouping threshold.
    if (env.partition.empty() ||
        env.eigenvalues(static_cast<Index>(env.partition.back().indices.back())) - c >
            tol.grouping) {
      env.partition.push_back(Subspace{0.0, {}, false});
    }
    env.partition.back().indices.push_back(idx);
  }
  for (auto& s : env.partition) {
    double sum = 0.0;
    for (auto i : s.indices) sum += env.eigenvalues(static_cast<Index>(i));
    s.value = sum / static_cast<double>(s.indices.size());
  }
  env.rank = static_cast<std::size_t>(n) - zero.indices.size();
  if (!zero.indices.empty()) env.partition.push_back(std::move(zero));
  return env;
}

ComplexMatrix build_thermal(const ComplexMatrix& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ContractError("build_thermal: beta must be finite and >= 0");
  }
  const HermitianEig eig = hermitian_eig(h);
  const ComplexMatrix rho =
      eig.eigenvectors * thermal_weights_diag(eig.eigenvalues, beta) * eig.eigenvectors.adjoint();
  return hermitize(rho);
}

// ---------------------------------------------------------------------------

std::string_view to_string(ModelClass c) {
  switch (c) {
    case ModelClass::generic: return "generic";
    case ModelClass::random_unitary: return "random_unitary";
    case ModelClass::block_preserving: return "block_preserving";
  }
  return "unknown";
}

std::optional<ModelClass> parse_model_class(std::string_view name) {
  if (name == "generic") return ModelClass::generic;
  if (name == "random_unitary" || name == "ru") return ModelClass::random_unitary;
  if (name == "block_preserving" || name == "blocks") return ModelClass::block_preserving;
  return std::nullopt;
}

namespace {

GeneratedModel generic_model(std::size_t n, Rng& rng, std::optional<double> beta_override) {
  ComplexMatrix h_env = random_hermitian(n, rng);
  ComplexMatrix v0 = random_hermitian(n, rng);
  ComplexMatrix v1 = random_hermitian(n, rng);
  const double drawn_beta = rng.uniform(0.1, 2.0);
  const double beta = beta_override.value_or(drawn_beta);
  const double eps0 = rng.normal();
  const double eps1 = rng.normal();
  ComplexMatrix rho = build_thermal(h_env, beta);
  return {PureDephasingModel(eps0, eps1, std::move(h_env), std::move(v0), std::move(v1)),
          std::move(rho), beta, {}, identity(n)};
}

GeneratedModel random_unitary_model(std::size_t n, Rng& rng,
                                    std::optional<double> beta_override) {
  const ComplexMatrix q = random_unitary(n, rng);
  const auto dim = static_cast<Index>(n);
  RealVector e(dim), d0(dim), d1(dim);
  for (Index k = 0; k < dim; ++k) e(k) = rng.normal();
  for (Index k = 0; k < dim; ++k) d0(k) = rng.normal();
  for (Index k = 0; k < dim; ++k) d1(k) = rng.normal();
  const double drawn_beta = rng.uniform(0.1, 2.0);
  const double beta = beta_override.value_or(drawn_beta);
  const double eps0 = rng.normal();
  const double eps1 = rng.normal();
  auto in_basis = [&q](const RealVector& diag) {
    return hermitize(q * diag.cast<Complex>().asDiagonal() * q.adjoint());
  };
  ComplexMatrix rho = hermitize(q * thermal_weights_diag(e, beta) * q.adjoint());
  return {PureDephasingModel(eps0, eps1, in_basis(e), in_basis(d0), in_basis(d1)),
          std::move(rho), beta, {}, q};
}

GeneratedModel block_preserving_model(std::size_t n, Rng& rng) {
  const auto m = static_cast<std::size_t>(rng.uniform_int(2, n));
  std::vector<std::vector<std::size_t>> blocks(m);
  for (std::size_t k = 0; k < m; ++k) blocks[k].push_back(k);
  for (std::size_t k = m; k < n; ++k) {
    blocks[static_cast<std::size_t>(rng.uniform_int(0, m - 1))].push_back(k);
  }
  for (auto& b : blocks) std::sort(b.begin(), b.end());

  const ComplexMatrix q = random_unitary(n, rng);
  const auto dim = static_cast<Index>(n);
  auto block_diag = [&]() {
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (const auto& b : blocks) {
      const ComplexMatrix sub = random_hermitian(b.size(), rng);
      for (std::size_t r = 0; r < b.size(); ++r) {
        for (std::size_t c = 0; c < b.size(); ++c) {
          h(static_cast<Index>(b[r]), static_cast<Index>(b[c])) =
              sub(static_cast<Index>(r), static_cast<Index>(c));
        }
      }
    }
    return hermitize(q * h * q.adjoint());
  };
  ComplexMatrix h_env = block_diag();
  ComplexMatrix v0 = block_diag();
  ComplexMatrix v1 = block_diag();

  // Strictly increasing raw weights (gaps >= 0.5) keep subspace values distinct.
  RealVector c(dim);
  double total = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    const double raw = static_cast<double>(s) + 1.0 + 0.5 * rng.uniform();
    for (auto k : blocks[s]) c(static_cast<Index>(k)) = raw;
    total += raw * static_cast<double>(blocks[s].size());
  }
  c /= total;
  const double eps0 = rng.normal();
  const double eps1 = rng.normal();
  ComplexMatrix rho = hermitize(q * c.cast<Complex>().asDiagonal() * q.adjoint());
  return {PureDephasingModel(eps0, eps1, std::move(h_env), std::move(v0), std::move(v1)),
          std::move(rho), 0.0, std::move(blocks), q};
}

}  // namespace

GeneratedModel build_random_model(std::size_t env_dim, ModelClass cls, std::uint64_t seed,
                                  std::optional<double> beta_override) {
  if (env_dim < 2) throw DimensionError("build_random_model: env_dim must be >= 2");
  if (env_dim > kDefaultMaxDim / 2) {
    throw DimensionError("build_random_model: env_dim exceeds maximum");
  }
  Rng rng(seed);
  switch (cls) {
    case ModelClass::generic: return generic_model(env_dim, rng, beta_override);
    case ModelClass::random_unitary: return random_unitary_model(env_dim, rng, beta_override);
    case ModelClass::block_preserving: return block_preserving_model(env_dim, rng);
  }
  throw ContractError("build_random_model: unknown class");
}

PureDephasingModel build_ising_bath(std::size_t n_spins, const std::vector<double>& couplings,
                                    double field) {
  if (n_spins < 1 || n_spins > 8) {
    throw DimensionError("build_ising_bath: n_spins must be in [1, 8]");
  }
  if (couplings.size() != n_spins) {
    throw DimensionError("build_ising_bath: expected one coupling per spin");
  }
  const std::size_t dim = std::size_t{1} << n_spins;
  auto site_op = [n_spins](std::size_t site, const ComplexMatrix& op) {
    ComplexMatrix out = identity(1);
    for (std::size_t k = 0; k < n_spins; ++k) out = kron(out, k == site ? op : identity(2));
    return out;
  };
  ComplexMatrix h_env = ComplexMatrix::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  ComplexMatrix v1 = h_env;
  for (std::size_t k = 0; k < n_spins; ++k) {
    if (field != 0.0) h_env += field * site_op(k, pauli_x());
    if (couplings[k] != 0.0) v1 += couplings[k] * site_op(k, pauli_z());
  }
  ComplexMatrix v0 = ComplexMatrix::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  return PureDephasingModel(0.0, 0.0, std::move(h_env), std::move(v0), std::move(v1));
}

}  // namespace qee
