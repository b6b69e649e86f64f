#include "qee/criterion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qee/error.hpp"

namespace qee {

namespace {

using Index = Eigen::Index;

void require_matching(const EnvironmentState& env, const ConditionalEvolution& cond,
                      const char* what) {
  if (static_cast<std::size_t>(cond.w.rows()) != env.dim() ||
      static_cast<std::size_t>(cond.y.rows()) != env.dim()) {
    std::ostringstream os;
    os << what << ": environment has dimension " << env.dim() << " but w is " << cond.w.rows()
       << "x" << cond.w.cols();
    throw DimensionError(os.str());
  }
}

void require_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) {
    std::ostringstream os;
    os << what << ": index " << i << " out of range [0, " << n << ")";
    throw DimensionError(os.str());
  }
}

double log_abs(Complex z) { return std::log(std::abs(z)); }

double support_log_product(const EnvironmentState& env) {
  double s = 0.0;
  for (std::size_t k = 0; k < env.rank; ++k) s += std::log(env.eigenvalues(static_cast<Index>(k)));
  return s;
}

// Sum over n in [0, m) of c_n |y_ni|^2 - c_i^2 / c_n |y_in|^2.
double bordered_sum(std::size_t i, std::size_t m, const EnvironmentState& env,
                    const ComplexMatrix& y) {
  const double ci = env.eigenvalues(static_cast<Index>(i));
  double sum = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    const auto nn = static_cast<Index>(n);
    const auto ii = static_cast<Index>(i);
    const double cn = env.eigenvalues(nn);
    sum += cn * std::norm(y(nn, ii)) - ci * ci / cn * std::norm(y(ii, nn));
  }
  return sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commutator and cross-block elements

CommutatorResult commutator_criterion(const EnvironmentState& env,
                                      const ConditionalEvolution& cond, double tol) {
  require_matching(env, cond, "commutator_criterion");
  const double norm = commutator(env.rho, cond.w).norm();
  return {norm <= tol * cond.w.norm(), norm};
}

std::vector<CrossBlockElement> cross_block_elements(const EnvironmentState& env,
                                                    const ConditionalEvolution& cond,
                                                    double tol) {
  require_matching(env, cond, "cross_block_elements");
  const std::size_t n = env.dim();
  std::vector<std::size_t> label(n);
  for (std::size_t s = 0; s < env.partition.size(); ++s) {
    for (auto k : env.partition[s].indices) label[k] = s;
  }
  std::vector<CrossBlockElement> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      if (label[i] == label[m]) continue;
      // <m|w|i> = conj(<i|w^dagger|m>) = conj(y(i, m))
      const double mag = std::abs(cond.y(static_cast<Index>(i), static_cast<Index>(m)));
      if (mag > tol) out.push_back({i, m, mag});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.magnitude > r.magnitude;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Minors

double MinorValue::value() const {
  if (scaled == 0.0) return 0.0;
  return scaled * std::exp(log_prefactor);
}

MinorValue full_rank_minor(std::size_t i, const EnvironmentState& env,
                           const ConditionalEvolution& cond, const QubitState& qubit) {
  require_matching(env, cond, "full_rank_minor");
  require_index(i, env.dim(), "full_rank_minor");
  if (!env.full_rank()) {
    std::ostringstream os;
    os << "full_rank_minor: rho_E(0) has " << env.zero_count()
       << " zero eigenvalue(s); use minor_value or support_minor";
    throw ContractError(os.str());
  }
  const auto n = static_cast<double>(env.dim());
  MinorValue mv;
  mv.index = i;
  mv.regime = MinorRegime::full_rank;
  mv.scaled = bordered_sum(i, env.dim(), env, cond.y);
  mv.log_prefactor = 2.0 * n * log_abs(qubit.a()) + 2.0 * log_abs(qubit.b()) +
                     support_log_product(env);
  return mv;
}

MinorValue support_minor(std::size_t i, const EnvironmentState& env,
                         const ConditionalEvolution& cond, const QubitState& qubit) {
  require_matching(env, cond, "support_minor");
  require_index(i, env.rank, "support_minor");
  MinorValue mv;
  mv.index = i;
  mv.regime = env.full_rank() ? MinorRegime::full_rank : MinorRegime::reduced_support;
  mv.scaled = bordered_sum(i, env.rank, env, cond.y);
  mv.log_prefactor = 2.0 * static_cast<double>(env.rank) * log_abs(qubit.a()) +
                     2.0 * log_abs(qubit.b()) + support_log_product(env);
  return mv;
}

MinorValue minor_value(std::size_t i, const EnvironmentState& env,
                       const ConditionalEvolution& cond, const QubitState& qubit,
                       std::optional<std::size_t> zero_index) {
  require_matching(env, cond, "minor_value");
  require_index(i, env.dim(), "minor_value");
  if (env.full_rank()) {
    if (zero_index) {
      throw ContractError("minor_value: zero_index given but rho_E(0) has full rank");
    }
    return full_rank_minor(i, env, cond, qubit);
  }
  const std::vector<std::size_t> zeros = env.zero_indices();
  const std::size_t r = zero_index.value_or(zeros.front());
  if (std::find(zeros.begin(), zeros.end(), r) == zeros.end()) {
    std::ostringstream os;
    os << "minor_value: index " << r << " is not a zero eigenvalue of rho_E(0)";
    throw ContractError(os.str());
  }
  const std::size_t k = zeros.size();
  const bool i_in_support = i < env.rank;
  const double ci = i_in_support ? env.eigenvalues(static_cast<Index>(i)) : 0.0;

  MinorValue mv;
  mv.index = i;
  mv.zero_index = r;
  mv.regime = MinorRegime::zero_border;
  mv.scaled = -ci * ci * std::norm(cond.y(static_cast<Index>(i), static_cast<Index>(r)));
  mv.log_prefactor = 2.0 * static_cast<double>(env.dim() - k + 1) * log_abs(qubit.a()) +
                     2.0 * log_abs(qubit.b()) + support_log_product(env);
  return mv;
}

MinorSearch find_negative_minor(const EnvironmentState& env, const ConditionalEvolution& cond,
                                const QubitState& qubit, double tol) {
  require_matching(env, cond, "find_negative_minor");
  if (!qubit.is_superposition(tol)) return {std::nullopt, true};

  if (!env.full_rank()) {
    const std::vector<std::size_t> zeros = env.zero_indices();
    for (std::size_t i = 0; i < env.rank; ++i) {
      for (auto r : zeros) {
        MinorValue mv = minor_value(i, env, cond, qubit, r);
        if (mv.scaled < -tol) return {mv, false};
      }
    }
  }
  // Eigenvalues are sorted descending, so index order is the largest-c_i-first
  // iteration; the support is the leading `rank` indices.
  for (std::size_t i = 0; i < env.rank; ++i) {
    MinorValue mv = support_minor(i, env, cond, qubit);
    if (mv.scaled < -tol) return {mv, false};
  }
  return {std::nullopt, false};
}

// ---------------------------------------------------------------------------
// Negativity

NegativityResult ppt_negativity(const JointState& joint) {
  const ComplexMatrix pt = partial_transpose_qubit(joint.matrix, joint.env_dim);
  const HermitianEig eig = hermitian_eig(pt);
  NegativityResult r;
  r.min_eigenvalue = eig.eigenvalues.minCoeff();
  for (Index k = 0; k < eig.eigenvalues.size(); ++k) {
    if (eig.eigenvalues(k) < 0.0) r.negativity -= eig.eigenvalues(k);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Separable decomposition

ComplexMatrix DecompositionTerm::qubit_state() const {
  ComplexVector psi(2);
  psi << qubit_a, qubit_b;
  return psi * psi.adjoint();
}

ComplexMatrix DecompositionTerm::env_state() const { return env_vector * env_vector.adjoint(); }

ComplexMatrix SeparableDecomposition::reconstruct() const {
  const auto n = static_cast<Index>(env_dim);
  ComplexMatrix out = ComplexMatrix::Zero(2 * n, 2 * n);
  for (const auto& term : terms) {
    const Complex amp[2] = {term.qubit_a, term.qubit_b};
    const ComplexMatrix env_part = term.env_state();
    for (Index p = 0; p < 2; ++p) {
      for (Index q = 0; q < 2; ++q) {
        out.block(p * n, q * n, n, n) += (term.weight * amp[p] * std::conj(amp[q])) * env_part;
      }
    }
  }
  return out;
}

double SeparableDecomposition::total_weight() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight;
  return s;
}

SeparableDecomposition separable_decomposition(const EnvironmentState& env,
                                               const ConditionalEvolution& cond,
                                               const QubitState& qubit, double tol) {
  require_matching(env, cond, "separable_decomposition");
  SeparableDecomposition d;
  d.env_dim = env.dim();

  if (!qubit.is_superposition(tol)) {
    // Only one qubit branch carries weight: rho_E or w rho_E w^dagger, in product
    // with |0> or |1>.
    const bool upper = std::abs(qubit.a()) > std::abs(qubit.b());
    for (std::size_t k = 0; k < env.rank; ++k) {
      DecompositionTerm t;
      t.weight = env.eigenvalues(static_cast<Index>(k));
      t.qubit_a = upper ? 1.0 : 0.0;
      t.qubit_b = upper ? 0.0 : 1.0;
      const ComplexVector v = env.eigenvectors.col(static_cast<Index>(k));
      t.env_vector = upper ? v : ComplexVector(cond.w * v);
      t.subspace = env.subspace_of(k);
      d.terms.push_back(std::move(t));
    }
    return d;
  }

  const CommutatorResult comm = commutator_criterion(env, cond, tol);
  if (!comm.separable) {
    std::ostringstream os;
    os << "separable_decomposition: state is entangled (||[rho_E, w]||_F = " << comm.norm << ")";
    throw ContractError(os.str());
  }

  for (std::size_t s = 0; s < env.partition.size(); ++s) {
    const Subspace& sub = env.partition[s];
    if (sub.is_zero) continue;
    const auto ds = static_cast<Index>(sub.indices.size());
    ComplexMatrix basis(static_cast<Index>(env.dim()), ds);
    for (Index k = 0; k < ds; ++k) {
      basis.col(k) = env.eigenvectors.col(static_cast<Index>(sub.indices[static_cast<std::size_t>(k)]));
    }
    const ComplexMatrix restricted = basis.adjoint() * cond.w * basis;
    // The restriction is unitary, hence normal: its Schur form is diagonal
    // and the Schur vectors are an orthonormal eigenbasis.
    Eigen::ComplexSchur<ComplexMatrix> schur(restricted);
    const ComplexMatrix vecs = basis * schur.matrixU();
    for (Index k = 0; k < ds; ++k) {
      const Complex lambda = schur.matrixT()(k, k);
      double chi = -std::arg(lambda);
      if (chi <= -std::numbers::pi) chi += 2.0 * std::numbers::pi;
      DecompositionTerm t;
      t.weight = sub.value;
      t.qubit_a = qubit.a();
      t.qubit_b = qubit.b() * std::polar(1.0, -chi);
      t.env_vector = vecs.col(k);
      t.phase = chi;
      t.subspace = s;
      d.terms.push_back(std::move(t));
    }
  }
  return d;
}

double reconstruction_error(const SeparableDecomposition& d, const JointState& joint) {
  return trace_distance(d.reconstruct(), joint.matrix);
}

bool decomposition_factors_valid(const SeparableDecomposition& d) {
  if (std::abs(d.total_weight() - 1.0) > 1e-10) return false;
  for (const auto& t : d.terms) {
    if (!(t.weight > 0.0)) return false;
    if (std::abs(std::norm(t.qubit_a) + std::norm(t.qubit_b) - 1.0) > 1e-10) return false;
    if (std::abs(t.env_vector.squaredNorm() - 1.0) > 1e-10) return false;
    if (!is_density_matrix(t.qubit_state()) || !is_density_matrix(t.env_state())) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Concurrence

double concurrence_two_qubit(const ComplexMatrix& state) {
  if (state.rows() != 4 || state.cols() != 4) {
    throw DimensionError("concurrence_two_qubit: state must be 4x4");
  }
  require_density_matrix(state, "concurrence_two_qubit");
  const ComplexMatrix yy = kron(pauli_y(), pauli_y());
  const ComplexMatrix flipped = yy * state.conjugate() * yy;

  // sqrt(rho) tilde-rho sqrt(rho) is Hermitian PSD with the same spectrum as
  // rho tilde-rho.
  const HermitianEig eig = hermitian_eig(state);
  RealVector root = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix sqrt_rho =
      eig.eigenvectors * root.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
  const ComplexMatrix r = sqrt_rho * flipped * sqrt_rho;
  const RealVector ev = hermitian_eig(0.5 * (r + r.adjoint())).eigenvalues;  // ascending

  std::array<double, 4> lam{};
  for (Index k = 0; k < 4; ++k) lam[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, ev(3 - k)));
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

// ---------------------------------------------------------------------------
// Verdict

std::string describe(const EntanglementVerdict& v) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << v.time << " separable=" << v.separable
     << " no_superposition=" << v.no_superposition << " comm_norm=" << v.commutator_norm
     << " cross_block=" << v.cross_block.size() << " negativity=" << v.negativity
     << " min_pt_eig=" << v.min_pt_eigenvalue;
  if (v.negative_minor) {
    os << " minor_index=" << v.negative_minor->index
       << " minor_scaled=" << v.negative_minor->scaled
       << " minor_log_prefactor=" << v.negative_minor->log_prefactor;
  } else {
    os << " minor=none";
  }
  if (v.decomposition) {
    os << " decomposition_terms=" << v.decomposition->terms.size()
       << " reconstruction_error=" << v.reconstruction_error;
  }
  return os.str();
}

EntanglementVerdict verdict(const QubitState& qubit, const EnvironmentState& env,
                            const ConditionalEvolution& cond, CriterionTolerances tol) {
  require_matching(env, cond, "verdict");
  EntanglementVerdict v;
  v.time = cond.time;

  const CommutatorResult comm = commutator_criterion(env, cond, tol.decision);
  v.commutator_norm = comm.norm;
  v.cross_block = cross_block_elements(env, cond, tol.decision);
  const MinorSearch search = find_negative_minor(env, cond, qubit, tol.decision);
  v.negative_minor = search.hit;
  v.no_superposition = search.no_superposition;

  const JointState joint = rotated_joint_state(qubit, env, cond);
  const NegativityResult neg = ppt_negativity(joint);
  v.negativity = neg.negativity;
  v.min_pt_eigenvalue = neg.min_eigenvalue;

  if (v.no_superposition) {
    v.separable = true;
  } else {
    v.separable = comm.separable;
    const bool cross_sep = v.cross_block.empty();
    const bool minor_sep = !v.negative_minor.has_value();
    const bool neg_sep = v.negativity <= tol.decision;
    if (cross_sep != v.separable || minor_sep != v.separable || neg_sep != v.separable) {
      std::ostringstream os;
      os << "verdict: separability tests disagree (commutator=" << v.separable
         << " cross_block=" << cross_sep << " minor=" << minor_sep << " negativity=" << neg_sep
         << "; tol=" << tol.decision << "): " << describe(v);
      throw InconsistencyError(os.str());
    }
  }

  if (v.separable) {
    v.decomposition = separable_decomposition(env, cond, qubit, tol.decision);
    v.reconstruction_error = reconstruction_error(*v.decomposition, joint);
    if (v.reconstruction_error > tol.reconstruction) {
      throw InconsistencyError("verdict: separable decomposition does not reconstruct the state: " +
                               describe(v));
    }
  }
  return v;
}

EntanglementVerdict verdict(const PureDephasingModel& model, const QubitState& qubit,
                            const EnvironmentState& env, double t, CriterionTolerances tol) {
  return verdict(qubit, env, conditional_evolution(model, env, t), tol);
}

}  // namespace qee
