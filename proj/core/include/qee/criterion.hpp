#pragma once

// Separability of the qubit-environment state generated by pure dephasing.
//
// The joint state at time t is separable iff [rho_E(0), w(t)] = 0, i.e. iff
// w(t) has no matrix elements between eigenvectors of rho_E(0) with
// different eigenvalues. Entanglement, when present, always shows up as a
// negative principal minor of the partial transpose, so the PPT test is
// complete here. This header exposes the three routes to the decision
// (commutator, closed-form minors, PPT negativity), the explicit separable
// decomposition, and `verdict`, which runs all of them and cross-checks.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qee/evolution.hpp"
#include "qee/linalg.hpp"
#include "qee/model.hpp"

namespace qee {

inline constexpr double kDefaultDecisionTol = 1e-9;
inline constexpr double kDefaultReconstructionTol = 1e-8;

struct CommutatorResult {
  bool separable = false;
  double norm = 0.0;  // ||rho w - w rho||_F
};

// separable <=> norm <= tol * ||w||_F.
CommutatorResult commutator_criterion(const EnvironmentState& env,
                                      const ConditionalEvolution& cond,
                                      double tol = kDefaultDecisionTol);

struct CrossBlockElement {
  std::size_t i = 0;
  std::size_t n = 0;
  double magnitude = 0.0;  // |<n| w |i>|
};

// All (i, n) in different subspaces of env.partition with |<n|w|i>| > tol,
// largest magnitude first.
std::vector<CrossBlockElement> cross_block_elements(const EnvironmentState& env,
                                                    const ConditionalEvolution& cond,
                                                    double tol = kDefaultDecisionTol);

enum class MinorRegime {
  full_rank,       // all c_n > 0
  zero_border,     // K >= 1 zero eigenvalues, one zero row r kept
  reduced_support  // full-rank formula on the support of rho_E(0)
};

// A principal minor of the partial transpose, stored in scaled form:
//   value = scaled * exp(log_prefactor)
// The prefactor |a|^{2m} |b|^2 prod_k c_k underflows for large N; signs are
// decided on `scaled` alone.
struct MinorValue {
  std::size_t index = 0;                    // i
  std::optional<std::size_t> zero_index;    // r, for the zero_border regime
  MinorRegime regime = MinorRegime::full_rank;
  double scaled = 0.0;
  double log_prefactor = 0.0;

  double value() const;
};

// Full-rank closed form:
//   M_i = |a|^{2N} |b|^2 (prod_k c_k) sum_n (c_n |y_ni|^2 - c_i^2 / c_n |y_in|^2).
// Throws ContractError on rank-deficient input.
MinorValue full_rank_minor(std::size_t i, const EnvironmentState& env,
                           const ConditionalEvolution& cond, const QubitState& qubit);

// Same formula restricted to the support of rho_E(0) (the nonzero c_n).
MinorValue support_minor(std::size_t i, const EnvironmentState& env,
                         const ConditionalEvolution& cond, const QubitState& qubit);

// Dispatches on the rank of rho_E(0). Full rank: full_rank_minor. With K
// zero eigenvalues the minor keeps the N - K support rows, one zero row r
// (default: the first zero index) and the |b|^2 row i:
//   M_i = -|a|^{2(N-K+1)} |b|^2 (prod_{c_k > 0} c_k) c_i^2 |y_ir|^2,
// which is 0 when i is itself a zero index.
MinorValue minor_value(std::size_t i, const EnvironmentState& env,
                       const ConditionalEvolution& cond, const QubitState& qubit,
                       std::optional<std::size_t> zero_index = std::nullopt);

struct MinorSearch {
  std::optional<MinorValue> hit;
  bool no_superposition = false;
};

// Walks i in descending c_i order and returns the first minor with
// scaled < -tol. Rank-deficient inputs first try every (i, r) pair with a
// zero row r, then the full-rank formula on the support. Gated (absent, with
// no_superposition set) when |a| or |b| <= tol.
MinorSearch find_negative_minor(const EnvironmentState& env, const ConditionalEvolution& cond,
                                const QubitState& qubit, double tol = kDefaultDecisionTol);

struct NegativityResult {
  double negativity = 0.0;  // sum of |negative eigenvalues| of the partial transpose
  double min_eigenvalue = 0.0;
};

NegativityResult ppt_negativity(const JointState& joint);

struct DecompositionTerm {
  double weight = 0.0;
  Complex qubit_a;            // qubit factor a|0> + qubit_b|1>
  Complex qubit_b;
  ComplexVector env_vector;   // environment factor |k>, unit norm
  double phase = 0.0;         // chi_k in (-pi, pi], w|k> = exp(-i chi_k)|k>
  std::size_t subspace = 0;

  ComplexMatrix qubit_state() const;
  ComplexMatrix env_state() const;
};

struct SeparableDecomposition {
  std::vector<DecompositionTerm> terms;
  std::size_t env_dim = 0;

  // sum_k p_k rho_k (x) R_k
  ComplexMatrix reconstruct() const;
  double total_weight() const;
};

// Per subspace s of rho_E(0) with weight c_s: diagonalize the restriction of
// w to s as exp(-i h_s) and emit one term per eigenvector |k>,
//   c_s * |psi_k><psi_k| (x) |k><k|,  psi_k = (a, b e^{-i chi_k}).
// Throws ContractError if the commutator criterion reports entanglement.
SeparableDecomposition separable_decomposition(const EnvironmentState& env,
                                               const ConditionalEvolution& cond,
                                               const QubitState& qubit,
                                               double tol = kDefaultDecisionTol);

// Trace-norm distance between the reassembled decomposition and `joint`.
double reconstruction_error(const SeparableDecomposition& d, const JointState& joint);

// Positive weights summing to 1 (within 1e-10) and valid pure factors.
bool decomposition_factors_valid(const SeparableDecomposition& d);

// Wootters concurrence of a two-qubit density matrix.
double concurrence_two_qubit(const ComplexMatrix& state);

struct CriterionTolerances {
  double decision = kDefaultDecisionTol;
  double reconstruction = kDefaultReconstructionTol;
};

struct EntanglementVerdict {
  bool separable = false;
  bool no_superposition = false;
  double time = 0.0;
  double commutator_norm = 0.0;
  std::vector<CrossBlockElement> cross_block;
  std::optional<MinorValue> negative_minor;
  double negativity = 0.0;
  double min_pt_eigenvalue = 0.0;
  std::optional<SeparableDecomposition> decomposition;
  double reconstruction_error = 0.0;
};

// Runs every test and checks that they agree; disagreement throws
// InconsistencyError carrying all raw values.
EntanglementVerdict verdict(const QubitState& qubit, const EnvironmentState& env,
                            const ConditionalEvolution& cond, CriterionTolerances tol = {});
EntanglementVerdict verdict(const PureDephasingModel& model, const QubitState& qubit,
                            const EnvironmentState& env, double t,
                            CriterionTolerances tol = {});

std::string describe(const EntanglementVerdict& v);

}  // namespace qee
