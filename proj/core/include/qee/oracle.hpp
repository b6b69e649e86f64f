#pragma once

// Brute-force cross-checks for the fast paths in criterion/evolution, and the
// randomized equivalence battery. Nothing here shares code with the paths it
// checks beyond the matrix type and generic linear algebra: w(t) is
// recomputed with Eigen's Pade-based matrix exponential, the joint state by
// explicit conjugation with U~(t), and minors as explicit determinants.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qee/criterion.hpp"
#include "qee/evolution.hpp"
#include "qee/model.hpp"

namespace qee::oracle {

// w(t) = expm(i H_0 t) expm(-i H_1 t) by scaling-and-squaring Pade.
ComplexMatrix pade_conditional_operator(const PureDephasingModel& model, double t);

// U~(t) (rho_Q (x) rho_E) U~(t)^dagger with U~ = |0><0| (x) 1 + |1><1| (x) w and
// w from pade_conditional_operator.
JointState conjugation_path_joint(const PureDephasingModel& model, const QubitState& qubit,
                                  const EnvironmentState& env, double t);
// Same conjugation with a caller-supplied w.
JointState conjugation_path_joint(const QubitState& qubit, const EnvironmentState& env,
                                  const ComplexMatrix& w, double t = 0.0);

// Determinant of a principal minor of the partial transpose of the rotated
// joint state, written in the eigenbasis of rho_E(0). Keeps the |a|^2-block
// rows {0..N-1} minus `crossed_out`, plus the single |b|^2-block row N + i.
Complex minor_direct(const EnvironmentState& env, const ConditionalEvolution& cond,
                     const QubitState& qubit, std::size_t i,
                     const std::vector<std::size_t>& crossed_out = {});

struct AppendixFixture {
  ComplexMatrix unitary;  // U_C on qubit (x) 2-level environment
  ComplexMatrix state;    // U_C (|psi><psi| (x) 1/2) U_C^dagger, psi = |0>
  double expected_concurrence = 0.5;
};

// Non-dephasing entangling unitary acting on a maximally mixed environment:
//   U|00> = |01>, U|01> = (|00> + |11>)/sqrt2,
//   U|10> = (|00> - |11>)/sqrt2, U|11> = |10>.
AppendixFixture appendix_fixture();
// The resulting state written out entry by entry.
ComplexMatrix appendix_expected_state();

struct DephasingFormCheck {
  bool admits_dephasing_form = false;
  double unital_defect = 0.0;   // |Bloch vector of Phi(1/2)|
  double max_singular = 0.0;    // largest singular value of the Bloch matrix
};

// Necessary condition for a joint unitary to be (up to qubit rotations)
// block diagonal in the qubit: with the environment maximally mixed, the
// reduced qubit channel must be unital and map some pure state to a pure
// state (largest singular value of its Bloch matrix equal to 1).
DephasingFormCheck dephasing_necessary_condition(const ComplexMatrix& unitary,
                                                 double tol = 1e-9);

struct DephasingGridSearch {
  double min_purity_defect = 0.0;  // min over inputs |n> of 1 - Tr Phi(|n><n|)^2
  double best_theta_deg = 0.0;
  double best_phi_deg = 0.0;
};

// Exhaustive search over qubit input directions on a (theta, phi) grid.
DephasingGridSearch dephasing_grid_search(const ComplexMatrix& unitary,
                                          double resolution_deg = 1.0);

// ---------------------------------------------------------------------------
// Randomized equivalence battery

struct BatteryOptions {
  std::size_t count = 1000;
  std::uint64_t seed = 7;
  std::vector<std::size_t> dims{2, 3, 4};
  std::vector<ModelClass> classes{ModelClass::generic, ModelClass::random_unitary,
                                  ModelClass::block_preserving};
  std::vector<double> times{0.1, 0.5, 1.0, 3.0};
  std::optional<double> beta_override;
  CriterionTolerances tol;
  bool check_witness = true;
  std::size_t threads = 1;
  // Test hook: every k-th trial runs with a corrupted y matrix, so the minor
  // search disagrees with the commutator whenever the trial is entangled.
  std::size_t inject_fault_every = 0;
};

enum class FailureKind { inconsistent_verdict, decomposition, witness };

std::string_view to_string(FailureKind k);

struct BatteryFailure {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  ModelClass cls = ModelClass::generic;
  std::size_t env_dim = 0;
  double time = 0.0;
  FailureKind kind = FailureKind::inconsistent_verdict;
  std::string message;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  ModelClass cls = ModelClass::generic;
  std::size_t env_dim = 0;
  std::vector<char> entangled;  // one per time point
};

struct BatterySummary {
  std::size_t trials = 0;
  std::size_t verdicts = 0;
  std::size_t separable = 0;
  std::size_t entangled = 0;
  std::size_t inconsistent = 0;
  std::size_t decomposition_failures = 0;
  std::size_t witness_failures = 0;
  std::size_t witness_lab_checks = 0;
  double max_reconstruction_error = 0.0;
  std::vector<BatteryFailure> failures;
  std::vector<TrialRecord> records;

  bool ok() const { return failures.empty(); }
};

// Seed of trial k, derived from the battery seed (SplitMix64 mixing).
std::uint64_t trial_seed(std::uint64_t battery_seed, std::size_t trial);
// Qubit amplitudes used for trial seeds: a = cos(theta), b = sin(theta) e^{i phi},
// theta in [0.2, pi/2 - 0.2].
QubitState trial_qubit(std::uint64_t seed);
// Second, fixed (a, b) pair for the "any a and b" rotated-frame check.
QubitState alternate_qubit();

BatterySummary equivalence_battery(const BatteryOptions& options);

// Human-readable failure report with everything needed to reproduce.
std::string format_failure(const BatteryFailure& f);

}  // namespace qee::oracle
