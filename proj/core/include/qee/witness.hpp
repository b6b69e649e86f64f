#pragma once

// Entanglement witness that only looks at the environment.
//
// In the rotated frame the reduced environment state stays at rho_E(0) iff the
// evolution is non-entangling. If in addition [H_0, rho_E(0)] = 0 (or the
// analogous condition with H_1), the lab-frame environment state is also
// static exactly when no entanglement is generated, so any observed change of
// the environment certifies qubit-environment entanglement.

#include <optional>
#include <string_view>

#include "qee/evolution.hpp"
#include "qee/model.hpp"

namespace qee {

enum class WitnessPrecondition { h0_commutes, h1_commutes, both, neither };

std::string_view to_string(WitnessPrecondition p);

struct PreconditionCheck {
  WitnessPrecondition kind = WitnessPrecondition::neither;
  double h0_commutator = 0.0;  // ||[H_0, rho_E(0)]||_F
  double h1_commutator = 0.0;  // ||[H_1, rho_E(0)]||_F

  bool holds() const { return kind != WitnessPrecondition::neither; }
};

// [H_i, rho] counts as zero when its norm is <= tol * ||H_i||_F * ||rho||_F.
PreconditionCheck witness_precondition(const PureDephasingModel& model,
                                       const EnvironmentState& env, double tol = 1e-9);

struct WitnessReport {
  PreconditionCheck precondition;
  double env_change_rot = 0.0;  // ||rho~_E(t) - rho_E(0)||_tr
  double env_change_lab = 0.0;  // ||rho_E(t) - rho_E(0)||_tr
  // Present only when the precondition holds and the qubit is in a
  // superposition; true iff env_change_lab > tol.
  std::optional<bool> witnessed_entangled;

  bool precondition_holds() const { return precondition.holds(); }
};

WitnessReport env_change_witness(const PureDephasingModel& model, const QubitState& qubit,
                                 const EnvironmentState& env, double t, double tol = 1e-9);
// Reuses a precomputed w(t) for the rotated-frame part.
WitnessReport env_change_witness(const PureDephasingModel& model, const QubitState& qubit,
                                 const EnvironmentState& env, const ConditionalEvolution& cond,
                                 double tol = 1e-9);

}  // namespace qee
