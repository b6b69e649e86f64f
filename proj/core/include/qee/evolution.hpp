#pragma once

// Conditional environment evolution w(t) = exp(i H_0 t) exp(-i H_1 t) and the
// joint qubit-environment state it generates.
//
// Rotated frame: the joint state evolved by |0><0| (x) 1 + |1><1| (x) w(t),
//   sigma~(t) = [[ |a|^2 rho,  a b* rho w^dagger ],
//                [ a* b w rho, |b|^2 w rho w^dagger ]]
// Lab frame: exp(-iHt) (rho_Q (x) rho_E) exp(iHt) with the full Hamiltonian.
// The two differ by a product of local unitaries.

#include "qee/linalg.hpp"
#include "qee/model.hpp"

namespace qee {

enum class Frame { rotated, lab };

struct ConditionalEvolution {
  ComplexMatrix w;
  double time = 0.0;
  // y(n, i) = <n| w^dagger |i> in the eigenbasis of rho_E(0).
  ComplexMatrix y;
};

struct JointState {
  ComplexMatrix matrix;
  Frame frame = Frame::rotated;
  double time = 0.0;
  std::size_t env_dim = 0;
};

// w(t) alone.
ComplexMatrix conditional_operator(const PureDephasingModel& model, double t);

ConditionalEvolution conditional_evolution(const PureDephasingModel& model,
                                           const EnvironmentState& env, double t);

// Block formula, given a precomputed conditional evolution.
JointState rotated_joint_state(const QubitState& qubit, const EnvironmentState& env,
                               const ConditionalEvolution& cond);

JointState joint_state(const PureDephasingModel& model, const QubitState& qubit,
                       const EnvironmentState& env, double t, Frame frame);

ComplexMatrix reduced_env(const PureDephasingModel& model, const QubitState& qubit,
                          const EnvironmentState& env, double t, Frame frame);

// |a|^2 rho + |b|^2 w rho w^dagger, without assembling the joint state.
ComplexMatrix reduced_env_closed_form(const QubitState& qubit, const EnvironmentState& env,
                                      const ComplexMatrix& w);

// Off-diagonal element of the rotated-frame qubit state: a b* Tr[rho w^dagger].
Complex qubit_coherence(const QubitState& qubit, const EnvironmentState& env,
                        const ComplexMatrix& w);
Complex qubit_coherence(const PureDephasingModel& model, const QubitState& qubit,
                        const EnvironmentState& env, double t);

// Hermitian within 1e-10 relative, trace 1 within 1e-10, min eigenvalue
// >= -1e-9. Throws ContractError naming the violated property.
void validate_joint_state(const JointState& s);

}  // namespace qee
