#include "qee/witness.hpp"

#include "qee/linalg.hpp"

namespace qee {

namespace {

bool commutes(const ComplexMatrix& h, const ComplexMatrix& rho, double norm, double tol) {
  return norm <= tol * h.norm() * rho.norm();
}

}  // namespace

std::string_view to_string(WitnessPrecondition p) {
  switch (p) {
    case WitnessPrecondition::h0_commutes: return "h0_commutes";
    case WitnessPrecondition::h1_commutes: return "h1_commutes";
    case WitnessPrecondition::both: return "both";
    case WitnessPrecondition::neither: return "neither";
  }
  return "unknown";
}

PreconditionCheck witness_precondition(const PureDephasingModel& model,
                                       const EnvironmentState& env, double tol) {
  const ComplexMatrix h0 = model.h0();
  const ComplexMatrix h1 = model.h1();
  PreconditionCheck check;
  check.h0_commutator = commutator(h0, env.rho).norm();
  check.h1_commutator = commutator(h1, env.rho).norm();
  const bool c0 = commutes(h0, env.rho, check.h0_commutator, tol);
  const bool c1 = commutes(h1, env.rho, check.h1_commutator, tol);
  if (c0 && c1) {
    check.kind = WitnessPrecondition::both;
  } else if (c0) {
    check.kind = WitnessPrecondition::h0_commutes;
  } else if (c1) {
    check.kind = WitnessPrecondition::h1_commutes;
  }
  return check;
}

WitnessReport env_change_witness(const PureDephasingModel& model, const QubitState& qubit,
                                 const EnvironmentState& env, const ConditionalEvolution& cond,
                                 double tol) {
  WitnessReport report;
  report.precondition = witness_precondition(model, env, tol);
  report.env_change_rot = trace_distance(reduced_env_closed_form(qubit, env, cond.w), env.rho);
  report.env_change_lab =
      trace_distance(reduced_env(model, qubit, env, cond.time, Frame::lab), env.rho);
  if (report.precondition_holds() && qubit.is_superposition(tol)) {
    report.witnessed_entangled = report.env_change_lab > tol;
  }
  return report;
}

WitnessReport env_change_witness(const PureDephasingModel& model, const QubitState& qubit,
                                 const EnvironmentState& env, double t, double tol) {
  return env_change_witness(model, qubit, env, conditional_evolution(model, env, t), tol);
}

}  // namespace qee
