#include "qee/evolution.hpp"

#include <cmath>
#include <sstream>

#include "qee/error.hpp"

namespace qee {

namespace {

using Index = Eigen::Index;

void require_same_env(const PureDephasingModel& model, const EnvironmentState& env) {
  if (model.env_dim() != env.dim()) {
    std::ostringstream os;
    os << "environment dimension mismatch: model has " << model.env_dim()
       << ", environment state has " << env.dim();
    throw DimensionError(os.str());
  }
}

}  // namespace

ComplexMatrix conditional_operator(const PureDephasingModel& model, double t) {
  if (!std::isfinite(t)) throw ContractError("conditional_operator: time is not finite");
  // exp(+i H_0 t) = unitary_exp(H_0, -t).
  return unitary_exp(model.h0(), -t) * unitary_exp(model.h1(), t);
}

ConditionalEvolution conditional_evolution(const PureDephasingModel& model,
                                           const EnvironmentState& env, double t) {
  require_same_env(model, env);
  ConditionalEvolution cond;
  cond.w = conditional_operator(model, t);
  cond.time = t;
  cond.y = env.eigenvectors.adjoint() * cond.w.adjoint() * env.eigenvectors;
  return cond;
}

JointState rotated_joint_state(const QubitState& qubit, const EnvironmentState& env,
                               const ConditionalEvolution& cond) {
  const auto n = static_cast<Index>(env.dim());
  if (cond.w.rows() != n) throw DimensionError("rotated_joint_state: dimension mismatch");
  const Complex a = qubit.a();
  const Complex b = qubit.b();
  const ComplexMatrix& rho = env.rho;
  const ComplexMatrix w_rho = cond.w * rho;

  JointState s;
  s.frame = Frame::rotated;
  s.time = cond.time;
  s.env_dim = env.dim();
  s.matrix.resize(2 * n, 2 * n);
  s.matrix.block(0, 0, n, n) = std::norm(a) * rho;
  s.matrix.block(0, n, n, n) = (a * std::conj(b)) * w_rho.adjoint();
  s.matrix.block(n, 0, n, n) = (std::conj(a) * b) * w_rho;
  s.matrix.block(n, n, n, n) = std::norm(b) * (w_rho * cond.w.adjoint());
  return s;
}

JointState joint_state(const PureDephasingModel& model, const QubitState& qubit,
                       const EnvironmentState& env, double t, Frame frame) {
  require_same_env(model, env);
  if (frame == Frame::rotated) {
    return rotated_joint_state(qubit, env, conditional_evolution(model, env, t));
  }
  const ComplexMatrix initial = kron(qubit.density_matrix(), env.rho);
  const ComplexMatrix u = unitary_exp(model.joint_hamiltonian(), t);
  JointState s;
  s.frame = Frame::lab;
  s.time = t;
  s.env_dim = env.dim();
  s.matrix = u * initial * u.adjoint();
  return s;
}

ComplexMatrix reduced_env(const PureDephasingModel& model, const QubitState& qubit,
                          const EnvironmentState& env, double t, Frame frame) {
  return partial_trace(joint_state(model, qubit, env, t, frame).matrix, env.dim(),
                       Keep::environment);
}

ComplexMatrix reduced_env_closed_form(const QubitState& qubit, const EnvironmentState& env,
                                      const ComplexMatrix& w) {
  return std::norm(qubit.a()) * env.rho + std::norm(qubit.b()) * (w * env.rho * w.adjoint());
}

Complex qubit_coherence(const QubitState& qubit, const EnvironmentState& env,
                        const ComplexMatrix& w) {
  return qubit.a() * std::conj(qubit.b()) * (env.rho * w.adjoint()).trace();
}

Complex qubit_coherence(const PureDephasingModel& model, const QubitState& qubit,
                        const EnvironmentState& env, double t) {
  require_same_env(model, env);
  return qubit_coherence(qubit, env, conditional_operator(model, t));
}

void validate_joint_state(const JointState& s) {
  require_square(s.matrix, "JointState");
  if (static_cast<std::size_t>(s.matrix.rows()) != 2 * s.env_dim) {
    throw DimensionError("JointState: matrix dimension is not 2 * env_dim");
  }
  require_density_matrix(s.matrix, "JointState", 1e-10, 1e-10, 1e-9);
}

}  // namespace qee
