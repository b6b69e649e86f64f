#include <cmath>

#include <gtest/gtest.h>

#include "qee/criterion.hpp"
#include "qee/error.hpp"
#include "qee/evolution.hpp"
#include "qee/model.hpp"
#include "test_util.hpp"

namespace qee {
namespace {

using testing::random_density;

const double kTimes[] = {0.0, 0.1, 0.5, 1.0, 3.0};

TEST(ConditionalEvolution, ZeroTime) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 1);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const ConditionalEvolution c = conditional_evolution(g.model, env, 0.0);
  EXPECT_EQ(c.w, identity(3));
  EXPECT_LE((c.y - identity(3)).norm(), 1e-14);
}

TEST(ConditionalEvolution, EqualCouplingsGiveIdentity) {
  Rng rng(31);
  const ComplexMatrix v = random_hermitian(4, rng);
  const PureDephasingModel m(0.0, 1.0, random_hermitian(4, rng), v, v);
  for (double t : kTimes) EXPECT_LE((conditional_operator(m, t) - identity(4)).norm(), 1e-12);
}

TEST(ConditionalEvolution, IsingSingleSpinClosedForm) {
  const double g = 0.8;
  const PureDephasingModel m = build_ising_bath(1, {g}, 0.0);
  for (double t : kTimes) {
    const ComplexMatrix w = conditional_operator(m, t);
    EXPECT_LE(std::abs(w(0, 0) - std::polar(1.0, -g * t)), 1e-14);
    EXPECT_LE(std::abs(w(1, 1) - std::polar(1.0, g * t)), 1e-14);
    EXPECT_LE(std::abs(w(0, 1)) + std::abs(w(1, 0)), 1e-14);
  }
}

TEST(ConditionalEvolution, IsingZeroCouplingsGiveIdentity) {
  const PureDephasingModel m = build_ising_bath(3, {0.0, 0.0, 0.0}, 1.3);
  for (double t : kTimes) EXPECT_LE((conditional_operator(m, t) - identity(8)).norm(), 1e-12);
}

TEST(ConditionalEvolution, UnitarityAndUnitRows) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 4;
    const GeneratedModel g = build_random_model(n, ModelClass::generic, seed);
    const EnvironmentState env = analyze_environment(g.rho_env);
    const ConditionalEvolution c = conditional_evolution(g.model, env, 1.7);
    const double dn = static_cast<double>(n);
    EXPECT_LE((c.w.adjoint() * c.w - identity(n)).norm(), 1e-10 * dn);
    for (Eigen::Index k = 0; k < c.y.rows(); ++k) {
      EXPECT_NEAR(c.y.row(k).norm(), 1.0, 1e-10);
      EXPECT_NEAR(c.y.col(k).norm(), 1.0, 1e-10);
    }
  }
}

TEST(JointState, ZeroTimeIsProductInBothFrames) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 2);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q(0.6, Complex(0.0, 0.8));
  const ComplexMatrix product = kron(q.density_matrix(), g.rho_env);
  EXPECT_LE((joint_state(g.model, q, env, 0.0, Frame::rotated).matrix - product).norm(), 1e-15);
  EXPECT_LE((joint_state(g.model, q, env, 0.0, Frame::lab).matrix - product).norm(), 1e-15);
}

TEST(JointState, NoSuperpositionStaysProduct) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 3);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q(1.0, 0.0);
  const ComplexMatrix expected = kron(q.density_matrix(), g.rho_env);
  for (double t : kTimes) {
    EXPECT_LE((joint_state(g.model, q, env, t, Frame::rotated).matrix - expected).norm(), 1e-15);
  }
}

TEST(JointState, DensityMatrixInvariants) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto cls = static_cast<ModelClass>(seed % 3);
    const GeneratedModel g = build_random_model(2 + seed % 4, cls, seed);
    const EnvironmentState env = analyze_environment(g.rho_env);
    const QubitState q = QubitState::normalized(1.0, Complex(0.3, 0.5));
    for (double t : kTimes) {
      for (Frame f : {Frame::rotated, Frame::lab}) {
        const JointState s = joint_state(g.model, q, env, t, f);
        EXPECT_NO_THROW(validate_joint_state(s));
        // Pure dephasing preserves qubit populations in both frames.
        const ComplexMatrix rq = partial_trace(s.matrix, env.dim(), Keep::qubit);
        EXPECT_NEAR(rq(0, 0).real(), std::norm(q.a()), 1e-12);
        EXPECT_NEAR(rq(1, 1).real(), std::norm(q.b()), 1e-12);
      }
    }
  }
}

TEST(JointState, FrameNegativityAgreesOnGenericModel) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 42);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q = QubitState::plus();
  const NegativityResult rot = ppt_negativity(joint_state(g.model, q, env, 1.0, Frame::rotated));
  const NegativityResult lab = ppt_negativity(joint_state(g.model, q, env, 1.0, Frame::lab));
  EXPECT_GT(rot.negativity, 1e-3);
  EXPECT_NEAR(rot.negativity, lab.negativity, 1e-9);
  EXPECT_NEAR(rot.min_eigenvalue, lab.min_eigenvalue, 1e-9);
}

TEST(ValidateJointState, NamesViolatedProperty) {
  JointState s;
  s.env_dim = 2;
  s.matrix = identity(4);
  try {
    validate_joint_state(s);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("trace"), std::string::npos) << e.what();
  }
}

TEST(ReducedEnv, ZeroTime) {
  const GeneratedModel g = build_random_model(4, ModelClass::generic, 4);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q = QubitState::plus();
  for (Frame f : {Frame::rotated, Frame::lab}) {
    EXPECT_LE(trace_distance(reduced_env(g.model, q, env, 0.0, f), g.rho_env), 1e-14);
  }
}

TEST(ReducedEnv, MaximallyMixedIsStatic) {
  const GeneratedModel g = build_random_model(4, ModelClass::generic, 5);
  const EnvironmentState env = analyze_environment(identity(4) / 4.0);
  const QubitState q = QubitState::plus();
  for (double t : kTimes) {
    EXPECT_LE(trace_distance(reduced_env(g.model, q, env, t, Frame::rotated), identity(4) / 4.0),
              1e-12);
  }
}

TEST(ReducedEnv, ClosedFormMatchesPartialTrace) {
  Rng rng(33);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeneratedModel g = build_random_model(2 + seed % 4, ModelClass::generic, seed);
    const EnvironmentState env = analyze_environment(random_density(g.model.env_dim(), rng));
    const QubitState q = QubitState::normalized(rng.complex_normal(), rng.complex_normal());
    for (double t : kTimes) {
      const ComplexMatrix w = conditional_operator(g.model, t);
      const ComplexMatrix closed = reduced_env_closed_form(q, env, w);
      const ComplexMatrix traced = reduced_env(g.model, q, env, t, Frame::rotated);
      EXPECT_LE(trace_distance(closed, traced), 1e-10);
    }
  }
}

TEST(ReducedEnv, ChangeTracksVerdict) {
  const QubitState q = QubitState::plus();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto cls = static_cast<ModelClass>(seed % 3);
    const GeneratedModel g = build_random_model(3, cls, seed);
    const EnvironmentState env = analyze_environment(g.rho_env);
    const double change =
        trace_distance(reduced_env(g.model, q, env, 1.0, Frame::rotated), g.rho_env);
    const EntanglementVerdict v = verdict(g.model, q, env, 1.0);
    EXPECT_EQ(change > 1e-9, !v.separable) << "seed " << seed << " change " << change;
  }
}

TEST(QubitCoherence, ZeroTime) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 6);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q(0.6, Complex(0.0, 0.8));
  EXPECT_LE(std::abs(qubit_coherence(g.model, q, env, 0.0) - q.a() * std::conj(q.b())), 1e-15);
}

TEST(QubitCoherence, IsingCosineDecay) {
  const double g = 1.1;
  const PureDephasingModel m = build_ising_bath(1, {g}, 0.0);
  const EnvironmentState env = analyze_environment(identity(2) / 2.0);
  const QubitState q(0.6, Complex(0.0, 0.8));
  for (double t : kTimes) {
    EXPECT_NEAR(std::abs(qubit_coherence(m, q, env, t)), 0.48 * std::abs(std::cos(g * t)), 1e-14);
  }
}

TEST(QubitCoherence, NoSuperpositionIsZero) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 7);
  const EnvironmentState env = analyze_environment(g.rho_env);
  for (double t : kTimes) {
    EXPECT_EQ(qubit_coherence(g.model, QubitState(0.0, 1.0), env, t), Complex(0.0));
  }
}

TEST(QubitCoherence, MatchesJointStateEntry) {
  const GeneratedModel g = build_random_model(4, ModelClass::generic, 8);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q = QubitState::normalized(Complex(0.2, 0.1), Complex(-0.5, 0.7));
  for (double t : kTimes) {
    const ComplexMatrix rq =
        partial_trace(joint_state(g.model, q, env, t, Frame::rotated).matrix, 4, Keep::qubit);
    EXPECT_LE(std::abs(rq(0, 1) - qubit_coherence(g.model, q, env, t)), 1e-14);
  }
}

}  // namespace
}  // namespace qee
