#include <gtest/gtest.h>

#include "qee/criterion.hpp"
#include "qee/witness.hpp"
#include "test_util.hpp"

namespace qee {
namespace {

// Commutator norms for the seed-42 generic model, recorded once.
constexpr double kGeneric42H0Commutator = 0.71130120390086415;
constexpr double kGeneric42H1Commutator = 0.84981998570696915;

// Generic couplings with V_0 = 0 and rho_E thermal in H_E (= H_0).
struct VanishingV0 {
  PureDephasingModel model;
  EnvironmentState env;
};

VanishingV0 vanishing_v0(std::size_t n, std::uint64_t seed, double beta = 1.0) {
  Rng rng(seed);
  ComplexMatrix h = random_hermitian(n, rng);
  ComplexMatrix v1 = random_hermitian(n, rng);
  EnvironmentState env = analyze_environment(build_thermal(h, beta));
  const auto dim = static_cast<Eigen::Index>(n);
  return {PureDephasingModel(0.3, -0.2, std::move(h), ComplexMatrix::Zero(dim, dim), std::move(v1)),
          std::move(env)};
}

TEST(WitnessPrecondition, VanishingV0ThermalInHE) {
  const VanishingV0 f = vanishing_v0(3, 1);
  const PreconditionCheck c = witness_precondition(f.model, f.env);
  EXPECT_EQ(c.kind, WitnessPrecondition::h0_commutes);
  EXPECT_TRUE(c.holds());
}

TEST(WitnessPrecondition, ThermalInH0OrH1) {
  const GeneratedModel g = build_random_model(4, ModelClass::generic, 2);
  EXPECT_EQ(witness_precondition(g.model, analyze_environment(build_thermal(g.model.h0(), 0.8))).kind,
            WitnessPrecondition::h0_commutes);
  EXPECT_EQ(witness_precondition(g.model, analyze_environment(build_thermal(g.model.h1(), 0.8))).kind,
            WitnessPrecondition::h1_commutes);
  EXPECT_EQ(witness_precondition(g.model, analyze_environment(identity(4) / 4.0)).kind,
            WitnessPrecondition::both);
}

TEST(WitnessPrecondition, GenericNeither) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 42);
  const PreconditionCheck c = witness_precondition(g.model, analyze_environment(g.rho_env));
  EXPECT_EQ(c.kind, WitnessPrecondition::neither);
  EXPECT_FALSE(c.holds());
  EXPECT_NEAR(c.h0_commutator, kGeneric42H0Commutator, 1e-9);
  EXPECT_NEAR(c.h1_commutator, kGeneric42H1Commutator, 1e-9);
}

TEST(EnvChangeWitness, BlockPreservingSeparable) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GeneratedModel g = build_random_model(4, ModelClass::block_preserving, seed);
    const EnvironmentState env = analyze_environment(g.rho_env);
    const WitnessReport r = env_change_witness(g.model, QubitState::plus(), env, 1.0);
    ASSERT_TRUE(r.precondition_holds());
    EXPECT_LE(r.env_change_lab, 1e-10);
    EXPECT_LE(r.env_change_rot, 1e-10);
    ASSERT_TRUE(r.witnessed_entangled.has_value());
    EXPECT_FALSE(*r.witnessed_entangled);
  }
}

TEST(EnvChangeWitness, VanishingV0Entangled) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const VanishingV0 f = vanishing_v0(3, 100 + seed);
    const QubitState q = QubitState::plus();
    const WitnessReport r = env_change_witness(f.model, q, f.env, 1.0);
    ASSERT_TRUE(r.witnessed_entangled.has_value());
    EXPECT_TRUE(*r.witnessed_entangled);
    EXPECT_GT(r.env_change_lab, 1e-6);
    EXPECT_FALSE(verdict(f.model, q, f.env, 1.0).separable);
  }
}

TEST(EnvChangeWitness, ZeroTimeNoChange) {
  const VanishingV0 f = vanishing_v0(3, 3);
  const WitnessReport r = env_change_witness(f.model, QubitState::plus(), f.env, 0.0);
  EXPECT_LE(r.env_change_rot, 1e-15);
  EXPECT_LE(r.env_change_lab, 1e-15);
  EXPECT_FALSE(r.witnessed_entangled.value());
}

TEST(EnvChangeWitness, AbsentWithoutPrecondition) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 42);
  const WitnessReport r =
      env_change_witness(g.model, QubitState::plus(), analyze_environment(g.rho_env), 1.0);
  EXPECT_FALSE(r.witnessed_entangled.has_value());
  EXPECT_GT(r.env_change_rot, 1e-6);
}

TEST(EnvChangeWitness, AbsentWithoutSuperposition) {
  const VanishingV0 f = vanishing_v0(3, 4);
  const WitnessReport r = env_change_witness(f.model, QubitState(1.0, 0.0), f.env, 1.0);
  EXPECT_TRUE(r.precondition_holds());
  EXPECT_FALSE(r.witnessed_entangled.has_value());
}

TEST(EnvChangeWitness, FreeEvolutionWithoutPreconditionIsNotQee) {
  // V_1 = V_0, so w = 1 and nothing is entangled, but rho_E is thermal in an
  // unrelated Hamiltonian and evolves freely in the lab frame.
  Rng rng(5);
  const GeneratedModel g = build_random_model(3, ModelClass::random_unitary, 5);
  const PureDephasingModel m(0.0, 0.0, g.model.h_env(), g.model.v0(), g.model.v0());
  const EnvironmentState env = analyze_environment(build_thermal(random_hermitian(3, rng), 1.0));
  const WitnessReport r = env_change_witness(m, QubitState::plus(), env, 1.0);
  EXPECT_FALSE(r.precondition_holds());
  EXPECT_FALSE(r.witnessed_entangled.has_value());
  EXPECT_GT(r.env_change_lab, 1e-3);
  EXPECT_LE(r.env_change_rot, 1e-12);
  EXPECT_TRUE(verdict(m, QubitState::plus(), env, 1.0).separable);
}

TEST(EnvChangeWitness, LabAgreesWithVerdictOnPreconditionFixtures) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const VanishingV0 f = vanishing_v0(2 + seed % 4, 200 + seed, 0.2 + 0.05 * seed);
    const QubitState q = QubitState::normalized(1.0, Complex(0.4, 0.9));
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
      const WitnessReport r = env_change_witness(f.model, q, f.env, t);
      ASSERT_TRUE(r.witnessed_entangled.has_value());
      EXPECT_EQ(*r.witnessed_entangled, !verdict(f.model, q, f.env, t).separable);
    }
  }
}

TEST(EnvChangeWitness, ConditionalOverloadMatches) {
  const VanishingV0 f = vanishing_v0(4, 6);
  const QubitState q = QubitState::plus();
  const WitnessReport a = env_change_witness(f.model, q, f.env, 0.7);
  const WitnessReport b = env_change_witness(f.model, q, f.env, conditional_evolution(f.model, f.env, 0.7));
  EXPECT_EQ(a.env_change_rot, b.env_change_rot);
  EXPECT_EQ(a.env_change_lab, b.env_change_lab);
  EXPECT_EQ(a.witnessed_entangled, b.witnessed_entangled);
}

}  // namespace
}  // namespace qee
