#include <cmath>

#include <gtest/gtest.h>

#include "qee/criterion.hpp"
#include "qee/error.hpp"
#include "qee/oracle.hpp"
#include "test_util.hpp"

namespace qee {
namespace {

using testing::rel_diff;

// Generic class at beta = 1, t = 1: fraction of entangled verdicts measured
// once over 300 trials (300/300), pinned with a 5-point margin.
constexpr double kGenericBeta1EntangledFraction = 1.0;

TEST(Oracle, PadeMatchesSpectralExponential) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeneratedModel g = build_random_model(2 + seed % 5, ModelClass::generic, seed);
    for (double t : {0.1, 1.0, 3.0}) {
      const ComplexMatrix a = oracle::pade_conditional_operator(g.model, t);
      EXPECT_LE((a - conditional_operator(g.model, t)).norm(), 1e-11);
    }
  }
}

TEST(Oracle, ConjugationPathMatchesBlockFormula) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeneratedModel g = build_random_model(2 + seed % 4, static_cast<ModelClass>(seed % 3), seed);
    const EnvironmentState env = analyze_environment(g.rho_env);
    const QubitState q = oracle::trial_qubit(seed);
    for (double t : {0.0, 0.5, 1.0, 3.0}) {
      const JointState a = oracle::conjugation_path_joint(g.model, q, env, t);
      const JointState b = joint_state(g.model, q, env, t, Frame::rotated);
      EXPECT_LE(trace_distance(a.matrix, b.matrix), 1e-10);
    }
  }
}

TEST(Oracle, ConjugationPathZeroTimeAndSingleBranch) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 1);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const QubitState q = QubitState::plus();
  EXPECT_LE((oracle::conjugation_path_joint(g.model, q, env, 0.0).matrix -
             kron(q.density_matrix(), g.rho_env)).norm(), 1e-15);
  const ComplexMatrix w = conditional_operator(g.model, 1.0);
  const ComplexMatrix s = oracle::conjugation_path_joint(QubitState(0.0, 1.0), env, w).matrix;
  EXPECT_LE(s.block(0, 0, 3, 6).norm(), 1e-15);
  EXPECT_LE((s.block(3, 3, 3, 3) - w * g.rho_env * w.adjoint()).norm(), 1e-14);
}

TEST(Oracle, MinorDirectMatchesClosedFormFullRank) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeneratedModel g = build_random_model(3, ModelClass::generic, seed);
    const EnvironmentState env = analyze_environment(g.rho_env);
    const ConditionalEvolution c = conditional_evolution(g.model, env, 1.0);
    const QubitState q = oracle::trial_qubit(seed);
    for (std::size_t i = 0; i < 3; ++i) {
      const Complex direct = oracle::minor_direct(env, c, q, i);
      const double closed = minor_value(i, env, c, q).value();
      EXPECT_LE(std::abs(direct.imag()), 1e-12 * std::abs(direct.real()));
      EXPECT_LE(rel_diff(direct.real(), closed), 1e-10) << "seed " << seed << " i " << i;
    }
  }
}

TEST(Oracle, MinorDirectVanishesForMaximallyMixed) {
  const GeneratedModel g = build_random_model(4, ModelClass::generic, 2);
  const EnvironmentState env = analyze_environment(identity(4) / 4.0);
  const ConditionalEvolution c = conditional_evolution(g.model, env, 1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_LE(std::abs(oracle::minor_direct(env, c, QubitState::plus(), i)), 1e-12);
  }
}

TEST(Oracle, MinorDirectTwoZeroPattern) {
  // K = 2: keep the support rows, one zero row r and the |b|^2-block row i.
  Rng rng(3);
  RealVector c(4);
  c << 0.7, 0.3, 0.0, 0.0;
  const ComplexMatrix u = random_unitary(4, rng);
  ComplexMatrix rho = u * c.cast<Complex>().asDiagonal() * u.adjoint();
  const EnvironmentState env = analyze_environment(0.5 * (rho + rho.adjoint()));
  ASSERT_EQ(env.zero_count(), 2u);
  const GeneratedModel g = build_random_model(4, ModelClass::generic, 3);
  const ConditionalEvolution cond = conditional_evolution(g.model, env, 1.0);
  const QubitState q = QubitState::plus();
  const auto zeros = env.zero_indices();
  for (std::size_t i = 0; i < env.rank; ++i) {
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      const std::size_t r = zeros[k];
      const Complex direct = oracle::minor_direct(env, cond, q, i, {zeros[1 - k]});
      const double closed = minor_value(i, env, cond, q, r).value();
      EXPECT_LT(closed, 0.0);
      EXPECT_LE(rel_diff(direct.real(), closed), 1e-10);
    }
  }
}

TEST(Oracle, MinorDirectIndexErrors) {
  const GeneratedModel g = build_random_model(3, ModelClass::generic, 4);
  const EnvironmentState env = analyze_environment(g.rho_env);
  const ConditionalEvolution c = conditional_evolution(g.model, env, 1.0);
  EXPECT_THROW(oracle::minor_direct(env, c, QubitState::plus(), 3), DimensionError);
  EXPECT_THROW(oracle::minor_direct(env, c, QubitState::plus(), 0, {7}), DimensionError);
}

TEST(Appendix, StateMatchesExpectedMatrix) {
  const oracle::AppendixFixture f = oracle::appendix_fixture();
  EXPECT_LE((f.state - oracle::appendix_expected_state()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((f.unitary.adjoint() * f.unitary - identity(4)).norm(), 1e-15);
  EXPECT_EQ(f.expected_concurrence, 0.5);
  EXPECT_NEAR(concurrence_two_qubit(f.state), 0.5, 1e-10);
}

TEST(Appendix, Deterministic) {
  EXPECT_EQ(oracle::appendix_fixture().state, oracle::appendix_fixture().state);
}

TEST(Appendix, NoPureDephasingForm) {
  const oracle::DephasingFormCheck check =
      oracle::dephasing_necessary_condition(oracle::appendix_fixture().unitary);
  EXPECT_FALSE(check.admits_dephasing_form);
  const oracle::DephasingGridSearch grid =
      oracle::dephasing_grid_search(oracle::appendix_fixture().unitary);
  EXPECT_GT(grid.min_purity_defect, 1e-3);
}

TEST(Appendix, DephasingUnitaryPassesNecessaryCondition) {
  const GeneratedModel g = build_random_model(2, ModelClass::generic, 5);
  const ComplexMatrix u = unitary_exp(g.model.joint_hamiltonian(), 0.9);
  const oracle::DephasingFormCheck check = oracle::dephasing_necessary_condition(u);
  EXPECT_TRUE(check.admits_dephasing_form);
  EXPECT_NEAR(check.max_singular, 1.0, 1e-9);
  EXPECT_LE(oracle::dephasing_grid_search(u, 5.0).min_purity_defect, 1e-12);
}

TEST(Battery, TrialSeedsAreStableAndDistinct) {
  EXPECT_EQ(oracle::trial_seed(7, 0), oracle::trial_seed(7, 0));
  EXPECT_NE(oracle::trial_seed(7, 0), oracle::trial_seed(7, 1));
  EXPECT_NE(oracle::trial_seed(7, 0), oracle::trial_seed(8, 0));
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_TRUE(oracle::trial_qubit(s).is_superposition(0.1));
}

TEST(Battery, SmallRunConsistent) {
  oracle::BatteryOptions opt;
  opt.count = 60;
  opt.dims = {2, 3, 4, 5, 6};
  const oracle::BatterySummary s = oracle::equivalence_battery(opt);
  EXPECT_TRUE(s.ok());
  EXPECT_EQ(s.verdicts, 240u);
  EXPECT_EQ(s.separable + s.entangled, s.verdicts);
  EXPECT_GT(s.separable, 0u);
  EXPECT_GT(s.entangled, 0u);
}

TEST(Battery, RandomUnitaryOnlyAllSeparable) {
  oracle::BatteryOptions opt;
  opt.count = 50;
  opt.classes = {ModelClass::random_unitary};
  const oracle::BatterySummary s = oracle::equivalence_battery(opt);
  EXPECT_TRUE(s.ok());
  EXPECT_EQ(s.separable, s.verdicts);
}

TEST(Battery, GenericBeta1MostlyEntangled) {
  oracle::BatteryOptions opt;
  opt.count = 300;
  opt.classes = {ModelClass::generic};
  opt.beta_override = 1.0;
  opt.times = {1.0};
  const oracle::BatterySummary s = oracle::equivalence_battery(opt);
  ASSERT_TRUE(s.ok());
  const double fraction = static_cast<double>(s.entangled) / static_cast<double>(s.verdicts);
  EXPECT_GT(fraction, 0.95);
  EXPECT_NEAR(fraction, kGenericBeta1EntangledFraction, 0.05);
}

TEST(Battery, ThreadedMatchesSerial) {
  oracle::BatteryOptions opt;
  opt.count = 40;
  const oracle::BatterySummary serial = oracle::equivalence_battery(opt);
  opt.threads = 4;
  const oracle::BatterySummary threaded = oracle::equivalence_battery(opt);
  ASSERT_EQ(serial.records.size(), threaded.records.size());
  for (std::size_t k = 0; k < serial.records.size(); ++k) {
    EXPECT_EQ(serial.records[k].seed, threaded.records[k].seed);
    EXPECT_EQ(serial.records[k].entangled, threaded.records[k].entangled);
  }
  EXPECT_EQ(serial.max_reconstruction_error, threaded.max_reconstruction_error);
}

TEST(Battery, InjectedFaultIsReportedWithSeed) {
  oracle::BatteryOptions opt;
  opt.count = 9;
  opt.classes = {ModelClass::generic};
  opt.inject_fault_every = 3;
  const oracle::BatterySummary s = oracle::equivalence_battery(opt);
  EXPECT_FALSE(s.ok());
  EXPECT_GT(s.inconsistent, 0u);
  const std::string report = oracle::format_failure(s.failures.front());
  EXPECT_NE(report.find("seed=" + std::to_string(oracle::trial_seed(7, 0))), std::string::npos)
      << report;
}

TEST(Battery, RejectsBadOptions) {
  oracle::BatteryOptions opt;
  opt.count = 0;
  EXPECT_THROW(oracle::equivalence_battery(opt), ContractError);
  opt.count = 1;
  opt.dims = {1};
  EXPECT_THROW(oracle::equivalence_battery(opt), DimensionError);
}

}  // namespace
}  // namespace qee
