#include "qee/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "qee/error.hpp"
#include "qee/rng.hpp"
#include "qee/witness.hpp"

namespace qee::oracle {

namespace {

using Index = Eigen::Index;

constexpr Complex kI(0.0, 1.0);

ComplexMatrix qubit_transpose_by_entries(const ComplexMatrix& s, Index n) {
  ComplexMatrix out(s.rows(), s.cols());
  for (Index p = 0; p < 2; ++p) {
    for (Index q = 0; q < 2; ++q) {
      for (Index e = 0; e < n; ++e) {
        for (Index f = 0; f < n; ++f) out(q * n + e, p * n + f) = s(p * n + e, q * n + f);
      }
    }
  }
  return out;
}

// Phi(x) = Tr_E[U (x (x) 1/N) U^dagger] for a 2x2 operator x.
ComplexMatrix reduced_channel(const ComplexMatrix& u, const ComplexMatrix& x) {
  const Index n = u.rows() / 2;
  const ComplexMatrix in = kron(x, ComplexMatrix::Identity(n, n) / static_cast<double>(n));
  const ComplexMatrix out = u * in * u.adjoint();
  ComplexMatrix r(2, 2);
  for (Index p = 0; p < 2; ++p) {
    for (Index q = 0; q < 2; ++q) r(p, q) = out.block(p * n, q * n, n, n).trace();
  }
  return r;
}

void require_joint_unitary(const ComplexMatrix& u, const char* what) {
  require_square(u, what);
  if (u.rows() % 2 != 0) throw DimensionError(std::string(what) + ": dimension must be even");
}

}  // namespace

// ---------------------------------------------------------------------------

ComplexMatrix pade_conditional_operator(const PureDephasingModel& model, double t) {
  const ComplexMatrix forward = (kI * t * model.h0()).exp();
  const ComplexMatrix backward = (-kI * t * model.h1()).exp();
  return forward * backward;
}

JointState conjugation_path_joint(const QubitState& qubit, const EnvironmentState& env,
                                  const ComplexMatrix& w, double t) {
  const auto n = static_cast<Index>(env.dim());
  if (w.rows() != n || w.cols() != n) {
    throw DimensionError("conjugation_path_joint: w does not match the environment");
  }
  ComplexMatrix u = ComplexMatrix::Zero(2 * n, 2 * n);
  u.block(0, 0, n, n) = ComplexMatrix::Identity(n, n);
  u.block(n, n, n, n) = w;
  const ComplexMatrix initial = kron(qubit.density_matrix(), env.rho);
  JointState s;
  s.matrix = u * initial * u.adjoint();
  s.frame = Frame::rotated;
  s.time = t;
  s.env_dim = env.dim();
  return s;
}

JointState conjugation_path_joint(const PureDephasingModel& model, const QubitState& qubit,
                                  const EnvironmentState& env, double t) {
  if (model.env_dim() != env.dim()) {
    throw DimensionError("conjugation_path_joint: model/environment dimension mismatch");
  }
  return conjugation_path_joint(qubit, env, pade_conditional_operator(model, t), t);
}

Complex minor_direct(const EnvironmentState& env, const ConditionalEvolution& cond,
                     const QubitState& qubit, std::size_t i,
                     const std::vector<std::size_t>& crossed_out) {
  const std::size_t n = env.dim();
  if (i >= n) throw DimensionError("minor_direct: index out of range");
  for (auto c : crossed_out) {
    if (c >= n) throw DimensionError("minor_direct: crossed-out index out of range");
  }
  const auto nn = static_cast<Index>(n);
  const JointState joint = conjugation_path_joint(qubit, env, cond.w, cond.time);
  const ComplexMatrix pt = qubit_transpose_by_entries(joint.matrix, nn);

  ComplexMatrix basis = ComplexMatrix::Zero(2 * nn, 2 * nn);
  basis.block(0, 0, nn, nn) = env.eigenvectors;
  basis.block(nn, nn, nn, nn) = env.eigenvectors;
  const ComplexMatrix pt_eig = basis.adjoint() * pt * basis;

  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::find(crossed_out.begin(), crossed_out.end(), k) == crossed_out.end()) {
      keep.push_back(k);
    }
  }
  keep.push_back(n + i);
  return determinant(principal_submatrix(pt_eig, keep));
}

// ---------------------------------------------------------------------------

AppendixFixture appendix_fixture() {
  const double h = (1.0 / std::numbers::sqrt2);
  // Columns are the images of |00>, |01>, |10>, |11> (psi = |0>, psi_perp = |1>).
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(1, 0) = 1.0;
  u(0, 1) = h;
  u(3, 1) = h;
  u(0, 2) = h;
  u(3, 2) = -h;
  u(2, 3) = 1.0;

  ComplexMatrix psi(2, 2);
  psi << 1.0, 0.0,
         0.0, 0.0;
  const ComplexMatrix initial = kron(psi, identity(2) / 2.0);
  AppendixFixture f;
  f.unitary = u;
  f.state = u * initial * u.adjoint();
  f.expected_concurrence = 0.5;
  return f;
}

ComplexMatrix appendix_expected_state() {
  ComplexMatrix s(4, 4);
  s << 0.25, 0.0, 0.0, 0.25,
       0.0,  0.5, 0.0, 0.0,
       0.0,  0.0, 0.0, 0.0,
       0.25, 0.0, 0.0, 0.25;
  return s;
}

DephasingFormCheck dephasing_necessary_condition(const ComplexMatrix& unitary, double tol) {
  require_joint_unitary(unitary, "dephasing_necessary_condition");
  const ComplexMatrix paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
  const ComplexMatrix center = reduced_channel(unitary, identity(2) / 2.0);
  Eigen::Vector3d c;
  Eigen::Matrix3d t;
  for (int j = 0; j < 3; ++j) {
    c(j) = (paulis[j] * center).trace().real();
    for (int k = 0; k < 3; ++k) {
      t(j, k) = 0.5 * (paulis[j] * reduced_channel(unitary, paulis[k])).trace().real();
    }
  }
  DephasingFormCheck check;
  check.unital_defect = c.norm();
  check.max_singular = Eigen::JacobiSVD<Eigen::Matrix3d>(t).singularValues()(0);
  check.admits_dephasing_form =
      check.unital_defect <= tol && std::abs(check.max_singular - 1.0) <= tol;
  return check;
}

DephasingGridSearch dephasing_grid_search(const ComplexMatrix& unitary, double resolution_deg) {
  require_joint_unitary(unitary, "dephasing_grid_search");
  if (!(resolution_deg > 0.0)) throw ContractError("dephasing_grid_search: bad resolution");
  DephasingGridSearch best;
  best.min_purity_defect = 2.0;
  const double deg = std::numbers::pi / 180.0;
  const auto n_theta = static_cast<int>(std::floor(180.0 / resolution_deg + 1e-9));
  const auto n_phi = static_cast<int>(std::ceil(360.0 / resolution_deg - 1e-9));
  for (int it = 0; it <= n_theta; ++it) {
    const double theta = it * resolution_deg;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = ip * resolution_deg;
      ComplexVector v(2);
      v << std::cos(0.5 * theta * deg), std::polar(std::sin(0.5 * theta * deg), phi * deg);
      const ComplexMatrix out = reduced_channel(unitary, v * v.adjoint());
      const double defect = 1.0 - (out * out).trace().real();
      if (defect < best.min_purity_defect) {
        best = {defect, theta, phi};
      }
      if (it == 0 || it == n_theta) break;  // poles: phi is irrelevant
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::inconsistent_verdict: return "inconsistent_verdict";
    case FailureKind::decomposition: return "decomposition";
    case FailureKind::witness: return "witness";
  }
  return "unknown";
}

std::uint64_t trial_seed(std::uint64_t battery_seed, std::size_t trial) {
  std::uint64_t z = battery_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

QubitState trial_qubit(std::uint64_t seed) {
  Rng rng(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  const double theta = rng.uniform(0.2, 0.5 * std::numbers::pi - 0.2);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return QubitState(std::cos(theta), std::polar(std::sin(theta), phi));
}

QubitState alternate_qubit() { return QubitState::normalized(Complex(0.6, 0.0), Complex(0.0, 0.8)); }

namespace {

struct TrialOutcome {
  TrialRecord record;
  std::size_t separable = 0;
  std::size_t entangled = 0;
  std::size_t inconsistent = 0;
  std::size_t decomposition_failures = 0;
  std::size_t witness_failures = 0;
  std::size_t witness_lab_checks = 0;
  double max_reconstruction_error = 0.0;
  std::vector<BatteryFailure> failures;
};

TrialOutcome run_trial(const BatteryOptions& opt, std::size_t k) {
  TrialOutcome out;
  TrialRecord& rec = out.record;
  rec.trial = k;
  rec.cls = opt.classes[k % opt.classes.size()];
  rec.env_dim = opt.dims[(k / opt.classes.size()) % opt.dims.size()];
  rec.seed = trial_seed(opt.seed, k);
  const bool inject = opt.inject_fault_every > 0 && k % opt.inject_fault_every == 0;

  auto fail = [&](double t, FailureKind kind, std::string msg) {
    out.failures.push_back({k, rec.seed, rec.cls, rec.env_dim, t, kind, std::move(msg)});
  };

  try {
    const GeneratedModel gm =
        build_random_model(rec.env_dim, rec.cls, rec.seed, opt.beta_override);
    const EnvironmentState env = analyze_environment(gm.rho_env);
    const QubitState qubit = trial_qubit(rec.seed);
    const QubitState alt = alternate_qubit();
    const double tol = opt.tol.decision;
    CriterionTolerances vtol = opt.tol;
    vtol.reconstruction = std::numeric_limits<double>::infinity();

    for (double t : opt.times) {
      ConditionalEvolution cond = conditional_evolution(gm.model, env, t);
      if (inject) cond.y = identity(env.dim());
      EntanglementVerdict v;
      try {
        v = verdict(qubit, env, cond, vtol);
      } catch (const InconsistencyError& e) {
        ++out.inconsistent;
        rec.entangled.push_back(0);
        fail(t, FailureKind::inconsistent_verdict, e.what());
        continue;
      }
      rec.entangled.push_back(v.separable ? 0 : 1);
      if (v.separable) {
        ++out.separable;
        out.max_reconstruction_error =
            std::max(out.max_reconstruction_error, v.reconstruction_error);
        if (v.reconstruction_error > opt.tol.reconstruction ||
            !decomposition_factors_valid(*v.decomposition)) {
          ++out.decomposition_failures;
          std::ostringstream os;
          os << "reconstruction error " << v.reconstruction_error << " or invalid factors";
          fail(t, FailureKind::decomposition, os.str());
        }
      } else {
        ++out.entangled;
      }

      if (opt.check_witness) {
        const bool entangled = !v.separable;
        for (const QubitState* q : {&qubit, &alt}) {
          const double change = trace_distance(reduced_env_closed_form(*q, env, cond.w), env.rho);
          if ((change > tol) != entangled) {
            ++out.witness_failures;
            std::ostringstream os;
            os << "rotated-frame env change " << change << " disagrees with verdict ("
               << (entangled ? "entangled" : "separable") << ") for a=" << q->a()
               << " b=" << q->b();
            fail(t, FailureKind::witness, os.str());
          }
        }
        const WitnessReport rep = env_change_witness(gm.model, qubit, env, cond, tol);
        if (rep.witnessed_entangled) {
          ++out.witness_lab_checks;
          if (*rep.witnessed_entangled != entangled) {
            ++out.witness_failures;
            std::ostringstream os;
            os << "lab-frame env change " << rep.env_change_lab << " ("
               << to_string(rep.precondition.kind) << ") disagrees with verdict";
            fail(t, FailureKind::witness, os.str());
          }
        }
      }
    }
  } catch (const std::exception& e) {
    ++out.inconsistent;
    fail(std::nan(""), FailureKind::inconsistent_verdict, std::string("exception: ") + e.what());
  }
  return out;
}

}  // namespace

BatterySummary equivalence_battery(const BatteryOptions& opt) {
  if (opt.count == 0) throw ContractError("equivalence_battery: count must be >= 1");
  if (opt.dims.empty() || opt.classes.empty() || opt.times.empty()) {
    throw ContractError("equivalence_battery: dims, classes and times must be non-empty");
  }
  for (auto n : opt.dims) {
    if (n < 2) throw DimensionError("equivalence_battery: every dimension must be >= 2");
  }

  std::vector<TrialOutcome> outcomes(opt.count);
  const std::size_t workers = std::clamp<std::size_t>(opt.threads, 1, opt.count);
  if (workers == 1) {
    for (std::size_t k = 0; k < opt.count; ++k) outcomes[k] = run_trial(opt, k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < opt.count; k = next++) outcomes[k] = run_trial(opt, k);
      });
    }
    for (auto& th : pool) th.join();
  }

  BatterySummary s;
  s.trials = opt.count;
  for (auto& o : outcomes) {
    s.verdicts += o.record.entangled.size();
    s.separable += o.separable;
    s.entangled += o.entangled;
    s.inconsistent += o.inconsistent;
    s.decomposition_failures += o.decomposition_failures;
    s.witness_failures += o.witness_failures;
    s.witness_lab_checks += o.witness_lab_checks;
    s.max_reconstruction_error = std::max(s.max_reconstruction_error, o.max_reconstruction_error);
    for (auto& f : o.failures) s.failures.push_back(std::move(f));
    s.records.push_back(std::move(o.record));
  }
  return s;
}

std::string format_failure(const BatteryFailure& f) {
  std::ostringstream os;
  os.precision(17);
  os << "failure kind=" << to_string(f.kind) << " trial=" << f.trial << " seed=" << f.seed
     << " class=" << to_string(f.cls) << " env_dim=" << f.env_dim << " t=" << f.time << "\n"
     << "  " << f.message;
  return os.str();
}

}  // namespace qee::oracle
