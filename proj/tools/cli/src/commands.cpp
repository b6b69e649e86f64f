#include "qee/cli/commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qee/cli/config.hpp"
#include "qee/cli/csv.hpp"
#include "qee/criterion.hpp"
#include "qee/error.hpp"
#include "qee/oracle.hpp"
#include "qee/witness.hpp"

namespace qee::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(x)) {
    throw UsageError("invalid number '" + raw + "'");
  }
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

// Runs fn(k) for k in [0, n) on up to `threads` workers. Results land in input
// order; if several items throw, the lowest index is rethrown so failures do
// not depend on scheduling.
template <typename R>
std::vector<R> parallel_map(std::size_t n, std::size_t threads, const std::function<R(std::size_t)>& fn) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t k) {
    try {
      slots[k] = fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    out.push_back(std::move(*slots[k]));
  }
  return out;
}

// Maps the library's exception types onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InconsistencyError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const ContractError& e) {
    err << "numerical contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const DimensionError& e) {
    err << "numerical contract violation: " << e.what() << "\n";
    return kExitContract;
  }
}

void emit(const std::string& output, const std::string& text, std::ostream& out) {
  if (output.empty() || output == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(output, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + output + "'");
  f << text;
  if (!f) throw UsageError("write to '" + output + "' failed");
}

EnvironmentTolerances env_tolerances(const GlobalOptions& g) {
  return {g.grouping_tol, g.zero_tol};
}

CriterionTolerances criterion_tolerances(const GlobalOptions& g) {
  CriterionTolerances t;
  t.decision = g.tol;
  return t;
}

void check_tolerances(const GlobalOptions& g) {
  for (double x : {g.tol, g.grouping_tol, g.zero_tol}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw UsageError("tolerances must be positive");
  }
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.empty()) throw UsageError("empty grid");
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw UsageError("range grid must be start:stop:count");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count = parse_number(parts[2]);
    if (count < 1 || count != std::floor(count) || count > 1e6) {
      throw UsageError("grid count must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(count);
    // Weighted form keeps the end points exact and avoids drift like 0.30000000000000004.
    for (std::size_t k = 0; k < n; ++k) {
      if (n == 1) {
        grid.push_back(lo);
        continue;
      }
      const auto m = static_cast<double>(n - 1);
      const auto kk = static_cast<double>(k);
      grid.push_back((lo * (m - kk) + hi * kk) / m);
    }
    return grid;
  }
  for (const auto& p : split(s, ',')) grid.push_back(parse_number(p));
  return grid;
}

std::vector<std::size_t> parse_dims(const std::string& spec) {
  std::vector<std::size_t> dims;
  for (const auto& p : split(trim(spec), ',')) {
    const double x = parse_number(p);
    if (x < 2 || x != std::floor(x) || x > static_cast<double>(kDefaultMaxDim / 2)) {
      throw UsageError("dimensions must be integers >= 2, got '" + p + "'");
    }
    dims.push_back(static_cast<std::size_t>(x));
  }
  if (dims.empty()) throw UsageError("empty dimension list");
  return dims;
}

int cmd_analyze(const GlobalOptions& g, const std::string& config_path,
                const std::vector<double>& t_grid, const std::string& output, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    check_tolerances(g);
    if (t_grid.empty()) throw UsageError("empty time grid");
    const ModelConfig cfg = load_config(config_path);
    const EnvironmentState env = analyze_environment(initial_env_matrix(cfg), env_tolerances(g));
    const CriterionTolerances tol = criterion_tolerances(g);

    const auto rows = parallel_map<CsvRow>(t_grid.size(), resolve_threads(g.threads), [&](std::size_t k) {
      const double t = t_grid[k];
      const ConditionalEvolution cond = conditional_evolution(cfg.model, env, t);
      const EntanglementVerdict v = verdict(cfg.qubit, env, cond, tol);
      const WitnessReport w = env_change_witness(cfg.model, cfg.qubit, env, cond, g.tol);
      const Complex coh = qubit_coherence(cfg.qubit, env, cond.w);
      CsvRow row;
      row.add(t).add(v.commutator_norm / cond.w.norm()).add(v.negativity).add(v.min_pt_eigenvalue);
      if (v.negative_minor) {
        row.add(v.negative_minor->index).add(v.negative_minor->scaled);
      } else {
        row.add_na().add_na();
      }
      row.add(!v.separable).add(w.env_change_rot).add(w.env_change_lab).add(w.precondition_holds());
      row.add(w.witnessed_entangled).add(coh.real()).add(coh.imag());
      return row;
    });

    std::ostringstream csv;
    write_csv_line(csv, kAnalyzeHeader);
    for (const auto& r : rows) write_csv_line(csv, r.cells());
    emit(output, csv.str(), out);
    return kExitOk;
  });
}

int cmd_sweep_beta(const GlobalOptions& g, const std::string& config_path,
                   const std::vector<double>& beta_grid, double t, const std::string& output,
                   std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_tolerances(g);
    if (beta_grid.empty()) throw UsageError("empty beta grid");
    if (!std::isfinite(t)) throw UsageError("time must be finite");
    for (double b : beta_grid) {
      if (b < 0.0) throw UsageError("beta values must be >= 0");
    }
    const ModelConfig cfg = load_config(config_path);
    if (cfg.initial_env.kind != InitialEnvKind::thermal) {
      throw ConfigError(config_path +
                        ": initial_env must be of type thermal to define the sweep Hamiltonian");
    }
    const CriterionTolerances tol = criterion_tolerances(g);
    const auto rows = parallel_map<CsvRow>(beta_grid.size(), resolve_threads(g.threads), [&](std::size_t k) {
      const double beta = beta_grid[k];
      const EnvironmentState env =
          analyze_environment(initial_env_matrix(cfg, beta), env_tolerances(g));
      const ConditionalEvolution cond = conditional_evolution(cfg.model, env, t);
      const EntanglementVerdict v = verdict(cfg.qubit, env, cond, tol);
      const WitnessReport w = env_change_witness(cfg.model, cfg.qubit, env, cond, g.tol);
      CsvRow row;
      row.add(beta).add(v.negativity).add(v.commutator_norm / cond.w.norm());
      row.add(w.env_change_rot).add(w.env_change_lab).add(!v.separable);
      return row;
    });
    std::ostringstream csv;
    write_csv_line(csv, kSweepHeader);
    for (const auto& r : rows) write_csv_line(csv, r.cells());
    emit(output, csv.str(), out);
    return kExitOk;
  });
}

int cmd_battery(const GlobalOptions& g, const BatteryArgs& args, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    check_tolerances(g);
    if (args.count == 0) throw UsageError("--count must be >= 1");
    oracle::BatteryOptions opt;
    opt.count = args.count;
    opt.seed = g.seed;
    opt.dims = args.dims;
    opt.classes = args.classes;
    opt.tol.decision = g.tol;
    opt.threads = resolve_threads(g.threads);
    opt.inject_fault_every = args.inject_fault_every;
    const oracle::BatterySummary s = oracle::equivalence_battery(opt);

    out << "trials=" << s.trials << " verdicts=" << s.verdicts << " separable=" << s.separable
        << " entangled=" << s.entangled << " inconsistent=" << s.inconsistent
        << " decomposition_failures=" << s.decomposition_failures
        << " witness_failures=" << s.witness_failures
        << " witness_lab_checks=" << s.witness_lab_checks
        << " max_reconstruction_error=" << format_double(s.max_reconstruction_error) << "\n";
    if (s.ok()) return kExitOk;

    constexpr std::size_t kShown = 20;
    for (std::size_t k = 0; k < s.failures.size() && k < kShown; ++k) {
      err << oracle::format_failure(s.failures[k]) << "\n";
    }
    if (s.failures.size() > kShown) {
      err << "... " << s.failures.size() - kShown << " more failures\n";
    }
    err << "FAIL: " << s.failures.size() << " failures (battery seed " << g.seed << ")\n";
    return kExitInconsistent;
  });
}

namespace {

int demo_appendix(const DemoArgs& args, std::ostream& out) {
  const oracle::AppendixFixture f = oracle::appendix_fixture();
  JointState s;
  s.env_dim = 2;
  s.matrix = f.state;
  const NegativityResult neg = ppt_negativity(s);
  out << "appendix: U_C applied to |0><0| (x) 1/2\n";
  for (Eigen::Index r = 0; r < 4; ++r) {
    out << "  ";
    for (Eigen::Index c = 0; c < 4; ++c) out << (c ? " " : "") << format_short(f.state(r, c).real());
    out << "\n";
  }
  out << "concurrence " << format_short(concurrence_two_qubit(f.state)) << "\n";
  out << "negativity " << format_short(neg.negativity) << "\n";
  out << "min_pt_eigenvalue " << format_short(neg.min_eigenvalue) << "\n";
  const oracle::DephasingFormCheck check = oracle::dephasing_necessary_condition(f.unitary);
  out << "pure_dephasing_form " << yes_no(check.admits_dephasing_form)
      << " (unital_defect " << format_short(check.unital_defect) << ", max_singular "
      << format_short(check.max_singular) << ")\n";
  if (args.grid_search) {
    const oracle::DephasingGridSearch grid = oracle::dephasing_grid_search(f.unitary, 1.0);
    out << "grid_search min_purity_defect " << format_short(grid.min_purity_defect)
        << " at theta=" << format_short(grid.best_theta_deg)
        << " phi=" << format_short(grid.best_phi_deg) << "\n";
  }
  return kExitOk;
}

std::vector<double> demo_times() { return parse_grid("0.25:5:20"); }

int demo_mixed(const GlobalOptions& g, const DemoArgs& args, std::ostream& out) {
  const GeneratedModel gm = build_random_model(args.env_dim, ModelClass::generic, g.seed);
  const std::size_t n = args.env_dim;
  const EnvironmentState env =
      analyze_environment(identity(n) / static_cast<double>(n), env_tolerances(g));
  const QubitState q = QubitState::plus();
  out << "mixed: generic model (seed " << g.seed << ", N=" << n << "), rho_E = 1/N\n";
  out << "t,separable,terms,negativity,coherence_abs\n";
  bool all = true;
  for (double t : demo_times()) {
    const ConditionalEvolution cond = conditional_evolution(gm.model, env, t);
    const EntanglementVerdict v = verdict(q, env, cond, criterion_tolerances(g));
    all = all && v.separable;
    out << format_short(t) << "," << yes_no(v.separable) << ","
        << (v.decomposition ? v.decomposition->terms.size() : 0) << ","
        << format_short(v.negativity) << ","
        << format_short(std::abs(qubit_coherence(q, env, cond.w))) << "\n";
  }
  out << "separable_at_all_t " << yes_no(all) << "\n";
  return kExitOk;
}

int demo_ru(const GlobalOptions& g, const DemoArgs& args, std::ostream& out) {
  const GeneratedModel gm = build_random_model(args.env_dim, ModelClass::random_unitary, g.seed);
  const EnvironmentState env = analyze_environment(gm.rho_env, env_tolerances(g));
  const QubitState q = QubitState::plus();
  out << "ru: random unitary model (seed " << g.seed << ", N=" << args.env_dim << ")\n";
  out << "t,separable,negativity,coherence_abs\n";
  bool all = true;
  const double initial = std::abs(q.a() * std::conj(q.b()));
  double smallest = initial;
  for (double t : demo_times()) {
    const ConditionalEvolution cond = conditional_evolution(gm.model, env, t);
    const EntanglementVerdict v = verdict(q, env, cond, criterion_tolerances(g));
    const double coh = std::abs(qubit_coherence(q, env, cond.w));
    all = all && v.separable;
    smallest = std::min(smallest, coh);
    out << format_short(t) << "," << yes_no(v.separable) << "," << format_short(v.negativity)
        << "," << format_short(coh) << "\n";
  }
  out << "separable_at_all_t " << yes_no(all) << "\n";
  out << "coherence_decay " << yes_no(initial - smallest > 1e-6) << " (from "
      << format_short(initial) << " down to " << format_short(smallest) << ")\n";
  return kExitOk;
}

int demo_blocks(const GlobalOptions& g, const DemoArgs& args, std::ostream& out) {
  const GeneratedModel gm = build_random_model(args.env_dim, ModelClass::block_preserving, g.seed);
  const EnvironmentState env = analyze_environment(gm.rho_env, env_tolerances(g));
  const QubitState q = QubitState::plus();
  out << "blocks: block-preserving model (seed " << g.seed << ", N=" << args.env_dim << ", "
      << gm.blocks.size() << " subspaces)\n";
  out << "t,separable,w_minus_identity,env_change_rot\n";
  bool all = true;
  bool nontrivial = false;
  for (double t : demo_times()) {
    const ConditionalEvolution cond = conditional_evolution(gm.model, env, t);
    const EntanglementVerdict v = verdict(q, env, cond, criterion_tolerances(g));
    const double moved = (cond.w - identity(args.env_dim)).norm();
    const double change = trace_distance(reduced_env_closed_form(q, env, cond.w), env.rho);
    all = all && v.separable;
    nontrivial = nontrivial || (moved > 1e-6 && change <= g.tol);
    out << format_short(t) << "," << yes_no(v.separable) << "," << format_short(moved) << ","
        << format_short(change) << "\n";
  }
  out << "separable_at_all_t " << yes_no(all) << "\n";
  out << "nontrivial_dynamics_within_subspaces " << yes_no(nontrivial) << "\n";
  return kExitOk;
}

}  // namespace

int cmd_demo(const GlobalOptions& g, const DemoArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_tolerances(g);
    if (args.env_dim < 2) throw UsageError("--env-dim must be >= 2");
    if (args.name == "appendix") return demo_appendix(args, out);
    if (args.name == "mixed") return demo_mixed(g, args, out);
    if (args.name == "ru") return demo_ru(g, args, out);
    if (args.name == "blocks") return demo_blocks(g, args, out);
    throw UsageError("unknown demo '" + args.name + "' (expected appendix, mixed, ru, blocks)");
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Qubit-environment entanglement under pure dephasing"};
  app.name("qee");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--tol", g.tol, "Decision tolerance")->capture_default_str();
  app.add_option("--grouping-tol", g.grouping_tol, "Eigenvalue degeneracy gap")->capture_default_str();
  app.add_option("--zero-tol", g.zero_tol, "Zero-eigenvalue threshold")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for generated models and the battery")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();

  std::string config, output = "-", t_grid, beta_grid;
  double sweep_t = 1.0;

  auto* analyze = app.add_subcommand("analyze", "Verdict and witness over a time grid, as CSV");
  analyze->add_option("--config", config, "Model configuration (JSON)")->required();
  analyze->add_option("--t-grid", t_grid, "Times: a,b,c or start:stop:count")->required();
  analyze->add_option("--output,-o", output, "CSV path, - for stdout")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep-beta", "Negativity versus inverse temperature, as CSV");
  sweep->add_option("--config", config, "Model configuration with a thermal initial_env")->required();
  sweep->add_option("--beta-grid", beta_grid, "Betas: a,b,c or start:stop:count")->required();
  sweep->add_option("--t", sweep_t, "Evaluation time")->capture_default_str();
  sweep->add_option("--output,-o", output, "CSV path, - for stdout")->capture_default_str();

  BatteryArgs battery_args;
  std::string dims = "2,3,4", classes;
  auto* battery = app.add_subcommand("battery", "Randomized three-way equivalence check");
  battery->add_option("--count", battery_args.count, "Number of seeded models")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  battery->add_option("--dims", dims, "Environment dimensions")->capture_default_str();
  battery->add_option("--classes", classes, "Subset of generic,ru,blocks");
  battery->add_option("--inject-fault", battery_args.inject_fault_every)->group("");

  DemoArgs demo_args;
  auto* demo = app.add_subcommand("demo", "Canned scenarios");
  demo->add_option("name", demo_args.name, "appendix | mixed | ru | blocks")
      ->required()
      ->check(CLI::IsMember({"appendix", "mixed", "ru", "blocks"}));
  demo->add_option("--env-dim", demo_args.env_dim, "Environment dimension")->capture_default_str();
  demo->add_flag("--grid-search", demo_args.grid_search,
                 "appendix: also search qubit directions on a 1 degree grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(g, config, parse_grid(t_grid), output, out, err);
    if (*sweep) return cmd_sweep_beta(g, config, parse_grid(beta_grid), sweep_t, output, out, err);
    if (*battery) {
      battery_args.dims = parse_dims(dims);
      if (!classes.empty()) {
        battery_args.classes.clear();
        for (const auto& c : split(classes, ',')) {
          const auto parsed = parse_model_class(trim(c));
          if (!parsed) throw UsageError("unknown model class '" + c + "'");
          battery_args.classes.push_back(*parsed);
        }
      }
      return cmd_battery(g, battery_args, out, err);
    }
    if (*demo) return cmd_demo(g, demo_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace qee::cli
