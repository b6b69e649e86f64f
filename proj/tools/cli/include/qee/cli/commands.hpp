#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qee/model.hpp"

namespace qee::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInconsistent = 1,
  kExitUsage = 2,
  kExitContract = 3,
};

struct GlobalOptions {
  double tol = 1e-9;
  double grouping_tol = 1e-8;
  double zero_tol = 1e-12;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
};

// "a,b,c" or "start:stop:count" (count points, both ends included).
std::vector<double> parse_grid(const std::string& spec);
std::vector<std::size_t> parse_dims(const std::string& spec);

inline const std::vector<std::string> kAnalyzeHeader = {
    "t",          "comm_norm",      "negativity",     "min_pt_eig",    "minor_index",
    "minor_scaled", "entangled",    "env_change_rot", "env_change_lab", "witness_valid",
    "witnessed",  "coherence_re",   "coherence_im"};

inline const std::vector<std::string> kSweepHeader = {
    "beta", "negativity", "comm_norm", "env_change_rot", "env_change_lab", "entangled"};

// Each command returns an ExitCode and reports errors on `err`. `output` is a
// file path, or "-" for `out`.
int cmd_analyze(const GlobalOptions& g, const std::string& config_path,
                const std::vector<double>& t_grid, const std::string& output, std::ostream& out,
                std::ostream& err);

int cmd_sweep_beta(const GlobalOptions& g, const std::string& config_path,
                   const std::vector<double>& beta_grid, double t, const std::string& output,
                   std::ostream& out, std::ostream& err);

struct BatteryArgs {
  std::size_t count = 1000;
  std::vector<std::size_t> dims{2, 3, 4};
  std::vector<ModelClass> classes{ModelClass::generic, ModelClass::random_unitary,
                                  ModelClass::block_preserving};
  std::size_t inject_fault_every = 0;
};

int cmd_battery(const GlobalOptions& g, const BatteryArgs& args, std::ostream& out,
                std::ostream& err);

struct DemoArgs {
  std::string name;
  std::size_t env_dim = 3;
  bool grid_search = false;
};

int cmd_demo(const GlobalOptions& g, const DemoArgs& args, std::ostream& out, std::ostream& err);

// Full command line, including argv[0].
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qee::cli
