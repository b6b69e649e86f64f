#pragma once

// JSON model configuration for the command-line tool.
//
//   {
//     "env_dim": 3,
//     "eps0": 0.0, "eps1": 1.0,
//     "h_env": [[[re, im], ...], ...],      N x N, row-major
//     "v0": ..., "v1": ...,
//     "qubit": {"a": [re, im], "b": [re, im]},
//     "initial_env": {"type": "mixed"}
//                  | {"type": "thermal", "hamiltonian": "h_env" | "h0" | "h1", "beta": 1.0}
//                  | {"type": "matrix", "data": [[[re, im], ...], ...]}
//   }
//
// Instead of h_env/v0/v1 a builder may be given:
//   "builder": {"type": "ising", "n_spins": 2, "couplings": [0.3, 0.5], "field": 1.0}

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qee/model.hpp"

namespace qee::cli {

// Parse or validation failure; the message starts with "<source>:<line>:<col>:"
// when a location is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialEnvKind { mixed, thermal, matrix };
enum class ThermalHamiltonian { h_env, h0, h1 };

struct InitialEnvSpec {
  InitialEnvKind kind = InitialEnvKind::mixed;
  ThermalHamiltonian hamiltonian = ThermalHamiltonian::h_env;
  double beta = 0.0;
  ComplexMatrix data;  // kind == matrix
};

struct ModelConfig {
  PureDephasingModel model;
  QubitState qubit;
  InitialEnvSpec initial_env;
};

ModelConfig parse_config(std::string_view text, std::string_view source = "<config>");
ModelConfig load_config(const std::string& path);

ComplexMatrix thermal_hamiltonian(const ModelConfig& cfg);
// Initial environment state, with the thermal beta replaced if given.
ComplexMatrix initial_env_matrix(const ModelConfig& cfg,
                                 std::optional<double> beta = std::nullopt);

}  // namespace qee::cli
