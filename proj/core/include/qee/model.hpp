#pragma once

// Pure-dephasing model
//   H = sum_i eps_i |i><i| (x) 1 + 1 (x) H_E + |0><0| (x) V_0 + |1><1| (x) V_1
// with the qubit in a pure state a|0> + b|1> and the environment in an
// arbitrary mixed state, plus builders for the model families used in tests
// and demos.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qee/linalg.hpp"

namespace qee {

class PureDephasingModel {
 public:
  // Validates that h_env, v0, v1 are N x N and Hermitian within 1e-10
  // (relative); throws DimensionError / ContractError otherwise.
  PureDephasingModel(double eps0, double eps1, ComplexMatrix h_env, ComplexMatrix v0,
                     ComplexMatrix v1);

  double eps0() const { return eps0_; }
  double eps1() const { return eps1_; }
  std::size_t env_dim() const { return static_cast<std::size_t>(h_env_.rows()); }
  const ComplexMatrix& h_env() const { return h_env_; }
  const ComplexMatrix& v0() const { return v0_; }
  const ComplexMatrix& v1() const { return v1_; }

  // H_i = H_E + V_i, the environment Hamiltonian conditioned on qubit state i.
  ComplexMatrix h0() const { return h_env_ + v0_; }
  ComplexMatrix h1() const { return h_env_ + v1_; }

  // Full 2N x 2N Hamiltonian in the joint basis (qubit slow index).
  ComplexMatrix joint_hamiltonian() const;

 private:
  double eps0_;
  double eps1_;
  ComplexMatrix h_env_;
  ComplexMatrix v0_;
  ComplexMatrix v1_;
};

class QubitState {
 public:
  // Throws ContractError unless |a|^2 + |b|^2 = 1 within 1e-12.
  QubitState(Complex a, Complex b);
  // Rescales (a, b) to unit norm.
  static QubitState normalized(Complex a, Complex b);
  static QubitState plus() { return normalized(1.0, 1.0); }

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  // Both amplitudes above tol: dephasing needs a superposition.
  bool is_superposition(double tol) const {
    return std::abs(a_) > tol && std::abs(b_) > tol;
  }
  ComplexMatrix density_matrix() const;

 private:
  Complex a_;
  Complex b_;
};

struct EnvironmentTolerances {
  double grouping = 1e-8;
  double zero = 1e-12;
};

// Indices (into the descending eigenvalue list) sharing one eigenvalue.
struct Subspace {
  double value = 0.0;
  std::vector<std::size_t> indices;
  bool is_zero = false;
};

struct EnvironmentState {
  ComplexMatrix rho;
  RealVector eigenvalues;      // descending
  ComplexMatrix eigenvectors;  // column n is |n>, matching eigenvalues(n)
  std::vector<Subspace> partition;
  std::size_t rank = 0;
  EnvironmentTolerances tolerances;

  std::size_t dim() const { return static_cast<std::size_t>(rho.rows()); }
  std::size_t zero_count() const { return dim() - rank; }
  bool full_rank() const { return rank == dim(); }
  // Index into `partition` of the subspace containing eigen-index n.
  std::size_t subspace_of(std::size_t n) const;
  std::vector<std::size_t> zero_indices() const;
  // Sum_n c_n |n><n|.
  ComplexMatrix reassemble() const;
};

EnvironmentState analyze_environment(const ComplexMatrix& rho,
                                     EnvironmentTolerances tol = {});

// exp(-beta h) / Tr exp(-beta h).
ComplexMatrix build_thermal(const ComplexMatrix& h, double beta);

enum class ModelClass { generic, random_unitary, block_preserving };

std::string_view to_string(ModelClass c);
std::optional<ModelClass> parse_model_class(std::string_view name);

struct GeneratedModel {
  PureDephasingModel model;
  ComplexMatrix rho_env;
  double beta = 0.0;  // generic / random_unitary; unused for block_preserving
  // block_preserving: the subspaces (as lists of columns of `basis`).
  std::vector<std::vector<std::size_t>> blocks;
  ComplexMatrix basis;
};

// generic:          H_E, V_0, V_1 random Hermitian; rho_E thermal in H_E at
//                   beta in [0.1, 2] (or beta_override).
// random_unitary:   H_E, V_0, V_1 diagonal in one random basis, rho_E thermal
//                   in H_E.
// block_preserving: random partition into >= 2 subspaces; H_E, V_0, V_1 block
//                   diagonal w.r.t. it; rho_E constant on each subspace with
//                   distinct values.
GeneratedModel build_random_model(std::size_t env_dim, ModelClass cls, std::uint64_t seed,
                                  std::optional<double> beta_override = std::nullopt);

// V_0 = 0, V_1 = sum_k g_k sz_k, H_E = field * sum_k sx_k; spin 0 is the most
// significant tensor factor. Requires 1 <= n_spins <= 8 and one coupling per
// spin.
PureDephasingModel build_ising_bath(std::size_t n_spins, const std::vector<double>& couplings,
                                    double field);

}  // namespace qee
