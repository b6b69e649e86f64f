#include "qee/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "qee/error.hpp"

namespace qee::cli {

namespace {

using nlohmann::json;
using Index = Eigen::Index;

struct Location {
  std::size_t line = 1;
  std::size_t col = 1;
};

Location locate_offset(std::string_view text, std::size_t offset) {
  Location loc;
  offset = std::min(offset, text.size());
  for (std::size_t k = 0; k < offset; ++k) {
    if (text[k] == '\n') {
      ++loc.line;
      loc.col = 1;
    } else {
      ++loc.col;
    }
  }
  return loc;
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    // Anchor on the deepest key of `path` that occurs in the text, searching
    // each key after its parent so repeated names resolve to the right one.
    std::size_t pos = 0;
    std::optional<std::size_t> found;
    for (const auto& key : path) {
      const std::size_t hit = text_.find("\"" + key + "\"", pos);
      if (hit == std::string_view::npos) break;
      found = hit;
      pos = hit + key.size() + 2;
    }
    std::ostringstream os;
    os << source_;
    if (found) {
      const Location loc = locate_offset(text_, *found);
      os << ":" << loc.line << ":" << loc.col;
    }
    os << ": ";
    for (std::size_t k = 0; k < path.size(); ++k) os << (k ? "." : "") << path[k];
    if (!path.empty()) os << ": ";
    os << what;
    throw ConfigError(os.str());
  }

  const json& member(const json& obj, const std::vector<std::string>& path) const {
    const json* cur = &obj;
    for (const auto& key : path) {
      if (!cur->is_object() || !cur->contains(key)) fail(path, "missing required field");
      cur = &(*cur)[key];
    }
    return *cur;
  }

  double number(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(path, "value is not finite");
    return x;
  }

  Complex complex(const json& j, const std::vector<std::string>& path) const {
    if (j.is_number()) return number(j, path);
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      fail(path, "expected a complex number [re, im]");
    }
    return {number(j[0], path), number(j[1], path)};
  }

  ComplexMatrix matrix(const json& j, std::size_t n, const std::vector<std::string>& path) const {
    if (!j.is_array() || j.size() != n) {
      fail(path, "expected " + std::to_string(n) + " rows");
    }
    const auto dim = static_cast<Index>(n);
    ComplexMatrix m(dim, dim);
    for (std::size_t r = 0; r < n; ++r) {
      const json& row = j[r];
      if (!row.is_array() || row.size() != n) {
        fail(path, "row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
      }
      for (std::size_t c = 0; c < n; ++c) {
        m(static_cast<Index>(r), static_cast<Index>(c)) = complex(row[c], path);
      }
    }
    return m;
  }

  std::size_t positive_int(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_number_integer() || j.get<long long>() < 1) fail(path, "expected a positive integer");
    return j.get<std::size_t>();
  }

  std::string string(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  ModelConfig parse() const {
    json root;
    try {
      root = json::parse(text_.begin(), text_.end());
    } catch (const json::parse_error& e) {
      const Location loc = locate_offset(text_, e.byte > 0 ? e.byte - 1 : 0);
      std::ostringstream os;
      os << source_ << ":" << loc.line << ":" << loc.col << ": syntax error: " << e.what();
      throw ConfigError(os.str());
    }
    if (!root.is_object()) fail({}, "top level must be an object");

    const double eps0 = root.contains("eps0") ? number(root["eps0"], {"eps0"}) : 0.0;
    const double eps1 = root.contains("eps1") ? number(root["eps1"], {"eps1"}) : 0.0;

    std::optional<PureDephasingModel> model;
    if (root.contains("builder")) {
      model = build(root["builder"], eps0, eps1);
      if (root.contains("env_dim") &&
          positive_int(root["env_dim"], {"env_dim"}) != model->env_dim()) {
        fail({"env_dim"}, "does not match the builder's dimension " +
                              std::to_string(model->env_dim()));
      }
    } else {
      const std::size_t n = positive_int(member(root, {"env_dim"}), {"env_dim"});
      if (n > kDefaultMaxDim / 2) fail({"env_dim"}, "exceeds the maximum dimension");
      ComplexMatrix h = matrix(member(root, {"h_env"}), n, {"h_env"});
      ComplexMatrix v0 = matrix(member(root, {"v0"}), n, {"v0"});
      ComplexMatrix v1 = matrix(member(root, {"v1"}), n, {"v1"});
      try {
        model.emplace(eps0, eps1, std::move(h), std::move(v0), std::move(v1));
      } catch (const std::exception& e) {
        fail({}, e.what());
      }
    }

    const json& qj = member(root, {"qubit"});
    const Complex a = complex(member(qj, {"a"}), {"qubit", "a"});
    const Complex b = complex(member(qj, {"b"}), {"qubit", "b"});
    std::optional<QubitState> qubit;
    try {
      qubit.emplace(a, b);
    } catch (const ContractError& e) {
      fail({"qubit"}, e.what());
    }

    InitialEnvSpec env = initial_env(member(root, {"initial_env"}), model->env_dim());
    return ModelConfig{std::move(*model), *qubit, std::move(env)};
  }

 private:
  PureDephasingModel build(const json& b, double eps0, double eps1) const {
    const std::string type = string(member(b, {"type"}), {"builder", "type"});
    if (type != "ising") fail({"builder", "type"}, "unknown builder '" + type + "'");
    const std::size_t spins = positive_int(member(b, {"n_spins"}), {"builder", "n_spins"});
    const json& cj = member(b, {"couplings"});
    if (!cj.is_array()) fail({"builder", "couplings"}, "expected an array");
    std::vector<double> couplings;
    for (const auto& c : cj) couplings.push_back(number(c, {"builder", "couplings"}));
    const double field = number(member(b, {"field"}), {"builder", "field"});
    try {
      const PureDephasingModel m = build_ising_bath(spins, couplings, field);
      return PureDephasingModel(eps0, eps1, m.h_env(), m.v0(), m.v1());
    } catch (const std::exception& e) {
      fail({"builder"}, e.what());
    }
  }

  InitialEnvSpec initial_env(const json& j, std::size_t n) const {
    InitialEnvSpec spec;
    const std::string type = string(member(j, {"type"}), {"initial_env", "type"});
    if (type == "mixed") {
      spec.kind = InitialEnvKind::mixed;
    } else if (type == "thermal") {
      spec.kind = InitialEnvKind::thermal;
      const std::string h = j.contains("hamiltonian")
                                ? string(j["hamiltonian"], {"initial_env", "hamiltonian"})
                                : "h_env";
      if (h == "h_env") {
        spec.hamiltonian = ThermalHamiltonian::h_env;
      } else if (h == "h0") {
        spec.hamiltonian = ThermalHamiltonian::h0;
      } else if (h == "h1") {
        spec.hamiltonian = ThermalHamiltonian::h1;
      } else {
        fail({"initial_env", "hamiltonian"}, "expected one of h_env, h0, h1");
      }
      spec.beta = number(member(j, {"beta"}), {"initial_env", "beta"});
      if (spec.beta < 0.0) fail({"initial_env", "beta"}, "must be >= 0");
    } else if (type == "matrix") {
      spec.kind = InitialEnvKind::matrix;
      spec.data = matrix(member(j, {"data"}), n, {"initial_env", "data"});
      if (!is_density_matrix(spec.data)) {
        try {
          require_density_matrix(spec.data, "initial_env.data");
        } catch (const ContractError& e) {
          fail({"initial_env", "data"}, e.what());
        }
      }
    } else {
      fail({"initial_env", "type"}, "expected one of mixed, thermal, matrix");
    }
    return spec;
  }

  std::string_view text_;
  std::string_view source_;
};

}  // namespace

ModelConfig parse_config(std::string_view text, std::string_view source) {
  return Parser(text, source).parse();
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

ComplexMatrix thermal_hamiltonian(const ModelConfig& cfg) {
  switch (cfg.initial_env.hamiltonian) {
    case ThermalHamiltonian::h_env: return cfg.model.h_env();
    case ThermalHamiltonian::h0: return cfg.model.h0();
    case ThermalHamiltonian::h1: return cfg.model.h1();
  }
  return cfg.model.h_env();
}

ComplexMatrix initial_env_matrix(const ModelConfig& cfg, std::optional<double> beta) {
  const std::size_t n = cfg.model.env_dim();
  switch (cfg.initial_env.kind) {
    case InitialEnvKind::mixed: return identity(n) / static_cast<double>(n);
    case InitialEnvKind::matrix: return cfg.initial_env.data;
    case InitialEnvKind::thermal:
      return build_thermal(thermal_hamiltonian(cfg), beta.value_or(cfg.initial_env.beta));
  }
  return identity(n) / static_cast<double>(n);
}

}  // namespace qee::cli
