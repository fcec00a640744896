#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "monobundle/oracle.hpp"

namespace monobundle {

// Malformed problem or suite configuration; `where` is a JSON pointer.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct ProblemInstance {
  std::string name;
  OperatorSpec spec;
  Vector x0;
  std::optional<Vector> known_solution;
  std::uint64_t seed = 0;

  // Known solution must satisfy |T(x*)| <= 1e-8 or be a resolvent fixed point.
  void validate() const;
};

// "diag10": A = diag(1..10), b uniform in [-1,1]^10 from seed, x0 = ones.
// "skew2":  A = [[0,1],[-1,0]], b = 0, x0 = (1,1).
// "l1_10":  T = subdifferential of |.|_1 on R^10, x0 uniform in [-2,2]^10 from seed.
ProblemInstance builtin_problem(const std::string& name, std::uint64_t seed = 0);
const std::vector<std::string>& builtin_problem_names();

nlohmann::json operator_to_json(const OperatorSpec& spec);
OperatorSpec operator_from_json(const nlohmann::json& j, const std::string& where = "");

nlohmann::json problem_to_json(const ProblemInstance& p);
// Accepts {"builtin": name, "seed": s} or an inline definition with
// "name", "operator", "x0" and optional "known_solution" / "seed".
ProblemInstance problem_from_json(const nlohmann::json& j, const std::string& where = "");

// Built-in name, or path to a JSON file holding one problem.
ProblemInstance load_problem(const std::string& name_or_path, std::uint64_t seed = 0);

Vector vector_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json vector_to_json(const Vector& v);

}  // namespace monobundle
