#include "monobundle/problems.hpp"

#include <fstream>
#include <variant>

#include "monobundle/rng.hpp"

namespace monobundle {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where, "expected a number");
  return j.get<double>();
}

}  // namespace

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where, "expected a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = number(j[i], where + "/" + std::to_string(i));
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json operator_to_json(const OperatorSpec& spec) {
  json out;
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, OperatorSpec::Affine>) {
          out["kind"] = "affine";
          json rows = json::array();
          for (Eigen::Index r = 0; r < op.a.rows(); ++r) rows.push_back(vector_to_json(op.a.row(r).transpose()));
          out["matrix"] = rows;
          out["offset"] = vector_to_json(op.b);
        } else if constexpr (std::is_same_v<T, OperatorSpec::MaxAffine>) {
          out["kind"] = "max_affine";
          json pieces = json::array();
          for (const auto& p : op.pieces) pieces.push_back(json::array({vector_to_json(p.slope), p.intercept}));
          out["pieces"] = pieces;
        } else if constexpr (std::is_same_v<T, OperatorSpec::ScaledL1>) {
          out["kind"] = "scaled_l1";
          out["weights"] = vector_to_json(op.weights);
        } else {
          out["kind"] = "sum";
          json children = json::array();
          for (const auto& c : op.children) children.push_back(operator_to_json(c));
          out["children"] = children;
        }
      },
      spec.kind());
  return out;
}

OperatorSpec operator_from_json(const json& j, const std::string& where) {
  const json& kind_j = field(j, "kind", where);
  if (!kind_j.is_string()) throw ConfigError(where + "/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "affine") {
      const json& rows = field(j, "matrix", where);
      const std::string mw = where + "/matrix";
      if (!rows.is_array() || rows.empty()) throw ConfigError(mw, "expected nested rows");
      const auto n = static_cast<Eigen::Index>(rows.size());
      Matrix a(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const std::string rw = mw + "/" + std::to_string(r);
        const Vector row = vector_from_json(rows[static_cast<std::size_t>(r)], rw);
        if (row.size() != n) throw ConfigError(rw, "matrix must be square");
        a.row(r) = row.transpose();
      }
      Vector b = j.contains("offset") ? vector_from_json(j["offset"], where + "/offset")
                                      : Vector::Zero(n);
      return OperatorSpec::affine(std::move(a), std::move(b));
    }
    if (kind == "max_affine") {
      const json& pieces = field(j, "pieces", where);
      if (!pieces.is_array()) throw ConfigError(where + "/pieces", "expected an array");
      std::vector<AffinePiece> out;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::string pw = where + "/pieces/" + std::to_string(i);
        const json& p = pieces[i];
        if (!p.is_array() || p.size() != 2) throw ConfigError(pw, "expected [slope, intercept]");
        out.push_back({vector_from_json(p[0], pw + "/0"), number(p[1], pw + "/1")});
      }
      return OperatorSpec::max_affine(std::move(out));
    }
    if (kind == "scaled_l1") {
      return OperatorSpec::scaled_l1(vector_from_json(field(j, "weights", where), where + "/weights"));
    }
    if (kind == "sum") {
      const json& children = field(j, "children", where);
      if (!children.is_array()) throw ConfigError(where + "/children", "expected an array");
      std::vector<OperatorSpec> out;
      for (std::size_t i = 0; i < children.size(); ++i) {
        out.push_back(operator_from_json(children[i], where + "/children/" + std::to_string(i)));
      }
      return OperatorSpec::sum(std::move(out));
    }
  } catch (const ContractViolation& e) {
    throw ConfigError(where, e.what());
  }
  throw ConfigError(where + "/kind", "unknown operator kind '" + kind + "'");
}

void ProblemInstance::validate() const {
  require(x0.size() == spec.dimension(), "problem '" + name + "': x0 dimension mismatch");
  require_finite(x0, "x0");
  if (!known_solution) return;
  require(known_solution->size() == spec.dimension(),
          "problem '" + name + "': known_solution dimension mismatch");
  if (eval_oracle(spec, *known_solution).norm() <= 1e-8) return;
  if (auto r = resolvent(spec, *known_solution, 1.0); r && (*r - *known_solution).norm() <= 1e-10) return;
  throw ContractViolation("problem '" + name + "': known_solution is not a zero of T");
}

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names{"diag10", "skew2", "l1_10"};
  return names;
}

ProblemInstance builtin_problem(const std::string& name, std::uint64_t seed) {
  if (name == "diag10") {
    Rng rng(seed);
    Matrix a = Matrix::Zero(10, 10);
    Vector b(10);
    Vector xs(10);
    for (int i = 0; i < 10; ++i) {
      a(i, i) = i + 1;
      b[i] = rng.uniform(-1.0, 1.0);
      xs[i] = -b[i] / (i + 1);
    }
    ProblemInstance p{name, OperatorSpec::affine(a, b), Vector::Ones(10), xs, seed};
    return p;
  }
  if (name == "skew2") {
    Matrix a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    return {name, OperatorSpec::affine(a, Vector::Zero(2)), Vector::Ones(2), Vector::Zero(2), seed};
  }
  if (name == "l1_10") {
    Rng rng(seed);
    Vector x0 = rng.uniform_box(10, -2.0, 2.0);
    return {name, OperatorSpec::scaled_l1(Vector::Ones(10)), x0, Vector::Zero(10), seed};
  }
  throw ConfigError("", "unknown builtin problem '" + name + "'");
}

json problem_to_json(const ProblemInstance& p) {
  json out;
  out["name"] = p.name;
  out["seed"] = p.seed;
  out["operator"] = operator_to_json(p.spec);
  out["x0"] = vector_to_json(p.x0);
  out["known_solution"] = p.known_solution ? vector_to_json(*p.known_solution) : json(nullptr);
  return out;
}

ProblemInstance problem_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected a problem object");
  std::uint64_t seed = 0;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ConfigError(where + "/seed", "expected an integer");
    seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("builtin")) {
    if (!j["builtin"].is_string()) throw ConfigError(where + "/builtin", "expected a string");
    try {
      ProblemInstance p = builtin_problem(j["builtin"].get<std::string>(), seed);
      if (j.contains("name")) p.name = j["name"].get<std::string>();
      return p;
    } catch (const ConfigError& e) {
      throw ConfigError(where + "/builtin", e.what());
    }
  }
  const json& name = field(j, "name", where);
  if (!name.is_string()) throw ConfigError(where + "/name", "expected a string");
  OperatorSpec spec = operator_from_json(field(j, "operator", where), where + "/operator");
  Vector x0 = vector_from_json(field(j, "x0", where), where + "/x0");
  std::optional<Vector> xs;
  if (j.contains("known_solution") && !j["known_solution"].is_null()) {
    xs = vector_from_json(j["known_solution"], where + "/known_solution");
  }
  ProblemInstance p{name.get<std::string>(), std::move(spec), std::move(x0), std::move(xs), seed};
  try {
    p.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(where, e.what());
  }
  return p;
}

ProblemInstance load_problem(const std::string& name_or_path, std::uint64_t seed) {
  for (const auto& n : builtin_problem_names()) {
    if (n == name_or_path) return builtin_problem(n, seed);
  }
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError(name_or_path, "not a builtin problem and not a readable file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(name_or_path + ":" + std::to_string(e.byte), e.what());
  }
  return problem_from_json(j, name_or_path + "#");
}

}  // namespace monobundle
