#include "monobundle/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <tuple>

#include "monobundle/rng.hpp"

namespace monobundle {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void dump_into(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += ordered_json(it.key()).dump();
        out.push_back(':');
        dump_into(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case ordered_json::value_t::array: {
      out.push_back('[');
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out.push_back(',');
        dump_into(j[i], out);
      }
      out.push_back(']');
      break;
    }
    case ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      // Keep floats recognizable as floats on re-read.
      if (std::string_view(buf).find_first_of(".eEn") == std::string_view::npos) out += ".0";
      break;
    }
    default:
      out += j.dump();
  }
}

ordered_json vec(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json ordered(const json& j) { return ordered_json::parse(j.dump()); }

std::string lambda_name(LambdaRule r) { return to_string(r); }

Vector get_vec(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where, std::string("missing '") + key + "'");
  return vector_from_json(j[key], where + "/" + key);
}

double get_num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError(where, std::string("missing number '") + key + "'");
  }
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ConfigError(where, std::string("missing integer '") + key + "'");
  }
  return j[key].get<int>();
}

}  // namespace

std::string dump17(const ordered_json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

ordered_json config_to_json(const SolverConfig& c) {
  ordered_json j;
  j["tau"] = c.tau;
  j["radius"] = c.radius;
  j["tol_stop"] = c.tol_stop ? ordered_json(*c.tol_stop) : ordered_json(nullptr);
  j["radius_floor"] = c.radius_floor ? ordered_json(*c.radius_floor) : ordered_json(nullptr);
  j["max_serious"] = c.max_serious;
  j["max_null_per_serious"] = c.max_null_per_serious;
  j["ck_rule"] = c.ck_rule.kind == CkRule::Kind::EqualSigma ? "equal_sigma" : "constant";
  j["ck_c"] = c.ck_rule.c;
  j["lambda_rule"] = lambda_name(c.lambda_rule);
  j["minnorm_tol"] = c.minnorm_tol;
  j["bundle_cap"] = c.bundle_cap ? ordered_json(*c.bundle_cap) : ordered_json(nullptr);
  return j;
}

SolverConfig config_from_json(const json& j, const std::string& where, SolverConfig c) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  auto num = [&](const char* key, double& dst) {
    if (!j.contains(key) || j[key].is_null()) return false;
    if (!j[key].is_number()) throw ConfigError(where + "/" + key, "expected a number");
    dst = j[key].get<double>();
    return true;
  };
  auto integer = [&](const char* key, int& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw ConfigError(where + "/" + key, "expected an integer");
    dst = j[key].get<int>();
  };
  double tmp = 0.0;
  num("tau", c.tau);
  num("radius", c.radius);
  if (num("tol_stop", tmp)) c.tol_stop = tmp;
  if (num("radius_floor", tmp)) c.radius_floor = tmp;
  integer("max_serious", c.max_serious);
  integer("max_null_per_serious", c.max_null_per_serious);
  num("minnorm_tol", c.minnorm_tol);
  if (j.contains("ck_rule")) {
    const auto& r = j["ck_rule"];
    if (r == "equal_sigma") {
      c.ck_rule = CkRule::equal_sigma();
    } else if (r == "constant") {
      c.ck_rule.kind = CkRule::Kind::Constant;
    } else {
      throw ConfigError(where + "/ck_rule", "expected 'equal_sigma' or 'constant'");
    }
  }
  num("ck_c", c.ck_rule.c);
  if (j.contains("lambda_rule")) {
    const auto rule = j["lambda_rule"].is_string()
                          ? parse_lambda_rule(j["lambda_rule"].get<std::string>())
                          : std::nullopt;
    if (!rule) throw ConfigError(where + "/lambda_rule", "expected best_vertex, min_norm or uniform");
    c.lambda_rule = *rule;
  }
  if (j.contains("bundle_cap") && !j["bundle_cap"].is_null()) {
    if (!j["bundle_cap"].is_number_unsigned()) {
      throw ConfigError(where + "/bundle_cap", "expected a positive integer");
    }
    c.bundle_cap = j["bundle_cap"].get<std::size_t>();
  }
  return c;
}

void write_trace(std::ostream& out, const ProblemInstance& problem, const SolverConfig& config,
                 const SolveReport& report) {
  ordered_json header;
  header["type"] = "header";
  header["format"] = kTraceFormat;
  header["rng"] = Rng::kAlgorithm;
  header["problem"] = ordered(problem_to_json(problem));
  header["config"] = config_to_json(config);
  out << dump17(header) << '\n';

  // Merge the three record streams by sequence number.
  std::vector<std::tuple<std::size_t, int, std::size_t>> order;
  order.reserve(report.oracle_records.size() + report.line_records.size() + report.records.size());
  for (std::size_t i = 0; i < report.oracle_records.size(); ++i) order.emplace_back(report.oracle_records[i].seq, 0, i);
  for (std::size_t i = 0; i < report.line_records.size(); ++i) order.emplace_back(report.line_records[i].seq, 1, i);
  for (std::size_t i = 0; i < report.records.size(); ++i) order.emplace_back(report.records[i].seq, 2, i);
  std::sort(order.begin(), order.end());

  for (const auto& [seq, kind, i] : order) {
    ordered_json r;
    if (kind == 0) {
      const auto& o = report.oracle_records[i];
      r["type"] = "oracle";
      r["seq"] = o.seq;
      r["k"] = o.k;
      r["x"] = vec(o.x);
      r["u"] = vec(o.u);
      r["evicted"] = o.evicted;
      r["bundle_size"] = o.bundle_size;
      r["wall_ns"] = o.wall_ns;
    } else if (kind == 1) {
      const auto& o = report.line_records[i];
      r["type"] = "line";
      r["seq"] = o.seq;
      r["k"] = o.k;
      r["n"] = o.n;
      r["j"] = o.j;
      r["l"] = o.l;
      r["sigma"] = o.sigma;
      r["y"] = vec(o.y);
      r["xi"] = vec(o.xi);
      r["v"] = vec(o.v);
      r["eps"] = o.eps;
      r["eps_literal"] = o.eps_literal;
      r["mu"] = o.mu;
      r["bundle_size"] = o.bundle_size;
      r["wall_ns"] = o.wall_ns;
    } else {
      const auto& o = report.records[i];
      r["type"] = "step";
      r["seq"] = o.seq;
      r["k"] = o.k;
      r["n"] = o.n;
      r["j"] = o.j;
      r["l"] = o.l;
      r["x"] = vec(o.x);
      r["s"] = vec(o.s);
      r["y"] = vec(o.y);
      r["v"] = vec(o.v);
      r["xi"] = vec(o.xi);
      r["sigma"] = o.sigma;
      r["c"] = o.c;
      r["e"] = vec(o.e);
      r["eps"] = o.eps;
      r["eps_literal"] = o.eps_literal;
      r["eps_hat"] = o.eps_hat;
      r["mu"] = o.mu;
      r["mu_hat"] = o.mu_hat;
      r["xhat"] = vec(o.xhat);
      r["step_kind"] = to_string(o.step_kind);
      r["x_next"] = o.x_next ? vec(*o.x_next) : ordered_json(nullptr);
      r["bundle_size"] = o.bundle_size;
      r["wall_ns"] = o.wall_ns;
    }
    out << dump17(r) << '\n';
  }

  ordered_json res;
  res["type"] = "result";
  res["status"] = to_string(report.status);
  res["x_final"] = vec(report.x_final);
  res["serious_steps"] = report.serious_steps;
  res["oracle_calls"] = report.oracle_calls;
  res["bundle_size_final"] = report.bundle_size_final;
  res["tol_stop"] = report.tol_stop;
  res["radius_floor"] = report.radius_floor;
  if (report.certificate) {
    ordered_json cert;
    cert["j"] = report.certificate_j;
    cert["xhat"] = vec(report.certificate->xhat);
    cert["uhat"] = vec(report.certificate->uhat);
    cert["epshat"] = report.certificate->epshat;
    res["certificate"] = cert;
  } else {
    res["certificate"] = nullptr;
  }
  res["message"] = report.message;
  out << dump17(res) << '\n';
}

std::string strip_timing(std::string_view trace) {
  static constexpr std::string_view kField = ",\"wall_ns\":";
  std::string out;
  out.reserve(trace.size());
  std::size_t pos = 0;
  while (pos < trace.size()) {
    const auto hit = trace.find(kField, pos);
    if (hit == std::string_view::npos) {
      out.append(trace.substr(pos));
      break;
    }
    out.append(trace.substr(pos, hit - pos));
    pos = hit + kField.size();
    if (pos < trace.size() && trace[pos] == '-') ++pos;
    while (pos < trace.size() && trace[pos] >= '0' && trace[pos] <= '9') ++pos;
  }
  return out;
}

LoadedTrace read_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_result = false;
  std::optional<ProblemInstance> problem;
  SolverConfig config;
  SolveReport report;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(where, e.what());
    }
    try {
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "header") throw ConfigError(where, "trace must start with a header record");
      if (j.value("format", "") != kTraceFormat) throw ConfigError(where, "unsupported trace format");
      problem = problem_from_json(j["problem"], where + "/problem");
      config = config_from_json(j["config"], where + "/config");
      config.x0 = problem->x0;
      have_header = true;
      continue;
    }
    if (type == "oracle") {
      OracleRecord o;
      o.seq = j.at("seq").get<std::size_t>();
      o.k = get_int(j, "k", where);
      o.x = get_vec(j, "x", where);
      o.u = get_vec(j, "u", where);
      o.evicted = j.at("evicted").get<std::vector<std::size_t>>();
      o.bundle_size = j.at("bundle_size").get<std::size_t>();
      o.wall_ns = j.value("wall_ns", std::int64_t{0});
      report.oracle_records.push_back(std::move(o));
    } else if (type == "line") {
      LineSearchRecord o;
      o.seq = j.at("seq").get<std::size_t>();
      o.k = get_int(j, "k", where);
      o.n = get_int(j, "n", where);
      o.j = get_int(j, "j", where);
      o.l = get_int(j, "l", where);
      o.sigma = get_num(j, "sigma", where);
      o.y = get_vec(j, "y", where);
      o.xi = get_vec(j, "xi", where);
      o.v = get_vec(j, "v", where);
      o.eps = get_num(j, "eps", where);
      o.eps_literal = get_num(j, "eps_literal", where);
      o.mu = get_num(j, "mu", where);
      o.bundle_size = j.at("bundle_size").get<std::size_t>();
      o.wall_ns = j.value("wall_ns", std::int64_t{0});
      report.line_records.push_back(std::move(o));
    } else if (type == "step") {
      IterationRecord o;
      o.seq = j.at("seq").get<std::size_t>();
      o.k = get_int(j, "k", where);
      o.n = get_int(j, "n", where);
      o.j = get_int(j, "j", where);
      o.l = get_int(j, "l", where);
      o.x = get_vec(j, "x", where);
      o.s = get_vec(j, "s", where);
      o.y = get_vec(j, "y", where);
      o.v = get_vec(j, "v", where);
      o.xi = get_vec(j, "xi", where);
      o.sigma = get_num(j, "sigma", where);
      o.c = get_num(j, "c", where);
      o.e = get_vec(j, "e", where);
      o.eps = get_num(j, "eps", where);
      o.eps_literal = get_num(j, "eps_literal", where);
      o.eps_hat = get_num(j, "eps_hat", where);
      o.mu = get_num(j, "mu", where);
      o.mu_hat = get_num(j, "mu_hat", where);
      o.xhat = get_vec(j, "xhat", where);
      const std::string kind = j.value("step_kind", "");
      if (kind != "serious" && kind != "null") throw ConfigError(where, "bad step_kind");
      o.step_kind = kind == "serious" ? StepKind::Serious : StepKind::Null;
      if (!j["x_next"].is_null()) o.x_next = get_vec(j, "x_next", where);
      o.bundle_size = j.at("bundle_size").get<std::size_t>();
      o.wall_ns = j.value("wall_ns", std::int64_t{0});
      report.records.push_back(std::move(o));
    } else if (type == "result") {
      const std::string status = j.value("status", "");
      if (status == "exact_zero") report.status = Status::ExactZero;
      else if (status == "converged") report.status = Status::Converged;
      else if (status == "certificate") report.status = Status::Certificate;
      else if (status == "max_iterations") report.status = Status::MaxIterations;
      else throw ConfigError(where, "bad status '" + status + "'");
      report.x_final = get_vec(j, "x_final", where);
      report.serious_steps = get_int(j, "serious_steps", where);
      report.oracle_calls = j.at("oracle_calls").get<std::int64_t>();
      report.bundle_size_final = j.at("bundle_size_final").get<std::size_t>();
      report.tol_stop = get_num(j, "tol_stop", where);
      report.radius_floor = get_num(j, "radius_floor", where);
      if (!j["certificate"].is_null()) {
        const auto& c = j["certificate"];
        report.certificate = EnlargementElement{get_vec(c, "xhat", where), get_vec(c, "uhat", where),
                                                get_num(c, "epshat", where)};
        report.certificate_j = get_int(c, "j", where);
      }
      report.message = j.value("message", "");
      have_result = true;
    } else {
      throw ConfigError(where, "unknown record type '" + type + "'");
    }
    } catch (const json::exception& e) {
      throw ConfigError(where, e.what());
    }
  }
  if (!have_header) throw ConfigError("line 1", "empty trace");
  if (!have_result) throw ConfigError("line " + std::to_string(lineno), "trace has no result record");
  return {std::move(*problem), std::move(config), std::move(report)};
}

}  // namespace monobundle
