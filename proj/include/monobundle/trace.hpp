#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "monobundle/problems.hpp"
#include "monobundle/solver.hpp"

namespace monobundle {

// Trace files are newline-delimited JSON objects:
//   header   problem, solver configuration, sampling algorithm
//   oracle   one per outer iteration k (x^k, u^k)
//   line     one per line-search pass l
//   step     one per null or serious step
//   result   final status
// Fields appear in a fixed order, floats carry 17 significant digits, and
// "wall_ns" is always the last field of a record.
inline constexpr const char* kTraceFormat = "monobundle-trace/1";

// JSON serialization with %.17g floats and insertion-ordered keys.
std::string dump17(const nlohmann::ordered_json& j);

nlohmann::ordered_json config_to_json(const SolverConfig& config);
// x0 is not part of the serialized form; the caller supplies it.
SolverConfig config_from_json(const nlohmann::json& j, const std::string& where,
                              SolverConfig base = {});

void write_trace(std::ostream& out, const ProblemInstance& problem, const SolverConfig& config,
                 const SolveReport& report);

// Drops every "wall_ns" field so that traces can be compared byte-for-byte.
std::string strip_timing(std::string_view trace);

struct LoadedTrace {
  ProblemInstance problem;
  SolverConfig config;
  SolveReport report;
};

// Throws ConfigError("<line N>", ...) on malformed input.
LoadedTrace read_trace(std::istream& in);

}  // namespace monobundle
