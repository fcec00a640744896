#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace monobundle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Raised when a guarantee the algorithm relies on fails at runtime (NaN,
// singular resolvent system, broken post-condition).
class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

inline void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) throw ContractViolation(std::string(name) + " has non-finite entries");
}

}  // namespace monobundle
