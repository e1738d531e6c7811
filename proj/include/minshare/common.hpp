#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace minshare {

/// Agent label, unique within one communication structure.
using AgentId = std::uint32_t;

/// Ordered agent set; iteration is always ascending.
using AgentSet = std::set<AgentId>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One broken invariant, optionally attributed to an agent.
struct Violation {
  std::optional<AgentId> agent;
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::string describe(const std::vector<Violation>& violations);
std::string describe(const AgentSet& agents);

/// Raised when an object fails one of its invariants.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& context, std::vector<Violation> violations);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class UnknownAgent : public std::invalid_argument {
 public:
  explicit UnknownAgent(AgentId id);

  AgentId id() const { return id_; }

 private:
  AgentId id_;
};

/// Malformed scenario configuration. `where` is a field path such as
/// `/events/3/agent` or a `line L, column C` position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message);

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the bound calculator when its preconditions fail.
class BoundError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An asymptotic signal bound exceeds the admissible cap h_bar_i.
class CapExceeded : public BoundError {
 public:
  CapExceeded(AgentId agent, double upsilon, double cap);

  AgentId agent() const { return agent_; }

 private:
  AgentId agent_;
};

}  // namespace minshare
