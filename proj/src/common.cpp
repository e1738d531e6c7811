#include "minshare/common.hpp"

#include <sstream>

namespace minshare {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream out;
  bool first = true;
  for (const auto& v : violations) {
    if (!first) out << "; ";
    first = false;
    if (v.agent) out << "agent " << *v.agent << ": ";
    out << v.message;
  }
  return out.str();
}

std::string describe(const AgentSet& agents) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (AgentId id : agents) {
    if (!first) out << ',';
    first = false;
    out << id;
  }
  out << '}';
  return out.str();
}

ValidationError::ValidationError(const std::string& context, std::vector<Violation> violations)
    : std::runtime_error(context + ": " + describe(violations)), violations_(std::move(violations)) {}

UnknownAgent::UnknownAgent(AgentId id)
    : std::invalid_argument("unknown agent " + std::to_string(id)), id_(id) {}

ConfigError::ConfigError(std::string where, const std::string& message)
    : std::runtime_error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}

CapExceeded::CapExceeded(AgentId agent, double upsilon, double cap)
    : BoundError("agent " + std::to_string(agent) + ": asymptotic signal bound " +
                 std::to_string(upsilon) + " exceeds admissible cap " + std::to_string(cap)),
      agent_(agent) {}

}  // namespace minshare
