#include "minshare/dynamics.hpp"

#include <algorithm>
#include <limits>

namespace minshare {

std::vector<Violation> validate_gains(const NetworkModel& model) {
  std::vector<Violation> out;
  for (const auto& [id, p] : model.params) {
    if (!model.structure.contains(id)) continue;
    if (!(p.gain > 0.0)) {
      out.push_back({id, "gain must be > 0"});
      continue;
    }
    const std::size_t d = model.structure.degree(id);
    if (d > 0 && p.gain > 1.0 / static_cast<double>(d)) {
      out.push_back({id, "gain " + std::to_string(p.gain) + " exceeds 1/card([i]\\i) = 1/" +
                             std::to_string(d)});
    }
  }
  return out;
}

std::vector<Violation> validate_model(const NetworkModel& model) {
  std::vector<Violation> out = validate(model.structure);
  const auto& cs = model.structure;

  for (AgentId id : cs.agents()) {
    if (model.params.count(id) == 0) out.push_back({id, "missing parameters"});
    if (model.signals.count(id) == 0) out.push_back({id, "missing excitation signal"});
  }
  for (const auto& [id, p] : model.params) {
    if (!cs.contains(id)) out.push_back({id, "parameters given for an agent outside the structure"});
  }
  for (const auto& [id, s] : model.signals) {
    if (!cs.contains(id)) out.push_back({id, "signal given for an agent outside the structure"});
    if (auto err = validate_signal(s)) out.push_back({id, "signal: " + *err});
  }

  for (const auto& [id, p] : model.params) {
    if (!(p.value > 0.0) || !std::isfinite(p.value)) out.push_back({id, "value M must be finite and > 0"});
    if (!(p.lower_bound > 0.0)) out.push_back({id, "lower bound mu must be > 0"});
    if (!(p.lower_bound <= p.value)) out.push_back({id, "lower bound mu exceeds value M"});
  }
  if (cs.is_valid()) {
    auto gains = validate_gains(model);
    out.insert(out.end(), gains.begin(), gains.end());
  }

  if (!model.params.empty()) {
    double max_mu = 0.0;
    double min_m = std::numeric_limits<double>::infinity();
    for (const auto& [id, p] : model.params) {
      max_mu = std::max(max_mu, p.lower_bound);
      min_m = std::min(min_m, p.value);
    }
    if (max_mu > min_m) {
      out.push_back({std::nullopt, "max_i mu_i = " + std::to_string(max_mu) +
                                       " exceeds the global minimum " + std::to_string(min_m)});
    }
  }
  return out;
}

void require_valid(const NetworkModel& model) {
  auto violations = validate_model(model);
  if (!violations.empty()) throw ValidationError("invalid network model", std::move(violations));
}

TrueMinimum true_minimum(const NetworkModel& model) {
  if (model.params.empty()) throw std::invalid_argument("true_minimum of an empty model");
  TrueMinimum out{std::numeric_limits<double>::infinity(), {}};
  for (const auto& [id, p] : model.params) {
    if (p.value < out.value) {
      out.value = p.value;
      out.argmin = {id};
    } else if (p.value == out.value) {
      out.argmin.insert(id);
    }
  }
  return out;
}

SimState step(const NetworkModel& model, const SimState& state) {
  return step(make_dense<double>(model), state);
}

SimState make_state(const NetworkModel& model, const std::map<AgentId, double>& x, std::uint64_t t) {
  SimState s;
  s.t = t;
  s.agents = model.structure.agents();
  s.x.resize(static_cast<Eigen::Index>(s.agents.size()));
  for (std::size_t e = 0; e < s.agents.size(); ++e) {
    auto it = x.find(s.agents[e]);
    if (it == x.end()) throw UnknownAgent(s.agents[e]);
    s.x(static_cast<Eigen::Index>(e)) = it->second;
  }
  return s;
}

}  // namespace minshare
