#include "minshare/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace minshare {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string event_context(std::size_t index, const Event& event) {
  return "event #" + std::to_string(index) + " (" + std::string(kind_name(event.action)) + " at t=" +
         std::to_string(event.at) + ")";
}

int phase_of(const EventAction& action) {
  return std::visit(overloaded{
                        [](const SetTopology&) { return 0; },
                        [](const AddAgent&) { return 1; },
                        [](const RemoveAgent&) { return 1; },
                        [](const SetM&) { return 2; },
                        [](const SetSignal&) { return 2; },
                    },
                    action);
}

// Applies one action; returns a violation when it refers to an impossible agent.
std::optional<Violation> apply_one(NetworkModel& model, const EventAction& action) {
  return std::visit(
      overloaded{
          [&](const SetTopology& e) -> std::optional<Violation> {
            model.structure = e.structure;
            return std::nullopt;
          },
          [&](const AddAgent& e) -> std::optional<Violation> {
            if (model.params.count(e.id) != 0) return Violation{e.id, "agent is already present"};
            model.params[e.id] = e.params;
            model.signals[e.id] = e.signal;
            return std::nullopt;
          },
          [&](const RemoveAgent& e) -> std::optional<Violation> {
            if (model.params.erase(e.id) == 0) return Violation{e.id, "unknown agent"};
            model.signals.erase(e.id);
            return std::nullopt;
          },
          [&](const SetM& e) -> std::optional<Violation> {
            auto it = model.params.find(e.agent);
            if (it == model.params.end()) return Violation{e.agent, "unknown agent"};
            it->second.value = e.value;
            return std::nullopt;
          },
          [&](const SetSignal& e) -> std::optional<Violation> {
            auto it = model.signals.find(e.agent);
            if (it == model.signals.end()) return Violation{e.agent, "unknown agent"};
            it->second = e.signal;
            return std::nullopt;
          },
      },
      action);
}

// Indices into `events` grouped by time, preserving list order.
std::vector<std::pair<std::size_t, std::size_t>> event_groups(const std::vector<Event>& events) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < events.size();) {
    std::size_t j = i;
    while (j < events.size() && events[j].at == events[i].at) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  return groups;
}

NetworkModel apply_group(const NetworkModel& model, const std::vector<Event>& events, std::size_t begin,
                         std::size_t end) {
  NetworkModel next = model;
  for (int phase = 0; phase < 3; ++phase) {
    for (std::size_t i = begin; i < end; ++i) {
      if (phase_of(events[i].action) != phase) continue;
      if (auto v = apply_one(next, events[i].action)) throw EventError(i, events[i], {*v});
    }
  }
  auto violations = validate_model(next);
  if (!violations.empty()) {
    // Attribute the failure to the last event of the batch that touched the model.
    throw EventError(end - 1, events[end - 1], std::move(violations));
  }
  return next;
}

double initial_estimate(const Scenario& s, AgentId id, const AgentParams& p) {
  auto it = s.initial.values.find(id);
  if (it != s.initial.values.end()) return it->second;
  return s.initial.policy == InitialPolicy::upper_bound ? p.value : p.lower_bound;
}

AgentTrace open_trajectory(const NetworkModel& model) {
  AgentTrace t;
  t.agents = model.structure.agents();
  return t;
}

void finish_regime(Regime& r, std::vector<Eigen::VectorXd>& rows, const RunOptions& options) {
  AgentTrace& tr = r.trajectory;
  tr.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(tr.agents.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) tr.x.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
  rows.clear();
  const std::size_t len = tr.rows();
  const std::size_t window =
      options.tail_window ? std::clamp<std::size_t>(*options.tail_window, 1, len) : default_tail_window(len);
  r.report = convergence_report(tr, r.minimum.value, r.minimum.argmin, options.settle_tolerance, window);
}

}  // namespace

std::string_view kind_name(const EventAction& action) {
  return std::visit(overloaded{
                        [](const SetM&) { return std::string_view("set_m"); },
                        [](const SetSignal&) { return std::string_view("set_signal"); },
                        [](const AddAgent&) { return std::string_view("add_agent"); },
                        [](const RemoveAgent&) { return std::string_view("remove_agent"); },
                        [](const SetTopology&) { return std::string_view("set_topology"); },
                    },
                    action);
}

EventError::EventError(std::size_t index, const Event& event, std::vector<Violation> violations)
    : ValidationError(event_context(index, event), std::move(violations)), index_(index) {}

NetworkModel apply_events(const NetworkModel& model, const std::vector<Event>& simultaneous,
                          std::size_t first_index) {
  if (simultaneous.empty()) return model;
  // Errors are reported with indices offset by first_index.
  try {
    return apply_group(model, simultaneous, 0, simultaneous.size());
  } catch (const EventError& e) {
    throw EventError(first_index + e.index(), simultaneous[e.index()], e.violations());
  }
}

void validate_scenario(const Scenario& s) {
  std::vector<Violation> top;
  if (s.horizon == 0) top.push_back({std::nullopt, "horizon must be positive"});
  if (s.record_stride == 0) top.push_back({std::nullopt, "record_stride must be positive"});
  for (const auto& [id, x] : s.initial.values) {
    if (!std::isfinite(x)) top.push_back({id, "initial estimate must be finite"});
  }
  if (!top.empty()) throw ValidationError("invalid scenario", std::move(top));
  require_valid(s.initial_model);

  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const Event& e = s.events[i];
    if (e.at == 0 || e.at >= s.horizon) {
      throw EventError(i, e, {{std::nullopt, "event time must lie strictly inside (0, horizon)"}});
    }
    if (i > 0 && e.at < s.events[i - 1].at) {
      throw EventError(i, e, {{std::nullopt, "events must be sorted by time"}});
    }
  }
  NetworkModel model = s.initial_model;
  for (auto [b, e] : event_groups(s.events)) model = apply_group(model, s.events, b, e);
}

std::vector<AgentId> all_agents(const Scenario& s) {
  std::set<AgentId> ids(s.initial_model.structure.agents().begin(), s.initial_model.structure.agents().end());
  for (const Event& e : s.events) {
    if (const auto* add = std::get_if<AddAgent>(&e.action)) ids.insert(add->id);
  }
  return {ids.begin(), ids.end()};
}

std::optional<double> Trace::value(std::size_t row, AgentId id) const {
  auto it = std::find(agents.begin(), agents.end(), id);
  if (it == agents.end()) throw UnknownAgent(id);
  return rows.at(row).x[static_cast<std::size_t>(it - agents.begin())];
}

RunResult run(const Scenario& s, const RunOptions& options) {
  validate_scenario(s);

  RunResult result;
  result.trace.agents = all_agents(s);
  std::map<AgentId, std::size_t> column;
  for (std::size_t c = 0; c < result.trace.agents.size(); ++c) column[result.trace.agents[c]] = c;
  if (s.baseline) result.baseline = Trace{result.trace.agents, {}};

  NetworkModel model = s.initial_model;
  DenseModel<double> dense = make_dense<double>(model);
  SimState state{0, dense.agents, Eigen::VectorXd(dense.size())};
  for (Eigen::Index e = 0; e < dense.size(); ++e) {
    const AgentId id = dense.agents[static_cast<std::size_t>(e)];
    state.x(e) = initial_estimate(s, id, model.params.at(id));
  }
  // Max-Consensus starts every estimate at M_i.
  Eigen::VectorXd base = dense.value;

  const auto groups = event_groups(s.events);
  std::size_t next_group = 0;

  Regime current{0, 0, model, true_minimum(model), open_trajectory(model), {}};
  std::vector<Eigen::VectorXd> regime_rows;

  auto make_row = [&](std::uint64_t t, const std::vector<AgentId>& ids, const Eigen::VectorXd& x) {
    TraceRow row{t, current.minimum.value, std::vector<std::optional<double>>(result.trace.agents.size())};
    for (std::size_t e = 0; e < ids.size(); ++e) row.x[column.at(ids[e])] = x(static_cast<Eigen::Index>(e));
    return row;
  };

  for (std::uint64_t t = 0; t <= s.horizon; ++t) {
    if (next_group < groups.size() && s.events[groups[next_group].first].at == t) {
      auto [b, e] = groups[next_group++];
      NetworkModel next = apply_group(model, s.events, b, e);

      std::map<AgentId, double> carried, carried_base;
      for (std::size_t k = 0; k < dense.agents.size(); ++k) {
        carried[dense.agents[k]] = state.x(static_cast<Eigen::Index>(k));
        carried_base[dense.agents[k]] = base(static_cast<Eigen::Index>(k));
      }
      std::map<AgentId, double> joining;
      for (std::size_t k = b; k < e; ++k) {
        if (const auto* add = std::get_if<AddAgent>(&s.events[k].action)) {
          joining[add->id] = add->initial_x.value_or(add->params.lower_bound);
        }
      }

      model = std::move(next);
      dense = make_dense<double>(model);
      state.agents = dense.agents;
      state.x.resize(dense.size());
      base.resize(dense.size());
      for (Eigen::Index k = 0; k < dense.size(); ++k) {
        const AgentId id = dense.agents[static_cast<std::size_t>(k)];
        auto c = carried.find(id);
        state.x(k) = c != carried.end() ? c->second : joining.at(id);
        auto cb = carried_base.find(id);
        base(k) = cb != carried_base.end() ? cb->second : model.params.at(id).value;
      }

      current.end = t;
      finish_regime(current, regime_rows, options);
      result.regimes.push_back(std::move(current));
      current = Regime{t, 0, model, true_minimum(model), open_trajectory(model), {}};
    }

    regime_rows.push_back(state.x);
    if (t % s.record_stride == 0 || t == s.horizon) {
      result.trace.rows.push_back(make_row(t, dense.agents, state.x));
      if (result.baseline) result.baseline->rows.push_back(make_row(t, dense.agents, base));
    }
    current.trajectory.t.push_back(t);

    if (t < s.horizon) {
      state = step(dense, state);
      if (s.baseline) base = max_consensus_step(model.structure, base);
    }
  }
  current.end = s.horizon;
  finish_regime(current, regime_rows, options);
  result.regimes.push_back(std::move(current));
  return result;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

CommStructure topology(std::map<AgentId, AgentSet> nbrs) { return CommStructure(std::move(nbrs)); }

CommStructure topology_a() { return topology({{1, {1, 3, 4}}, {2, {2, 3, 4}}, {3, {1, 2, 3}}, {4, {1, 2, 4}}}); }

CommStructure topology_b() {
  return topology({{1, {1, 3, 4}},
                   {2, {2, 4}},
                   {3, {1, 3, 5, 6}},
                   {4, {1, 2, 4, 5}},
                   {5, {3, 4, 5}},
                   {6, {3, 6}}});
}

CommStructure topology_c() { return topology({{1, {1, 4}}, {4, {1, 4, 5, 6}}, {5, {4, 5}}, {6, {4, 6}}}); }

NetworkModel four_agent_model(const std::array<double, 4>& M) {
  const std::array<double, 4> k{0.1, 0.08, 0.05, 0.09};
  const std::array<SquareWave, 4> waves{SquareWave{1e-3, 15, 0.2}, SquareWave{5e-4, 10, 0.5},
                                        SquareWave{1e-3, 5, 0.3}, SquareWave{5e-4, 10, 0.5}};
  NetworkModel model;
  model.structure = topology_a();
  for (AgentId id = 1; id <= 4; ++id) {
    model.params[id] = AgentParams{M[id - 1], 0.5, k[id - 1]};
    model.signals[id] = waves[id - 1];
  }
  return model;
}

}  // namespace

Scenario builtin_scenario1() {
  Scenario s;
  s.initial_model = four_agent_model({10, 12, 13, 13});
  s.initial.policy = InitialPolicy::upper_bound;
  s.horizon = 8000;
  s.events = {
      {500, SetTopology{topology_b()}},
      {500, AddAgent{5, {7, 0.5, 0.07}, SquareWave{1e-3, 5, 0.4}, std::nullopt}},
      {500, AddAgent{6, {11, 0.5, 0.1}, SquareWave{2.5e-3, 7, 0.1}, std::nullopt}},
      {500, SetM{1, 11}},
      {500, SetM{3, 13}},
      {1500, SetTopology{topology_c()}},
      {1500, RemoveAgent{2}},
      {1500, RemoveAgent{3}},
      {1500, SetM{1, 12}},
      {1500, SetM{4, 16}},
      {1500, SetM{5, 11}},
      {1500, SetM{6, 16}},
      {5000, SetM{4, 8}},
  };
  return s;
}

std::pair<Scenario, Scenario> builtin_scenario2() {
  Scenario s;
  s.initial_model = four_agent_model({3, 6, 9, 15});
  s.initial.policy = InitialPolicy::upper_bound;
  s.horizon = 200000;
  s.events = {
      {500, SetM{1, 15}},
      {20000, SetM{2, 15}},
      {35000, SetM{3, 12}},
      {150000, SetM{3, 15}},
  };
  Scenario mirror = s;
  for (auto& [id, signal] : mirror.initial_model.signals) signal = Vanishing{1.0};
  return {s, mirror};
}

}  // namespace minshare
