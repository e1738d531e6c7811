#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "minshare/analysis.hpp"
#include "minshare/common.hpp"
#include "minshare/dynamics.hpp"

namespace minshare {

// ---------------------------------------------------------------------------
// Events

struct SetM {
  AgentId agent = 0;
  double value = 0.0;
  bool operator==(const SetM&) const = default;
};

struct SetSignal {
  AgentId agent = 0;
  SignalSpec signal;
  bool operator==(const SetSignal&) const = default;
};

struct AddAgent {
  AgentId id = 0;
  AgentParams params;
  SignalSpec signal;
  std::optional<double> initial_x;  // defaults to mu
  bool operator==(const AddAgent&) const = default;
};

struct RemoveAgent {
  AgentId id = 0;
  bool operator==(const RemoveAgent&) const = default;
};

struct SetTopology {
  CommStructure structure;
  bool operator==(const SetTopology&) const = default;
};

using EventAction = std::variant<SetM, SetSignal, AddAgent, RemoveAgent, SetTopology>;

struct Event {
  std::uint64_t at = 0;
  EventAction action;
  bool operator==(const Event&) const = default;
};

std::string_view kind_name(const EventAction& action);

/// A post-event model failed validation, or an event could not be applied.
class EventError : public ValidationError {
 public:
  EventError(std::size_t index, const Event& event, std::vector<Violation> violations);

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// ---------------------------------------------------------------------------
// Scenarios

/// Starting point for estimates not listed explicitly.
enum class InitialPolicy { lower_bound, upper_bound };

struct InitialEstimates {
  InitialPolicy policy = InitialPolicy::lower_bound;
  std::map<AgentId, double> values;  // overrides the policy per agent

  bool operator==(const InitialEstimates&) const = default;
};

struct Scenario {
  NetworkModel initial_model;
  InitialEstimates initial;
  std::vector<Event> events;  // sorted by `at`
  std::uint64_t horizon = 0;
  std::uint64_t record_stride = 1;
  bool baseline = false;  // also run Max-Consensus

  bool operator==(const Scenario&) const = default;
};

/// Checks the scenario invariants and replays every event; throws
/// ValidationError for the initial model or scalar fields and EventError
/// for the first event that cannot be applied.
void validate_scenario(const Scenario& scenario);

/// Applies simultaneous events in the order SetTopology, Add/Remove,
/// SetM/SetSignal, then validates. `first_index` numbers events in errors.
NetworkModel apply_events(const NetworkModel& model, const std::vector<Event>& simultaneous,
                          std::size_t first_index = 0);

/// Every agent present at some point, ascending.
std::vector<AgentId> all_agents(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Runner

struct TraceRow {
  std::uint64_t t = 0;
  double M_star = 0.0;
  std::vector<std::optional<double>> x;  // aligned with Trace::agents

  bool operator==(const TraceRow&) const = default;
};

struct Trace {
  std::vector<AgentId> agents;
  std::vector<TraceRow> rows;

  std::optional<double> value(std::size_t row, AgentId id) const;
  bool operator==(const Trace&) const = default;
};

/// One maximal inter-event segment [start, end). The last regime also holds
/// the horizon sample.
struct Regime {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  NetworkModel model;
  TrueMinimum minimum;
  AgentTrace trajectory;  // every step, not just recorded ones
  ConvergenceReport report;
};

struct RunOptions {
  double settle_tolerance = 1e-9;
  std::optional<std::size_t> tail_window;  // default_tail_window when absent
};

struct RunResult {
  Trace trace;
  std::vector<Regime> regimes;
  std::optional<Trace> baseline;
};

/// Deterministic simulation: at each t the events due are applied, the row
/// for t is recorded, then one synchronous step is taken.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Built-in fixtures

/// Four regimes with events at t = 500, 1500 and 5000; horizon 8000.
Scenario builtin_scenario1();

/// The uniformly excited network and its mirror with h^t = 1/(1+t) on every
/// agent; events at t = 500, 20000, 35000 and 150000, horizon 200000.
std::pair<Scenario, Scenario> builtin_scenario2();

// ---------------------------------------------------------------------------
// Persistence

/// Header `t,M_star,x_<id>...`; 17 significant digits; empty cell when absent.
void write_csv(const Trace& trace, std::ostream& out);
Trace read_csv(std::istream& in);
void write_csv_file(const Trace& trace, const std::filesystem::path& path);
Trace read_csv_file(const std::filesystem::path& path);

/// JSON configuration text. Errors carry a JSON pointer to the offending
/// field, or the line and column of a syntax error.
Scenario read_scenario(const std::string& text);
Scenario read_scenario_file(const std::filesystem::path& path);
std::string write_scenario(const Scenario& scenario);
void write_scenario_file(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace minshare
