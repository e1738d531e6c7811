#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "minshare/scenario.hpp"

namespace minshare {

namespace {

using json = nlohmann::ordered_json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// Reading

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path.empty() ? "/" : path, message);
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      fail(child(path, key), "unknown key");
    }
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(child(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_int(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::uint32_t small_uint(const json& j, const std::string& path) {
  const std::uint64_t v = unsigned_int(j, path);
  if (v > std::numeric_limits<std::uint32_t>::max()) fail(path, "integer out of range");
  return static_cast<std::uint32_t>(v);
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string text_value(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

AgentId agent_key(const std::string& key, const std::string& path) {
  AgentId id{};
  auto res = std::from_chars(key.data(), key.data() + key.size(), id);
  if (res.ec != std::errc() || res.ptr != key.data() + key.size()) fail(path, "key is not an agent id");
  return id;
}

SignalSpec read_signal(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = text_value(require(j, path, "kind"), child(path, "kind"));
  auto num = [&](const char* key) { return number(require(j, path, key), child(path, key)); };
  auto per = [&]() { return small_uint(require(j, path, "period"), child(path, "period")); };
  if (kind == "constant") {
    allow_keys(j, path, {"kind", "amplitude"});
    return Constant{num("amplitude")};
  }
  if (kind == "rectified_sine") {
    allow_keys(j, path, {"kind", "amplitude", "period"});
    return RectifiedSine{num("amplitude"), per()};
  }
  if (kind == "half_wave_sine") {
    allow_keys(j, path, {"kind", "amplitude", "period"});
    return HalfWaveSine{num("amplitude"), per()};
  }
  if (kind == "square_wave") {
    allow_keys(j, path, {"kind", "amplitude", "period", "duty"});
    return SquareWave{num("amplitude"), per(), num("duty")};
  }
  if (kind == "vanishing") {
    allow_keys(j, path, {"kind", "scale"});
    return Vanishing{num("scale")};
  }
  if (kind == "table") {
    allow_keys(j, path, {"kind", "values", "periodic"});
    const json& vs = require(j, path, "values");
    if (!vs.is_array()) fail(child(path, "values"), "expected an array");
    Table t;
    for (std::size_t i = 0; i < vs.size(); ++i) t.values.push_back(number(vs[i], child(child(path, "values"), i)));
    if (j.contains("periodic")) t.periodic = boolean(j["periodic"], child(path, "periodic"));
    return t;
  }
  fail(child(path, "kind"), "unknown signal kind '" + kind + "'");
}

struct AgentEntry {
  AgentId id;
  AgentParams params;
  SignalSpec signal;
};

AgentEntry read_agent(const json& j, const std::string& path) {
  expect_object(j, path);
  allow_keys(j, path, {"id", "M", "mu", "k", "signal"});
  AgentEntry a;
  a.id = small_uint(require(j, path, "id"), child(path, "id"));
  a.params.value = number(require(j, path, "M"), child(path, "M"));
  a.params.lower_bound = number(require(j, path, "mu"), child(path, "mu"));
  a.params.gain = number(require(j, path, "k"), child(path, "k"));
  a.signal = read_signal(require(j, path, "signal"), child(path, "signal"));
  return a;
}

CommStructure read_topology(const json& j, const std::string& path) {
  expect_object(j, path);
  std::map<AgentId, AgentSet> nbrs;
  for (const auto& [key, list] : j.items()) {
    const std::string p = child(path, key);
    const AgentId id = agent_key(key, p);
    if (!list.is_array()) fail(p, "expected an array of agent ids");
    AgentSet set;
    for (std::size_t i = 0; i < list.size(); ++i) set.insert(small_uint(list[i], child(p, i)));
    nbrs[id] = std::move(set);
  }
  return CommStructure(std::move(nbrs));
}

Event read_event(const json& j, const std::string& path) {
  expect_object(j, path);
  Event e;
  e.at = unsigned_int(require(j, path, "at"), child(path, "at"));
  const std::string kind = text_value(require(j, path, "kind"), child(path, "kind"));
  auto agent = [&]() { return small_uint(require(j, path, "agent"), child(path, "agent")); };
  if (kind == "set_m") {
    allow_keys(j, path, {"at", "kind", "agent", "value"});
    e.action = SetM{agent(), number(require(j, path, "value"), child(path, "value"))};
  } else if (kind == "set_signal") {
    allow_keys(j, path, {"at", "kind", "agent", "signal"});
    e.action = SetSignal{agent(), read_signal(require(j, path, "signal"), child(path, "signal"))};
  } else if (kind == "add_agent") {
    allow_keys(j, path, {"at", "kind", "agent", "initial_x"});
    AgentEntry a = read_agent(require(j, path, "agent"), child(path, "agent"));
    AddAgent add{a.id, a.params, a.signal, std::nullopt};
    if (j.contains("initial_x")) add.initial_x = number(j["initial_x"], child(path, "initial_x"));
    e.action = std::move(add);
  } else if (kind == "remove_agent") {
    allow_keys(j, path, {"at", "kind", "agent"});
    e.action = RemoveAgent{agent()};
  } else if (kind == "set_topology") {
    allow_keys(j, path, {"at", "kind", "topology"});
    e.action = SetTopology{read_topology(require(j, path, "topology"), child(path, "topology"))};
  } else {
    fail(child(path, "kind"), "unknown event kind '" + kind + "'");
  }
  return e;
}

InitialEstimates read_initial(const json& j, const std::string& path) {
  expect_object(j, path);
  allow_keys(j, path, {"policy", "values"});
  InitialEstimates init;
  if (j.contains("policy")) {
    const std::string p = text_value(j["policy"], child(path, "policy"));
    if (p == "mu") init.policy = InitialPolicy::lower_bound;
    else if (p == "upper") init.policy = InitialPolicy::upper_bound;
    else fail(child(path, "policy"), "policy must be \"mu\" or \"upper\"");
  }
  if (j.contains("values")) {
    const std::string vp = child(path, "values");
    expect_object(j["values"], vp);
    for (const auto& [key, v] : j["values"].items()) {
      init.values[agent_key(key, child(vp, key))] = number(v, child(vp, key));
    }
  }
  return init;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col > 1 ? col - 1 : 1};
}

// ---------------------------------------------------------------------------
// Writing

json write_signal(const SignalSpec& spec) {
  json j;
  j["kind"] = std::string(kind_name(spec));
  std::visit(overloaded{
                 [&](const Constant& s) { j["amplitude"] = s.amplitude; },
                 [&](const RectifiedSine& s) {
                   j["amplitude"] = s.amplitude;
                   j["period"] = s.period;
                 },
                 [&](const HalfWaveSine& s) {
                   j["amplitude"] = s.amplitude;
                   j["period"] = s.period;
                 },
                 [&](const SquareWave& s) {
                   j["amplitude"] = s.amplitude;
                   j["period"] = s.period;
                   j["duty"] = s.duty;
                 },
                 [&](const Vanishing& s) { j["scale"] = s.scale; },
                 [&](const Table& s) {
                   j["values"] = s.values;
                   j["periodic"] = s.periodic;
                 },
             },
             spec);
  return j;
}

json write_agent(AgentId id, const AgentParams& p, const SignalSpec& s) {
  json j;
  j["id"] = id;
  j["M"] = p.value;
  j["mu"] = p.lower_bound;
  j["k"] = p.gain;
  j["signal"] = write_signal(s);
  return j;
}

json write_topology(const CommStructure& cs) {
  json j = json::object();
  for (const auto& [id, nbrs] : cs.neighborhoods()) j[std::to_string(id)] = std::vector<AgentId>(nbrs.begin(), nbrs.end());
  return j;
}

json write_event(const Event& e) {
  json j;
  j["at"] = e.at;
  j["kind"] = std::string(kind_name(e.action));
  std::visit(overloaded{
                 [&](const SetM& a) {
                   j["agent"] = a.agent;
                   j["value"] = a.value;
                 },
                 [&](const SetSignal& a) {
                   j["agent"] = a.agent;
                   j["signal"] = write_signal(a.signal);
                 },
                 [&](const AddAgent& a) {
                   j["agent"] = write_agent(a.id, a.params, a.signal);
                   if (a.initial_x) j["initial_x"] = *a.initial_x;
                 },
                 [&](const RemoveAgent& a) { j["agent"] = a.id; },
                 [&](const SetTopology& a) { j["topology"] = write_topology(a.structure); },
             },
             e.action);
  return j;
}

}  // namespace

Scenario read_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), "syntax error");
  }
  expect_object(root, "");
  allow_keys(root, "", {"horizon", "record_stride", "baseline", "initial_x", "agents", "topology", "events"});

  Scenario s;
  s.horizon = unsigned_int(require(root, "", "horizon"), "/horizon");
  if (root.contains("record_stride")) s.record_stride = unsigned_int(root["record_stride"], "/record_stride");
  if (root.contains("baseline")) s.baseline = boolean(root["baseline"], "/baseline");
  if (root.contains("initial_x")) s.initial = read_initial(root["initial_x"], "/initial_x");

  const json& agents = require(root, "", "agents");
  if (!agents.is_array()) fail("/agents", "expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string p = child("/agents", i);
    AgentEntry a = read_agent(agents[i], p);
    if (s.initial_model.params.count(a.id) != 0) fail(child(p, "id"), "duplicate agent id");
    s.initial_model.params[a.id] = a.params;
    s.initial_model.signals[a.id] = a.signal;
  }
  s.initial_model.structure = read_topology(require(root, "", "topology"), "/topology");

  if (root.contains("events")) {
    const json& events = root["events"];
    if (!events.is_array()) fail("/events", "expected an array");
    for (std::size_t i = 0; i < events.size(); ++i) s.events.push_back(read_event(events[i], child("/events", i)));
  }

  try {
    validate_scenario(s);
  } catch (const EventError& e) {
    fail(child("/events", e.index()), e.what());
  } catch (const ValidationError& e) {
    std::string where = "/";
    if (!e.violations().empty() && e.violations().front().agent) {
      const AgentId id = *e.violations().front().agent;
      where = "/topology";
      for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].contains("id") && agents[i]["id"] == id) where = child("/agents", i);
      }
    }
    fail(where, e.what());
  }
  return s;
}

Scenario read_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_scenario(ss.str());
}

std::string write_scenario(const Scenario& s) {
  json root;
  root["horizon"] = s.horizon;
  root["record_stride"] = s.record_stride;
  root["baseline"] = s.baseline;
  json init;
  init["policy"] = s.initial.policy == InitialPolicy::upper_bound ? "upper" : "mu";
  if (!s.initial.values.empty()) {
    json values = json::object();
    for (const auto& [id, x] : s.initial.values) values[std::to_string(id)] = x;
    init["values"] = values;
  }
  root["initial_x"] = init;
  json agents = json::array();
  for (const auto& [id, p] : s.initial_model.params) {
    agents.push_back(write_agent(id, p, s.initial_model.signals.at(id)));
  }
  root["agents"] = agents;
  root["topology"] = write_topology(s.initial_model.structure);
  json events = json::array();
  for (const Event& e : s.events) events.push_back(write_event(e));
  root["events"] = events;
  return root.dump(2) + "\n";
}

void write_scenario_file(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << write_scenario(s);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace minshare
