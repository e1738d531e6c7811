// Command-line front end: run scenarios, compute bounds, check and export configurations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "minshare/analysis.hpp"
#include "minshare/scenario.hpp"

namespace fs = std::filesystem;
using namespace minshare;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIo = 2;

struct Loaded {
  Scenario scenario;
  std::optional<Scenario> mirror;  // scenario2 vanishing-signal network
};

Loaded load(const std::string& config, const std::string& builtin) {
  if (!builtin.empty() && !config.empty()) throw CLI::ValidationError("give either a config file or --builtin");
  if (builtin == "scenario1") return {builtin_scenario1(), std::nullopt};
  if (builtin == "scenario2") {
    auto [a, b] = builtin_scenario2();
    return {a, b};
  }
  if (!builtin.empty()) throw CLI::ValidationError("--builtin must be scenario1 or scenario2");
  if (config.empty()) throw CLI::ValidationError("a config file or --builtin is required");
  return {read_scenario_file(config), std::nullopt};
}

fs::path sibling(const fs::path& out, const std::string& tag) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + "." + tag + out.extension().string());
  return p;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void report_regimes(std::ostream& os, const std::string& title, const RunResult& r) {
  os << "# " << title << "\n";
  for (std::size_t k = 0; k < r.regimes.size(); ++k) {
    const Regime& g = r.regimes[k];
    os << "regime " << k << " [" << g.start << ", " << g.end << ")  M*=" << fmt(g.minimum.value)
       << "  I*=" << describe(g.minimum.argmin) << "  window=" << g.report.window << "  settled_at=";
    if (g.report.settled_at) os << *g.report.settled_at;
    else os << "none";
    os << "\n";
    for (std::size_t c = 0; c < g.report.agents.size(); ++c) {
      const auto e = static_cast<Eigen::Index>(c);
      os << "  agent " << g.report.agents[c] << "  tail_sup_deviation=" << fmt(g.report.tail_sup_deviation(e))
         << "  tail_inf_violation=" << fmt(g.report.tail_inf_violation(e)) << "\n";
    }
  }
}

int cmd_run(const std::string& config, const std::string& builtin, const std::string& out,
            std::optional<std::uint64_t> stride, bool baseline, const std::string& baseline_out,
            const std::string& report, std::optional<std::size_t> window) {
  Loaded l = load(config, builtin);
  RunOptions opts;
  opts.tail_window = window;
  auto prepare = [&](Scenario& s) {
    if (stride) s.record_stride = *stride;
    if (baseline) s.baseline = true;
  };
  prepare(l.scenario);
  const fs::path out_path(out);

  std::ostringstream text;
  RunResult r = run(l.scenario, opts);
  write_csv_file(r.trace, out_path);
  report_regimes(text, "network", r);
  if (r.baseline) {
    write_csv_file(*r.baseline, baseline_out.empty() ? sibling(out_path, "baseline") : fs::path(baseline_out));
  }
  if (l.mirror) {
    prepare(*l.mirror);
    l.mirror->baseline = false;
    RunResult m = run(*l.mirror, opts);
    write_csv_file(m.trace, sibling(out_path, "vanishing"));
    report_regimes(text, "vanishing-signal network", m);
  }
  if (report.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream f(report);
    if (!f) throw IoError("cannot open " + report + " for writing");
    f << text.str();
  }
  return kOk;
}

std::vector<std::pair<std::uint64_t, NetworkModel>> regime_models(const Scenario& s) {
  std::vector<std::pair<std::uint64_t, NetworkModel>> out{{0, s.initial_model}};
  for (std::size_t i = 0; i < s.events.size();) {
    std::size_t j = i;
    std::vector<Event> batch;
    while (j < s.events.size() && s.events[j].at == s.events[i].at) batch.push_back(s.events[j++]);
    out.emplace_back(s.events[i].at, apply_events(out.back().second, batch, i));
    i = j;
  }
  return out;
}

int cmd_bounds(const std::string& config, const std::string& builtin, double epsilon) {
  Loaded l = load(config, builtin);
  int status = kOk;
  for (const auto& [t, model] : regime_models(l.scenario)) {
    const TrueMinimum tm = true_minimum(model);
    std::cout << "regime from t=" << t << "  M*=" << fmt(tm.value) << "  I*=" << describe(tm.argmin) << "\n";
    try {
      std::cout << "  delta(" << fmt(epsilon) << ") = " << fmt(delta_for_epsilon(model, epsilon)) << "\n";
      const EpsilonBound b = theoretical_epsilon_bound(model, signal_limsups(model));
      for (const auto& [id, e] : b.epsilon) {
        std::cout << "  agent " << id << "  upsilon=" << fmt(b.upsilon.at(id)) << "  h_bar=" << fmt(b.h_bar.at(id))
                  << "  epsilon=" << fmt(e) << "  absolute=" << fmt(b.clamped(id, model)) << "\n";
      }
    } catch (const BoundError& e) {
      std::cout << "  bound unavailable: " << e.what() << "\n";
      status = kInvalid;
    }
  }
  return status;
}

int cmd_check(const std::string& config, const std::string& builtin) {
  Loaded l = load(config, builtin);
  for (const auto& [t, model] : regime_models(l.scenario)) {
    const TrueMinimum tm = true_minimum(model);
    std::cout << "regime from t=" << t << ": structure ok, gains ok, max mu <= min M ok, M*=" << fmt(tm.value)
              << "\n";
    if (!connectivity_radius(model.structure, tm.argmin)) {
      std::cout << "  warning: not connected from the minimizers " << describe(tm.argmin) << "\n";
    }
    std::vector<SignalSpec> specs;
    for (const auto& [id, s] : model.signals) specs.push_back(s);
    if (auto cert = uniform_excitation_certificate(specs)) {
      std::cout << "  uniformly exciting: h_lower=" << fmt(cert->h_lower) << " delta=" << cert->delta_window << "\n";
    } else {
      std::cout << "  no uniform excitation certificate\n";
    }
  }
  return kOk;
}

int cmd_export(const std::string& builtin, const std::string& out, bool mirror) {
  Loaded l = load("", builtin);
  if (mirror && !l.mirror) throw CLI::ValidationError("--vanishing only applies to scenario2");
  write_scenario_file(mirror ? *l.mirror : l.scenario, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed minimum-sharing simulator"};
  app.require_subcommand(1);

  std::string config, builtin, out, baseline_out, report;
  std::optional<std::uint64_t> stride;
  std::optional<std::size_t> window;
  bool baseline = false;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write its trace as CSV");
  run_cmd->add_option("config", config, "scenario configuration (JSON)");
  run_cmd->add_option("--builtin", builtin, "scenario1 or scenario2");
  run_cmd->add_option("--out", out, "trace CSV")->required();
  run_cmd->add_option("--stride", stride, "record every N-th step");
  run_cmd->add_flag("--baseline", baseline, "also run Max-Consensus");
  run_cmd->add_option("--baseline-out", baseline_out, "Max-Consensus trace CSV");
  run_cmd->add_option("--report", report, "write the regime report here instead of stdout");
  run_cmd->add_option("--window", window, "tail window in steps");

  double epsilon = 0.0;
  auto* bounds_cmd = app.add_subcommand("bounds", "asymptotic error bounds per regime");
  bounds_cmd->add_option("config", config, "scenario configuration (JSON)");
  bounds_cmd->add_option("--builtin", builtin, "scenario1 or scenario2");
  bounds_cmd->add_option("--epsilon", epsilon, "target absolute error")->required()->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "validate a configuration");
  check_cmd->add_option("config", config, "scenario configuration (JSON)");
  check_cmd->add_option("--builtin", builtin, "scenario1 or scenario2");

  bool mirror = false;
  auto* export_cmd = app.add_subcommand("export", "write a built-in scenario as JSON");
  export_cmd->add_option("--builtin", builtin, "scenario1 or scenario2")->required();
  export_cmd->add_option("--out", out, "output file")->required();
  export_cmd->add_flag("--vanishing", mirror, "export the vanishing-signal network of scenario2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*run_cmd) return cmd_run(config, builtin, out, stride, baseline, baseline_out, report, window);
    if (*bounds_cmd) return cmd_bounds(config, builtin, epsilon);
    if (*check_cmd) return cmd_check(config, builtin);
    if (*export_cmd) return cmd_export(builtin, out, mirror);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
