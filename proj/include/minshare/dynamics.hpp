#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "minshare/common.hpp"
#include "minshare/excitation.hpp"
#include "minshare/network.hpp"

namespace minshare {

/// Private data of one agent: its value M_i, lower bound mu_i and gain k_i.
struct AgentParams {
  double value = 1.0;
  double lower_bound = 0.5;
  double gain = 0.1;

  bool operator==(const AgentParams&) const = default;
};

/// Communication structure plus per-agent parameters and excitation signals.
/// Maps are keyed by exactly the structure's agents once validated.
struct NetworkModel {
  CommStructure structure;
  std::map<AgentId, AgentParams> params;
  std::map<AgentId, SignalSpec> signals;

  bool operator==(const NetworkModel&) const = default;
};

/// 0 < k_i <= 1 / card([i] \ i) for every agent; only k_i > 0 when [i] = {i}.
std::vector<Violation> validate_gains(const NetworkModel& model);

/// Every model invariant: structure, key sets, parameter ranges, signals,
/// gains, and max_i mu_i <= min_i M_i.
std::vector<Violation> validate_model(const NetworkModel& model);
void require_valid(const NetworkModel& model);

struct TrueMinimum {
  double value = 0.0;
  AgentSet argmin;

  bool operator==(const TrueMinimum&) const = default;
};

/// M* = min_i M_i and the full argmin set I*.
TrueMinimum true_minimum(const NetworkModel& model);

/// min{max{s, lo}, hi}.
template <typename Scalar>
Scalar project(Scalar lo, Scalar hi, Scalar s) {
  if (lo > hi) throw std::invalid_argument("projection interval is empty");
  return std::min(std::max(s, lo), hi);
}

/// Validated, index-addressed form of a NetworkModel used by the update loop.
/// Entry e of every vector belongs to agents[e].
template <typename Scalar = double>
struct DenseModel {
  std::vector<AgentId> agents;
  Vector<Scalar> value;
  Vector<Scalar> lower_bound;
  Vector<Scalar> gain;
  std::vector<std::vector<Eigen::Index>> others;  // [i] \ i
  std::vector<SignalSpec> signals;

  Eigen::Index size() const { return value.size(); }
};

template <typename Scalar = double>
DenseModel<Scalar> make_dense(const NetworkModel& model) {
  require_valid(model);
  const auto& cs = model.structure;
  const auto n = static_cast<Eigen::Index>(cs.size());
  DenseModel<Scalar> dense;
  dense.agents = cs.agents();
  dense.value.resize(n);
  dense.lower_bound.resize(n);
  dense.gain.resize(n);
  dense.others.resize(static_cast<std::size_t>(n));
  dense.signals.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index e = 0; e < n; ++e) {
    const AgentId id = dense.agents[static_cast<std::size_t>(e)];
    const AgentParams& p = model.params.at(id);
    dense.value(e) = static_cast<Scalar>(p.value);
    dense.lower_bound(e) = static_cast<Scalar>(p.lower_bound);
    dense.gain(e) = static_cast<Scalar>(p.gain);
    for (AgentId j : cs.neighborhood(id)) {
      if (j != id) dense.others[static_cast<std::size_t>(e)].push_back(static_cast<Eigen::Index>(cs.index_of(j)));
    }
    dense.signals.push_back(model.signals.at(id));
  }
  return dense;
}

/// Iteration counter and estimates, entry e belonging to agents[e].
template <typename Scalar = double>
struct BasicSimState {
  std::uint64_t t = 0;
  std::vector<AgentId> agents;
  Vector<Scalar> x;

  bool operator==(const BasicSimState& other) const {
    return t == other.t && agents == other.agents && x.size() == other.x.size() && x == other.x;
  }
};

using SimState = BasicSimState<double>;

template <typename Scalar>
Vector<Scalar> excitation_at(const DenseModel<Scalar>& model, std::uint64_t t) {
  Vector<Scalar> h(model.size());
  for (Eigen::Index e = 0; e < h.size(); ++e) {
    h(e) = static_cast<Scalar>(evaluate(model.signals[static_cast<std::size_t>(e)], t));
  }
  return h;
}

/// One synchronous round of the projected excitation-driven update with the
/// excitation values `h` supplied explicitly:
///   x_i+ = proj_[mu_i, M_i]( e^{h_i} x_i + k_i sum_{j in [i]\i} (x_j - x_i) ).
/// The j = i term of the coupling sum vanishes and is skipped.
template <typename Scalar>
BasicSimState<Scalar> step(const DenseModel<Scalar>& model, const BasicSimState<Scalar>& state,
                           const Vector<Scalar>& h) {
  if (state.agents != model.agents || state.x.size() != model.size() || h.size() != model.size()) {
    throw std::invalid_argument("state is not keyed by the model's agents");
  }
  BasicSimState<Scalar> next{state.t + 1, state.agents, Vector<Scalar>(model.size())};
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    const auto& nbrs = model.others[static_cast<std::size_t>(i)];
    const Scalar xi = state.x(i);
    Scalar coupling(0);
    for (Eigen::Index j : nbrs) coupling += state.x(j) - xi;
    const Scalar growth = std::exp(h(i));
    assert(growth - model.gain(i) * static_cast<Scalar>(nbrs.size()) >= Scalar(0));
    next.x(i) = project(model.lower_bound(i), model.value(i), growth * xi + model.gain(i) * coupling);
  }
  return next;
}

/// One round with h_i evaluated from the model's signals at state.t.
template <typename Scalar>
BasicSimState<Scalar> step(const DenseModel<Scalar>& model, const BasicSimState<Scalar>& state) {
  return step(model, state, excitation_at(model, state.t));
}

/// Convenience overload; validates and densifies the model on every call.
SimState step(const NetworkModel& model, const SimState& state);

/// Max-Consensus round: x_i+ = min_{j in [i]} x_j. Entry e of `x` belongs to
/// cs.agents()[e].
template <typename Scalar>
Vector<Scalar> max_consensus_step(const CommStructure& cs, const Vector<Scalar>& x) {
  require_valid(cs);
  if (static_cast<std::size_t>(x.size()) != cs.size()) {
    throw std::invalid_argument("estimate vector is not keyed by the structure's agents");
  }
  Vector<Scalar> next(x.size());
  const auto& agents = cs.agents();
  for (std::size_t e = 0; e < agents.size(); ++e) {
    Scalar best = x(static_cast<Eigen::Index>(e));
    for (AgentId j : cs.neighborhood(agents[e])) {
      best = std::min(best, x(static_cast<Eigen::Index>(cs.index_of(j))));
    }
    next(static_cast<Eigen::Index>(e)) = best;
  }
  return next;
}

/// State at time t with entries taken from `x` by agent id.
SimState make_state(const NetworkModel& model, const std::map<AgentId, double>& x, std::uint64_t t = 0);

}  // namespace minshare
