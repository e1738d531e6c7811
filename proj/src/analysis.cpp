#include "minshare/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace minshare {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Absorbs rounding when the lemma's hypothesis is evaluated on simulated data.
constexpr double kHypothesisSlack = 1e-12;

// Reusable feasibility probe for delta_for_epsilon.
bool within(const NetworkModel& model, double upsilon, double epsilon, double* cap = nullptr) {
  try {
    const EpsilonBound b = theoretical_epsilon_bound(model, upsilon);
    if (cap) *cap = b.h_bar_min;
    for (AgentId id : model.structure.agents()) {
      if (b.clamped(id, model) > epsilon) return false;
    }
    return true;
  } catch (const CapExceeded&) {
    return false;
  }
}

}  // namespace

double m_star(double h_lower, double M_star, double mu_lower) {
  if (!(h_lower > 0.0)) throw std::invalid_argument("m_star requires h_lower > 0");
  if (!(mu_lower > 0.0) || !(mu_lower <= M_star)) {
    throw std::invalid_argument("m_star requires 0 < mu_lower <= M_star");
  }
  return std::log(M_star / mu_lower) / h_lower;
}

std::uint64_t settling_time_bound(std::uint64_t t0, double m_star_value, std::uint64_t delta) {
  if (!(m_star_value >= 0.0) || !std::isfinite(m_star_value)) {
    throw std::invalid_argument("settling_time_bound requires a finite m* >= 0");
  }
  return t0 + 1 + static_cast<std::uint64_t>(std::ceil(m_star_value)) * delta;
}

Eigen::Index AgentTrace::column(AgentId id) const {
  auto it = std::find(agents.begin(), agents.end(), id);
  if (it == agents.end()) throw UnknownAgent(id);
  return static_cast<Eigen::Index>(it - agents.begin());
}

std::optional<std::uint64_t> detect_settling(const AgentTrace& trace, double M_star, const AgentSet& I_star,
                                             double tol) {
  if (trace.rows() == 0) throw std::invalid_argument("detect_settling requires a non-empty trace");
  if (!(tol >= 0.0)) throw std::invalid_argument("detect_settling requires tol >= 0");
  std::vector<Eigen::Index> star;
  for (AgentId id : I_star) star.push_back(trace.column(id));

  auto settled = [&](Eigen::Index r) {
    for (Eigen::Index c = 0; c < trace.x.cols(); ++c) {
      if (!(trace.x(r, c) >= M_star - tol)) return false;
    }
    for (Eigen::Index c : star) {
      if (!(std::abs(trace.x(r, c) - M_star) <= tol)) return false;
    }
    return true;
  };

  auto r = static_cast<Eigen::Index>(trace.rows());
  while (r > 0 && settled(r - 1)) --r;
  if (r == static_cast<Eigen::Index>(trace.rows())) return std::nullopt;
  return trace.t[static_cast<std::size_t>(r)];
}

Eigen::VectorXd tail_sup_deviation(const AgentTrace& trace, double M_star, std::size_t window) {
  if (window == 0 || window > trace.rows()) {
    throw std::invalid_argument("tail window must lie in 1.." + std::to_string(trace.rows()));
  }
  const auto w = static_cast<Eigen::Index>(window);
  return (trace.x.bottomRows(w).array() - M_star).colwise().maxCoeff().transpose();
}

Eigen::VectorXd tail_inf_violation(const AgentTrace& trace, double M_star, std::size_t window) {
  if (window == 0 || window > trace.rows()) {
    throw std::invalid_argument("tail window must lie in 1.." + std::to_string(trace.rows()));
  }
  const auto w = static_cast<Eigen::Index>(window);
  return (M_star - trace.x.bottomRows(w).array()).colwise().maxCoeff().transpose();
}

std::size_t default_tail_window(std::size_t regime_length) {
  return std::min(regime_length, std::max<std::size_t>(50, regime_length / 10));
}

ConvergenceReport convergence_report(const AgentTrace& trace, double M_star, const AgentSet& I_star, double tol,
                                     std::size_t window) {
  ConvergenceReport r;
  r.agents = trace.agents;
  r.settled_at = detect_settling(trace, M_star, I_star, tol);
  r.window = window;
  r.tail_sup_deviation = tail_sup_deviation(trace, M_star, window);
  r.tail_inf_violation = tail_inf_violation(trace, M_star, window);
  return r;
}

double EpsilonBound::absolute(AgentId id) const {
  auto it = epsilon.find(id);
  if (it == epsilon.end()) throw UnknownAgent(id);
  return it->second * M_star;
}

double EpsilonBound::clamped(AgentId id, const NetworkModel& model) const {
  auto it = model.params.find(id);
  if (it == model.params.end()) throw UnknownAgent(id);
  return std::min(absolute(id), it->second.value - M_star);
}

double EpsilonBound::max_epsilon() const {
  double best = 0.0;
  for (const auto& [id, e] : epsilon) best = std::max(best, e);
  return best;
}

EpsilonBound theoretical_epsilon_bound(const NetworkModel& model, const std::map<AgentId, double>& upsilon) {
  require_valid(model);
  const CommStructure& cs = model.structure;
  for (AgentId id : cs.agents()) {
    auto it = upsilon.find(id);
    if (it == upsilon.end()) throw BoundError("no upsilon given for agent " + std::to_string(id));
    if (!(it->second >= 0.0) || !std::isfinite(it->second)) {
      throw BoundError("upsilon of agent " + std::to_string(id) + " must be finite and >= 0");
    }
  }

  EpsilonBound out;
  const TrueMinimum tm = true_minimum(model);
  out.M_star = tm.value;
  out.I_star = tm.argmin;
  for (AgentId id : cs.agents()) out.upsilon[id] = upsilon.at(id);

  std::vector<AgentSet> rings;
  try {
    rings = ring_partition(cs, tm.argmin);
  } catch (const ValidationError&) {
    throw BoundError("the structure is not connected from the minimizers");
  }
  out.radius = rings.size() - 1;

  std::map<AgentId, std::size_t> ring_of;
  for (std::size_t m = 0; m < rings.size(); ++m) {
    for (AgentId id : rings[m]) ring_of[id] = m;
  }

  // Each ring agent must see the previous ring and nothing beyond its neighbors.
  for (std::size_t m = 1; m < rings.size(); ++m) {
    for (AgentId id : rings[m]) {
      bool sees_previous = false;
      for (AgentId j : cs.neighborhood(id)) {
        const std::size_t rj = ring_of.at(j);
        if (rj + 1 < m || rj > m + 1) {
          throw BoundError("neighbor " + std::to_string(j) + " of agent " + std::to_string(id) +
                           " lies outside the adjacent rings");
        }
        sees_previous = sees_previous || rj + 1 == m;
      }
      if (!sees_previous) {
        throw BoundError("agent " + std::to_string(id) + " has no neighbor in the previous ring");
      }
    }
  }

  double k_min = kInf;
  for (const auto& [id, p] : model.params) k_min = std::min(k_min, p.gain);

  auto first_cap = [&](AgentId id) {
    const std::size_t d = cs.degree(id);
    if (d == 0) return kInf;
    return 0.5 * std::log1p(model.params.at(id).gain * static_cast<double>(d));
  };

  for (AgentId id : rings[0]) {
    const double cap = first_cap(id);
    out.h_bar[id] = cap;
    if (out.upsilon[id] > cap) throw CapExceeded(id, out.upsilon[id], cap);
  }

  out.rings.push_back({0, rings[0], 0.0, 1.0, 0.0, 0.0});
  for (std::size_t m = 0; m + 1 < rings.size(); ++m) {
    const double alpha = out.rings[m].alpha;
    const double excess = out.rings[m].excess;
    const double nu2 = 0.5 * k_min * (1.0 - alpha);

    double next_alpha = 0.0;
    double next_excess = 0.0;
    for (AgentId id : rings[m + 1]) {
      const double k = model.params.at(id).gain;
      const auto d = static_cast<double>(cs.degree(id));
      const double v = out.upsilon[id];

      const double cap = std::min(first_cap(id), std::log1p(k * (1.0 - alpha) - nu2));
      out.h_bar[id] = cap;
      if (v > cap) throw CapExceeded(id, v, cap);

      const double g = std::expm1(v);
      const double gamma = k / (k * d - g);
      out.gamma[id] = gamma;

      double n1 = 0.0, n2 = 0.0, n3 = 0.0;
      for (AgentId j : cs.neighborhood(id)) {
        const std::size_t rj = ring_of.at(j);
        if (rj == m) n1 += 1.0;
        else if (rj == m + 2) n3 += 1.0;
        else if (j != id) n2 += 1.0;
      }
      const double den = 1.0 - gamma * (n1 * alpha + n2);
      next_alpha = std::max(next_alpha, gamma * n3 / den);
      next_excess = std::max(next_excess, (gamma * n1 * excess + g / (k * d - g)) / den);
    }
    if (!(next_alpha < 1.0)) {
      throw BoundError("ring coefficient alpha_" + std::to_string(m + 1) + " = " + std::to_string(next_alpha) +
                       " is not below one");
    }
    out.rings.push_back({m + 1, rings[m + 1], next_alpha, next_excess + 1.0 - next_alpha, next_excess, 0.0});
  }

  double carried = 0.0;
  for (std::size_t m = out.rings.size(); m-- > 1;) {
    RingCoefficients& r = out.rings[m];
    r.epsilon = r.alpha * carried + r.excess;
    carried = r.epsilon;
  }
  for (const RingCoefficients& r : out.rings) {
    for (AgentId id : r.members) out.epsilon[id] = r.epsilon;
  }

  out.h_bar_min = kInf;
  for (const auto& [id, cap] : out.h_bar) out.h_bar_min = std::min(out.h_bar_min, cap);
  return out;
}

EpsilonBound theoretical_epsilon_bound(const NetworkModel& model, double uniform_upsilon) {
  std::map<AgentId, double> upsilon;
  for (AgentId id : model.structure.agents()) upsilon[id] = uniform_upsilon;
  return theoretical_epsilon_bound(model, upsilon);
}

std::map<AgentId, double> signal_limsups(const NetworkModel& model) {
  std::map<AgentId, double> out;
  for (const auto& [id, s] : model.signals) out[id] = limsup_value(s);
  return out;
}

double delta_for_epsilon(const NetworkModel& model, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("delta_for_epsilon requires epsilon > 0");
  double cap = kInf;
  within(model, 0.0, epsilon, &cap);
  if (!std::isfinite(cap)) return cap;
  if (within(model, cap, epsilon)) return cap;

  double lo = 0.0;
  double hi = cap;
  for (int iter = 0; iter < 100 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (within(model, mid, epsilon) ? lo : hi) = mid;
  }
  return lo;
}

LimsupVerdict limsup_bound_check(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> lambda, double nu, std::size_t tail_window,
                                 double margin) {
  if (x.size() != y.size() || x.size() != lambda.size()) {
    throw std::invalid_argument("x, y and lambda sequences must have equal length");
  }
  if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in [0, 1)");
  if (tail_window == 0 || tail_window > x.size()) {
    throw std::invalid_argument("tail window must lie in 1.." + std::to_string(x.size()));
  }
  const std::size_t n = x.size();
  const std::size_t tail_start = n - tail_window;

  LimsupVerdict v;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double rhs = lambda[t] * std::abs(x[t]) + std::abs(y[t]);
    const bool ok = lambda[t] >= 0.0 && std::abs(x[t + 1]) <= rhs + kHypothesisSlack * std::max(1.0, std::abs(rhs));
    if (!ok) {
      v.outcome = LimsupOutcome::hypothesis_violated;
      v.violated_at = t;
      return v;
    }
  }
  std::size_t last_above = 0;
  bool any_above = false;
  for (std::size_t t = 0; t < n; ++t) {
    if (lambda[t] > nu) {
      last_above = t;
      any_above = true;
    }
  }
  if (any_above && last_above >= tail_start) {
    v.outcome = LimsupOutcome::hypothesis_violated;
    v.violated_at = last_above;
    return v;
  }

  double sup_x = 0.0, sup_y = 0.0, sup_l = 0.0;
  for (std::size_t t = tail_start; t < n; ++t) {
    sup_x = std::max(sup_x, std::abs(x[t]));
    sup_y = std::max(sup_y, std::abs(y[t]));
    sup_l = std::max(sup_l, lambda[t]);
  }
  v.tail_sup_x = sup_x;
  v.bound = sup_y / (1.0 - sup_l) + margin;
  v.outcome = sup_x <= v.bound ? LimsupOutcome::pass : LimsupOutcome::bound_violated;
  return v;
}

}  // namespace minshare
