#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "minshare/common.hpp"
#include "minshare/dynamics.hpp"

namespace minshare {

// ---------------------------------------------------------------------------
// Escape from below

/// Bound on the number of excitation windows needed before every estimate
/// reaches M*: log(M* / mu_lower) / h_lower.
double m_star(double h_lower, double M_star, double mu_lower);

/// Worst-case settling iteration t0 + 1 + ceil(m*) * delta.
std::uint64_t settling_time_bound(std::uint64_t t0, double m_star_value, std::uint64_t delta);

// ---------------------------------------------------------------------------
// Trajectories

/// Dense trajectory: row r is the state at time t[r], column c belongs to agents[c].
struct AgentTrace {
  std::vector<AgentId> agents;
  std::vector<std::uint64_t> t;
  Eigen::MatrixXd x;

  std::size_t rows() const { return t.size(); }
  Eigen::Index column(AgentId id) const;
};

/// Earliest recorded t from which, up to the end of the trace, every estimate
/// is >= M* - tol and estimates of I* members are within tol of M*.
std::optional<std::uint64_t> detect_settling(const AgentTrace& trace, double M_star, const AgentSet& I_star,
                                             double tol);

/// Per agent, max of (x_i - M*) over the final `window` rows.
Eigen::VectorXd tail_sup_deviation(const AgentTrace& trace, double M_star, std::size_t window);

/// Per agent, max of (M* - x_i) over the final `window` rows (<= 0 once settled).
Eigen::VectorXd tail_inf_violation(const AgentTrace& trace, double M_star, std::size_t window);

/// Final 10% of a regime, at least 50 samples, never more than the regime.
std::size_t default_tail_window(std::size_t regime_length);

struct ConvergenceReport {
  std::vector<AgentId> agents;
  std::optional<std::uint64_t> settled_at;
  std::size_t window = 0;
  Eigen::VectorXd tail_sup_deviation;
  Eigen::VectorXd tail_inf_violation;
};

ConvergenceReport convergence_report(const AgentTrace& trace, double M_star, const AgentSet& I_star, double tol,
                                     std::size_t window);

// ---------------------------------------------------------------------------
// Asymptotic error bound

/// Coefficients of one ring [I*]^m \ [I*]^(m-1).
///
/// `excess` is alpha + beta - 1, carried separately so that it is exactly zero
/// when every upsilon is zero.
struct RingCoefficients {
  std::size_t index = 0;
  AgentSet members;
  double alpha = 0.0;
  double beta = 1.0;
  double excess = 0.0;
  double epsilon = 0.0;
};

struct EpsilonBound {
  double M_star = 0.0;
  AgentSet I_star;
  std::size_t radius = 0;  // n*
  std::map<AgentId, double> upsilon;
  std::map<AgentId, double> h_bar;
  std::map<AgentId, double> gamma;  // agents outside I* only
  std::map<AgentId, double> epsilon;
  std::vector<RingCoefficients> rings;
  double h_bar_min = 0.0;  // min_i h_bar_i; +inf when no agent is constrained

  /// epsilon_i * M*.
  double absolute(AgentId id) const;
  /// min{epsilon_i * M*, M_i - M*}, the bound after the projection clamp.
  double clamped(AgentId id, const NetworkModel& model) const;
  double max_epsilon() const;
};

/// Constructive asymptotic bound: given upsilon_i = limsup_t h_i^t, every
/// estimate satisfies limsup x_i <= min{M_i, (1 + epsilon_i) M*}.
///
/// Requires an I*-connected model in which every neighbor of a ring-m agent
/// lies in ring m-1, m or m+1 and at least one lies in ring m-1 (true for
/// symmetric structures). Throws CapExceeded when some upsilon_i exceeds its
/// admissible cap and BoundError for every other failed precondition.
///
/// Each ring takes the worst case over its members:
///   alpha_{m+1} = max_i alpha_i,
///   alpha_{m+1} + beta_{m+1} = max_i (alpha_i + beta_i),
/// which dominates every member's bound because limsup x_j >= M* on the next
/// ring.
EpsilonBound theoretical_epsilon_bound(const NetworkModel& model, const std::map<AgentId, double>& upsilon);

/// Same calculation with upsilon_i = value for every agent.
EpsilonBound theoretical_epsilon_bound(const NetworkModel& model, double uniform_upsilon);

/// upsilon_i taken as limsup_value of each agent's configured signal.
std::map<AgentId, double> signal_limsups(const NetworkModel& model);

/// Largest uniform cap delta (found by bisection) such that upsilon_i = delta is
/// admissible and every clamped absolute bound is <= epsilon. +inf when no
/// agent's cap is finite (e.g. a single agent).
double delta_for_epsilon(const NetworkModel& model, double epsilon);

// ---------------------------------------------------------------------------
// Finite-horizon limsup lemma

enum class LimsupOutcome { pass, bound_violated, hypothesis_violated };

struct LimsupVerdict {
  LimsupOutcome outcome = LimsupOutcome::pass;
  double tail_sup_x = 0.0;
  double bound = 0.0;
  std::optional<std::size_t> violated_at;  // first index breaking the hypothesis

  explicit operator bool() const { return outcome == LimsupOutcome::pass; }
};

/// Checks |x^{t+1}| <= lambda^t |x^t| + |y^t| with 0 <= lambda^t <= nu from
/// some index before the tail window on, then compares the tail sup of |x|
/// with sup|y| / (1 - sup lambda) + margin over the final `tail_window` samples.
LimsupVerdict limsup_bound_check(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> lambda, double nu, std::size_t tail_window,
                                 double margin);

}  // namespace minshare
