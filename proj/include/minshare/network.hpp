#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "minshare/common.hpp"

namespace minshare {

/// Per-agent neighborhoods [i] over a finite agent set.
///
/// Neighborhoods may be asymmetric. The object is immutable; invariants
/// (self-membership, no dangling ids, at least one agent) are checked once at
/// construction and reported by validate(). Every neighborhood operation below
/// refuses an invalid structure.
class CommStructure {
 public:
  CommStructure() : CommStructure(std::map<AgentId, AgentSet>{}) {}
  explicit CommStructure(std::map<AgentId, AgentSet> neighborhoods);

  /// Undirected construction: [i] = {i} plus every j sharing an edge with i.
  static CommStructure from_edges(const std::vector<AgentId>& agents,
                                  const std::vector<std::pair<AgentId, AgentId>>& edges);

  /// Agents in ascending order.
  const std::vector<AgentId>& agents() const { return agents_; }
  std::size_t size() const { return agents_.size(); }
  bool contains(AgentId id) const { return neighborhoods_.count(id) != 0; }

  const AgentSet& neighborhood(AgentId id) const;
  const std::map<AgentId, AgentSet>& neighborhoods() const { return neighborhoods_; }

  /// Position of `id` in agents().
  std::size_t index_of(AgentId id) const;

  /// card([i] \ i).
  std::size_t degree(AgentId id) const;

  bool is_valid() const { return violations_.empty(); }
  bool is_symmetric() const;

  bool operator==(const CommStructure& other) const { return neighborhoods_ == other.neighborhoods_; }

 private:
  friend std::vector<Violation> validate(const CommStructure&);

  std::map<AgentId, AgentSet> neighborhoods_;
  std::vector<AgentId> agents_;
  std::vector<Violation> violations_;
};

/// Empty when the structure is a valid communication structure; otherwise one
/// entry per missing self-loop and per dangling neighbor id.
std::vector<Violation> validate(const CommStructure& cs);

/// Throws ValidationError unless validate(cs) is empty.
void require_valid(const CommStructure& cs);

/// [I]^n, with [I]^0 = I and [I]^n the union of [j] over j in [I]^(n-1).
AgentSet iterated_neighborhood(const CommStructure& cs, const AgentSet& seed, std::size_t n);

/// [I]^n \ [I]^m for -1 <= m <= n, using [I]^-1 = {}.
AgentSet ring(const CommStructure& cs, const AgentSet& seed, int m, int n);

/// Least n with [I]^n equal to every agent, when such n <= N exists.
std::optional<std::size_t> connectivity_radius(const CommStructure& cs, const AgentSet& seed);

/// Rings [I]^m \ [I]^(m-1) for m = 0..n*. Throws ValidationError when the
/// structure is not I-connected.
std::vector<AgentSet> ring_partition(const CommStructure& cs, const AgentSet& seed);

/// The same structure restricted to `keep` (neighborhoods intersected too).
CommStructure restrict_to(const CommStructure& cs, const AgentSet& keep);

}  // namespace minshare
