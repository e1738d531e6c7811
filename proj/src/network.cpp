#include "minshare/network.hpp"

#include <algorithm>
#include <iterator>

namespace minshare {

CommStructure::CommStructure(std::map<AgentId, AgentSet> neighborhoods)
    : neighborhoods_(std::move(neighborhoods)) {
  agents_.reserve(neighborhoods_.size());
  for (const auto& [id, nbhd] : neighborhoods_) agents_.push_back(id);

  if (neighborhoods_.empty()) {
    violations_.push_back({std::nullopt, "structure has no agents"});
  }
  for (const auto& [id, nbhd] : neighborhoods_) {
    if (nbhd.count(id) == 0) {
      violations_.push_back({id, "neighborhood does not contain the agent itself"});
    }
    for (AgentId j : nbhd) {
      if (neighborhoods_.count(j) == 0) {
        violations_.push_back({id, "neighborhood references unknown agent " + std::to_string(j)});
      }
    }
  }
}

CommStructure CommStructure::from_edges(const std::vector<AgentId>& agents,
                                        const std::vector<std::pair<AgentId, AgentId>>& edges) {
  std::map<AgentId, AgentSet> nbhd;
  for (AgentId id : agents) nbhd[id].insert(id);
  for (const auto& [a, b] : edges) {
    nbhd[a].insert(b);
    nbhd[b].insert(a);
  }
  return CommStructure(std::move(nbhd));
}

const AgentSet& CommStructure::neighborhood(AgentId id) const {
  auto it = neighborhoods_.find(id);
  if (it == neighborhoods_.end()) throw UnknownAgent(id);
  return it->second;
}

std::size_t CommStructure::index_of(AgentId id) const {
  auto it = std::lower_bound(agents_.begin(), agents_.end(), id);
  if (it == agents_.end() || *it != id) throw UnknownAgent(id);
  return static_cast<std::size_t>(std::distance(agents_.begin(), it));
}

std::size_t CommStructure::degree(AgentId id) const {
  const AgentSet& nbhd = neighborhood(id);
  return nbhd.size() - nbhd.count(id);
}

bool CommStructure::is_symmetric() const {
  for (const auto& [i, nbhd] : neighborhoods_) {
    for (AgentId j : nbhd) {
      auto it = neighborhoods_.find(j);
      if (it == neighborhoods_.end() || it->second.count(i) == 0) return false;
    }
  }
  return true;
}

std::vector<Violation> validate(const CommStructure& cs) { return cs.violations_; }

void require_valid(const CommStructure& cs) {
  if (!cs.is_valid()) throw ValidationError("invalid communication structure", validate(cs));
}

namespace {

void require_members(const CommStructure& cs, const AgentSet& seed) {
  for (AgentId id : seed) {
    if (!cs.contains(id)) throw UnknownAgent(id);
  }
}

AgentSet expand(const CommStructure& cs, const AgentSet& current) {
  AgentSet next;
  for (AgentId j : current) {
    const AgentSet& nbhd = cs.neighborhood(j);
    next.insert(nbhd.begin(), nbhd.end());
  }
  return next;
}

}  // namespace

AgentSet iterated_neighborhood(const CommStructure& cs, const AgentSet& seed, std::size_t n) {
  require_valid(cs);
  require_members(cs, seed);
  AgentSet current = seed;
  for (std::size_t k = 0; k < n; ++k) {
    AgentSet next = expand(cs, current);
    if (next == current) break;  // fixed point: all further iterates agree
    current = std::move(next);
  }
  return current;
}

AgentSet ring(const CommStructure& cs, const AgentSet& seed, int m, int n) {
  if (m < -1 || m > n) {
    throw std::invalid_argument("ring requires -1 <= m <= n, got m=" + std::to_string(m) +
                                ", n=" + std::to_string(n));
  }
  AgentSet outer = iterated_neighborhood(cs, seed, static_cast<std::size_t>(n));
  if (m < 0) return outer;
  AgentSet inner = iterated_neighborhood(cs, seed, static_cast<std::size_t>(m));
  AgentSet out;
  std::set_difference(outer.begin(), outer.end(), inner.begin(), inner.end(),
                      std::inserter(out, out.end()));
  return out;
}

std::optional<std::size_t> connectivity_radius(const CommStructure& cs, const AgentSet& seed) {
  if (seed.empty()) throw std::invalid_argument("connectivity_radius requires a non-empty seed set");
  require_valid(cs);
  require_members(cs, seed);
  AgentSet current = seed;
  for (std::size_t n = 0; n <= cs.size(); ++n) {
    if (current.size() == cs.size()) return n;
    AgentSet next = expand(cs, current);
    if (next == current) return std::nullopt;
    current = std::move(next);
  }
  return std::nullopt;
}

std::vector<AgentSet> ring_partition(const CommStructure& cs, const AgentSet& seed) {
  auto radius = connectivity_radius(cs, seed);
  if (!radius) {
    throw ValidationError("ring partition", {{std::nullopt, "structure is not " + describe(seed) +
                                                                "-connected"}});
  }
  std::vector<AgentSet> rings;
  AgentSet previous;
  AgentSet current = seed;
  for (std::size_t m = 0; m <= *radius; ++m) {
    AgentSet r;
    std::set_difference(current.begin(), current.end(), previous.begin(), previous.end(),
                        std::inserter(r, r.end()));
    rings.push_back(std::move(r));
    previous = current;
    current = expand(cs, current);
  }
  return rings;
}

CommStructure restrict_to(const CommStructure& cs, const AgentSet& keep) {
  std::map<AgentId, AgentSet> out;
  for (const auto& [id, nbhd] : cs.neighborhoods()) {
    if (keep.count(id) == 0) continue;
    AgentSet kept;
    std::set_intersection(nbhd.begin(), nbhd.end(), keep.begin(), keep.end(),
                          std::inserter(kept, kept.end()));
    out.emplace(id, std::move(kept));
  }
  return CommStructure(std::move(out));
}

}  // namespace minshare
