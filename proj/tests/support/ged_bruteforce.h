#pragma once

// Exhaustive graph edit distance for small trees: every partial injective
// node mapping is one edit path, scored from scratch.

#include <algorithm>
#include <functional>
#include <set>
#include <utility>
#include <vector>

#include "axsynth/tree.h"

namespace axsynth::testing {

struct SmallGraph {
  std::vector<Role> roles;
  std::set<std::pair<int, int>> edges;
};

inline SmallGraph to_graph(const AXNode& root) {
  SmallGraph g;
  std::function<int(const AXNode&)> walk = [&](const AXNode& n) {
    const int id = static_cast<int>(g.roles.size());
    g.roles.push_back(n.role);
    for (const AXNode& c : n.children) g.edges.insert({id, walk(c)});
    return id;
  };
  walk(root);
  return g;
}

inline int mapping_cost(const SmallGraph& a, const SmallGraph& b,
                        const std::vector<int>& phi) {
  int cost = 0;
  std::vector<bool> used(b.roles.size(), false);
  for (std::size_t u = 0; u < phi.size(); ++u) {
    if (phi[u] < 0) {
      cost += 1;
    } else {
      used[phi[u]] = true;
      cost += a.roles[u] != b.roles[phi[u]];
    }
  }
  for (bool x : used) cost += !x;
  for (auto [s, t] : a.edges) {
    const bool kept = phi[s] >= 0 && phi[t] >= 0 && b.edges.count({phi[s], phi[t]});
    cost += !kept;
  }
  std::vector<int> inv(b.roles.size(), -1);
  for (std::size_t u = 0; u < phi.size(); ++u) {
    if (phi[u] >= 0) inv[phi[u]] = static_cast<int>(u);
  }
  for (auto [s, t] : b.edges) {
    const bool kept = inv[s] >= 0 && inv[t] >= 0 && a.edges.count({inv[s], inv[t]});
    cost += !kept;
  }
  return cost;
}

inline int exact_ged(const AXNode& pred, const AXNode& gt) {
  const SmallGraph a = to_graph(pred), b = to_graph(gt);
  std::vector<int> phi(a.roles.size(), -1);
  std::vector<bool> used(b.roles.size(), false);
  int best = 1 << 30;
  std::function<void(std::size_t)> rec = [&](std::size_t u) {
    if (u == phi.size()) {
      best = std::min(best, mapping_cost(a, b, phi));
      return;
    }
    phi[u] = -1;
    rec(u + 1);
    for (std::size_t v = 0; v < b.roles.size(); ++v) {
      if (used[v]) continue;
      used[v] = true;
      phi[u] = static_cast<int>(v);
      rec(u + 1);
      used[v] = false;
    }
    phi[u] = -1;
  };
  rec(0);
  return best;
}

}  // namespace axsynth::testing
