#include "axsynth/metrics/tree_metrics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "../json_util.h"
#include "axsynth/errors.h"
#include "axsynth/geometry.h"

namespace axsynth {
namespace {

struct IndexedTree {
  std::vector<const AXNode*> nodes;  // preorder
  std::vector<int> parent;           // -1 for the root
  std::vector<std::vector<int>> children;

  explicit IndexedTree(const AXNode& root) { add(root, -1); }

  int add(const AXNode& n, int parent_index) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(&n);
    parent.push_back(parent_index);
    children.emplace_back();
    if (parent_index >= 0) children[parent_index].push_back(id);
    for (const AXNode& c : n.children) add(c, id);
    return id;
  }

  std::size_t size() const { return nodes.size(); }
  bool is_leaf(int i) const { return children[i].empty(); }
  std::size_t edge_count() const { return nodes.size() - 1; }
};

// Rank of every node after sorting by (y, x, preorder index).
std::vector<int> reading_rank(const std::vector<int>& ids,
                              const IndexedTree& t) {
  std::vector<int> order = ids;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const BBox& ba = t.nodes[a]->bbox;
    const BBox& bb = t.nodes[b]->bbox;
    return std::tie(ba.y, ba.x) < std::tie(bb.y, bb.x);
  });
  std::vector<int> rank(t.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  return rank;
}

struct Match {
  std::vector<int> pred_to_gt;
  std::vector<double> gt_iou;
};

// Greedy one-to-one matching among the given node subsets. Pairs need IoU at
// least `min_iou` (strictly positive when `min_iou` is 0).
Match greedy_match(const IndexedTree& pred, const std::vector<int>& pred_ids,
                   const IndexedTree& gt, const std::vector<int>& gt_ids,
                   double min_iou) {
  const auto prank = reading_rank(pred_ids, pred);
  const auto grank = reading_rank(gt_ids, gt);
  struct Pair {
    double iou;
    int p, g;
  };
  std::vector<Pair> pairs;
  for (int p : pred_ids) {
    for (int g : gt_ids) {
      const double v = iou(pred.nodes[p]->bbox, gt.nodes[g]->bbox);
      if (v > 0 && v >= min_iou) pairs.push_back({v, p, g});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (prank[a.p] != prank[b.p]) return prank[a.p] < prank[b.p];
    return grank[a.g] < grank[b.g];
  });
  Match m{std::vector<int>(pred.size(), -1),
          std::vector<double>(gt.size(), 0.0)};
  std::vector<bool> gt_taken(gt.size(), false);
  for (const Pair& pr : pairs) {
    if (m.pred_to_gt[pr.p] >= 0 || gt_taken[pr.g]) continue;
    m.pred_to_gt[pr.p] = pr.g;
    gt_taken[pr.g] = true;
    m.gt_iou[pr.g] = pr.iou;
  }
  return m;
}

std::vector<int> all_ids(const IndexedTree& t) {
  std::vector<int> ids(t.size());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

bool same_shape(const AXNode& a, const AXNode& b) {
  if (a.role != b.role || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_shape(a.children[i], b.children[i])) return false;
  }
  return true;
}

double ratio(std::size_t num, std::size_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

// ---------------------------------------------------------------------------
// Graph edit distance.

constexpr double kInf = 1e18;

// Hungarian algorithm on a square matrix; returns column assigned to each row,
// or nullopt when the deadline passes.
template <typename Clock>
std::optional<std::vector<int>> solve_lsap(
    const std::vector<std::vector<double>>& a,
    typename Clock::time_point deadline) {
  const int n = static_cast<int>(a.size());
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    if (Clock::now() >= deadline) return std::nullopt;
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j]) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

class GedSearch {
 public:
  using Clock = std::chrono::steady_clock;

  GedSearch(const IndexedTree& g1, const IndexedTree& g2,
            Clock::time_point deadline)
      : g1_(g1), g2_(g2), deadline_(deadline) {
    n1_ = static_cast<int>(g1.size());
    n2_ = static_cast<int>(g2.size());
    phi_.assign(n1_, -1);
    inv_.assign(n2_, -1);
    for (int i = 0; i < n1_; ++i) cnt1_[role_index(g1, i)]++;
    for (int j = 0; j < n2_; ++j) cnt2_[role_index(g2, j)]++;
    e1_rem_ = static_cast<long>(g1.edge_count());
    e2_rem_ = static_cast<long>(g2.edge_count());
  }

  // Returns false when the deadline passed before a first path was found.
  bool run(bool refine) {
    const auto lsap = initial_assignment();
    if (!lsap) return false;
    hint_ = std::move(*lsap);
    refine_ = refine;
    dfs(0, 0.0);
    return found_;
  }

  double best() const { return best_; }
  bool exhausted() const { return !aborted_; }

 private:
  static constexpr int kEps = -1;

  static int role_index(const IndexedTree& t, int i) {
    return static_cast<int>(t.nodes[i]->role);
  }

  double sub_cost(int u, int v) const {
    return g1_.nodes[u]->role == g2_.nodes[v]->role ? 0.0 : 1.0;
  }

  double parent_role_mismatch(int u, int v) const {
    const int pu = g1_.parent[u], pv = g2_.parent[v];
    if (pu < 0 || pv < 0) return 0.0;
    return g1_.nodes[pu]->role == g2_.nodes[pv]->role ? 0.0 : 1.0;
  }

  std::optional<std::vector<int>> initial_assignment() const {
    const int n = n1_ + n2_;
    std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
    const double big = 1e9;
    // Geometric tie-break, kept below the smallest structural difference.
    const double tie = 0.4 / static_cast<double>(n);
    auto deg1 = [&](int u) {
      return static_cast<double>(g1_.children[u].size() + (g1_.parent[u] >= 0));
    };
    auto deg2 = [&](int v) {
      return static_cast<double>(g2_.children[v].size() + (g2_.parent[v] >= 0));
    };
    for (int u = 0; u < n1_; ++u) {
      for (int v = 0; v < n2_; ++v) {
        const double dout = std::fabs(static_cast<double>(g1_.children[u].size()) -
                                      static_cast<double>(g2_.children[v].size()));
        const double din = std::fabs(static_cast<double>(g1_.parent[u] >= 0) -
                                     static_cast<double>(g2_.parent[v] >= 0));
        c[u][v] = sub_cost(u, v) + 0.5 * (dout + din) +
                  0.5 * parent_role_mismatch(u, v) +
                  tie * (1.0 - iou(g1_.nodes[u]->bbox, g2_.nodes[v]->bbox));
      }
      for (int k = 0; k < n1_; ++k) c[u][n2_ + k] = k == u ? 1.0 + 0.5 * deg1(u) : big;
    }
    for (int v = 0; v < n2_; ++v) {
      for (int k = 0; k < n2_; ++k) c[n1_ + v][k] = k == v ? 1.0 + 0.5 * deg2(v) : big;
    }
    auto rows = solve_lsap<Clock>(c, deadline_);
    if (!rows) return std::nullopt;
    std::vector<int> hint(n1_, kEps);
    for (int u = 0; u < n1_; ++u) {
      if ((*rows)[u] < n2_) hint[u] = (*rows)[u];
    }
    return hint;
  }

  // Cost added by mapping u (whose parent is already mapped) to v or kEps.
  double step_cost(int u, int v) const {
    const int pu = g1_.parent[u];
    if (v == kEps) return 1.0 + (pu >= 0 ? 1.0 : 0.0);
    double cost = sub_cost(u, v);
    bool e1_preserved = false;
    const int pv = g2_.parent[v];
    if (pu >= 0) {
      e1_preserved = pv >= 0 && phi_[pu] == pv;
      if (!e1_preserved) cost += 1.0;
    }
    // Ground-truth edges whose other endpoint is already used.
    if (pv >= 0 && inv_[pv] >= 0 && !e1_preserved) cost += 1.0;
    for (int c : g2_.children[v]) {
      if (inv_[c] >= 0 && g1_.parent[inv_[c]] != u) cost += 1.0;
    }
    return cost;
  }

  int used_neighbors2(int v) const {
    int k = 0;
    if (g2_.parent[v] >= 0 && inv_[g2_.parent[v]] >= 0) ++k;
    for (int c : g2_.children[v]) k += inv_[c] >= 0;
    return k;
  }

  double lower_bound(int next) const {
    const long r1 = n1_ - next;
    const long r2 = n2_ - used2_;
    long common = 0;
    for (std::size_t r = 0; r < cnt1_.size(); ++r) common += std::min(cnt1_[r], cnt2_[r]);
    return static_cast<double>(std::max(r1, r2) - common) +
           static_cast<double>(std::labs(e1_rem_ - e2_rem_));
  }

  void assign(int u, int v) {
    phi_[u] = v;
    cnt1_[role_index(g1_, u)]--;
    e1_rem_ -= static_cast<long>(g1_.children[u].size());
    if (v != kEps) {
      const int unused_nb = static_cast<int>(g2_.children[v].size()) +
                            (g2_.parent[v] >= 0) - used_neighbors2(v);
      e2_rem_ -= unused_nb;
      both_used2_ += used_neighbors2(v);
      inv_[v] = u;
      cnt2_[role_index(g2_, v)]--;
      ++used2_;
    }
  }

  void unassign(int u) {
    const int v = phi_[u];
    phi_[u] = -1;
    cnt1_[role_index(g1_, u)]++;
    e1_rem_ += static_cast<long>(g1_.children[u].size());
    if (v != kEps) {
      inv_[v] = -1;
      const int used_nb = used_neighbors2(v);
      both_used2_ -= used_nb;
      e2_rem_ += static_cast<int>(g2_.children[v].size()) +
                 (g2_.parent[v] >= 0) - used_nb;
      cnt2_[role_index(g2_, v)]++;
      --used2_;
    }
  }

  bool out_of_time() {
    if ((++expansions_ & 0x3ff) == 0 && Clock::now() >= deadline_) aborted_ = true;
    return aborted_;
  }

  void dfs(int u, double g) {
    if (done_ || out_of_time()) return;
    if (u == n1_) {
      const double total = g + static_cast<double>(n2_ - used2_) +
                           static_cast<double>(static_cast<long>(g2_.edge_count()) - both_used2_);
      if (!found_ || total < best_) best_ = total;
      found_ = true;
      if (!refine_) done_ = true;
      return;
    }
    struct Cand {
      double cost;
      int v;
    };
    std::vector<Cand> cands;
    cands.reserve(n2_ + 1);
    int hinted = hint_[u];
    if (hinted != kEps && inv_[hinted] >= 0) hinted = kEps;
    cands.push_back({step_cost(u, hinted), hinted});
    for (int v = 0; v < n2_; ++v) {
      if (inv_[v] < 0 && v != hinted) cands.push_back({step_cost(u, v), v});
    }
    if (hinted != kEps) cands.push_back({step_cost(u, kEps), kEps});
    std::stable_sort(cands.begin() + 1, cands.end(),
                     [](const Cand& a, const Cand& b) { return a.cost < b.cost; });
    for (const Cand& c : cands) {
      if (found_) {
        assign(u, c.v);
        const double bound = g + c.cost + lower_bound(u + 1);
        unassign(u);
        if (bound >= best_) continue;
      }
      assign(u, c.v);
      dfs(u + 1, g + c.cost);
      unassign(u);
      if (done_ || aborted_) return;
    }
  }

  const IndexedTree& g1_;
  const IndexedTree& g2_;
  Clock::time_point deadline_;
  int n1_ = 0, n2_ = 0;
  std::vector<int> phi_, inv_, hint_;
  std::array<long, 64> cnt1_{}, cnt2_{};
  long e1_rem_ = 0, e2_rem_ = 0, both_used2_ = 0;
  int used2_ = 0;
  bool refine_ = false, found_ = false, done_ = false, aborted_ = false;
  double best_ = 0;
  unsigned long expansions_ = 0;
};

}  // namespace

EdgeScores edge_f1(const AXNode& pred, const AXNode& gt, double match_iou) {
  if (!(match_iou > 0.0 && match_iou <= 1.0)) {
    throw ValidationError("edge_f1: match_iou must lie in (0,1]");
  }
  const IndexedTree p(pred), g(gt);
  const Match m = greedy_match(p, all_ids(p), g, all_ids(g), match_iou);
  EdgeScores s;

  std::size_t edge_tp = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    const int gc = m.pred_to_gt[c];
    const int gp = m.pred_to_gt[p.parent[c]];
    if (gc >= 0 && gp >= 0 && g.parent[gc] == gp) ++edge_tp;
  }
  if (p.edge_count() == 0 && g.edge_count() == 0) {
    const double v = m.pred_to_gt[0] == 0 ? 1.0 : 0.0;
    s.edge_precision = s.edge_recall = s.edge_f1 = v;
  } else {
    s.edge_precision = ratio(edge_tp, p.edge_count());
    s.edge_recall = ratio(edge_tp, g.edge_count());
    s.edge_f1 = f1_of(s.edge_precision, s.edge_recall);
  }

  std::size_t pred_leaves = 0, gt_leaves = 0, leaf_tp = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.is_leaf(static_cast<int>(i))) continue;
    ++pred_leaves;
    const int gi = m.pred_to_gt[i];
    if (gi >= 0 && g.is_leaf(gi)) ++leaf_tp;
  }
  for (std::size_t i = 0; i < g.size(); ++i) gt_leaves += g.is_leaf(static_cast<int>(i));
  s.leaf_precision = ratio(leaf_tp, pred_leaves);
  s.leaf_recall = ratio(leaf_tp, gt_leaves);
  s.leaves_f1 = f1_of(s.leaf_precision, s.leaf_recall);
  return s;
}

double container_match(const AXNode& pred, const AXNode& gt) {
  const IndexedTree p(pred), g(gt);
  auto intermediates = [](const IndexedTree& t) {
    std::vector<int> ids;
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (!t.is_leaf(static_cast<int>(i))) ids.push_back(static_cast<int>(i));
    }
    return ids;
  };
  const auto pi = intermediates(p);
  const auto gi = intermediates(g);
  if (gi.empty()) return pi.empty() ? 1.0 : 0.0;
  const Match m = greedy_match(p, pi, g, gi, 0.0);
  double sum = 0;
  for (int id : gi) sum += m.gt_iou[id];
  return sum / static_cast<double>(gi.size());
}

GedResult ged_upper_bound(const AXNode& pred, const AXNode& gt,
                          const GedOptions& options) {
  if (!(options.time_budget.count() > 0)) {
    throw ValidationError("ged_upper_bound: time budget must be positive");
  }
  const auto start = GedSearch::Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<GedSearch::Clock::duration>(options.time_budget);
  GedResult r;
  if (same_shape(pred, gt)) {
    r.proven_optimal = true;
    return r;
  }
  const IndexedTree p(pred), g(gt);
  if (GedSearch::Clock::now() >= deadline) {
    r.ged = static_cast<double>(g.edge_count());
    r.is_fallback = true;
    return r;
  }
  GedSearch search(p, g, deadline);
  if (!search.run(options.refine)) {
    r.ged = static_cast<double>(g.edge_count());
    r.is_fallback = true;
    return r;
  }
  r.ged = search.best();
  r.proven_optimal = options.refine && search.exhausted();
  if (r.ged == 0) r.proven_optimal = true;
  return r;
}

TreeReport evaluate_tree(const AXNode& pred, const AXNode& gt,
                         const TreeEvalOptions& options) {
  TreeReport r;
  const EdgeScores e = edge_f1(pred, gt, options.match_iou);
  r.edge_f1 = e.edge_f1;
  r.leaves_f1 = e.leaves_f1;
  const GedResult ged = ged_upper_bound(pred, gt, options.ged);
  r.ged = ged.ged;
  r.ged_is_fallback = ged.is_fallback;
  r.container_match = container_match(pred, gt);
  return r;
}

std::string to_json(const TreeReport& r) {
  detail::Json j = detail::Json::object();
  j["edge_f1"] = r.edge_f1;
  j["leaves_f1"] = r.leaves_f1;
  j["ged"] = detail::number_to_json(r.ged);
  j["ged_is_fallback"] = r.ged_is_fallback;
  j["container_match"] = r.container_match;
  return j.dump(2);
}

}  // namespace axsynth
