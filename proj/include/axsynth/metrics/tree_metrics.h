#pragma once

#include <chrono>
#include <string>

#include "axsynth/tree.h"

namespace axsynth {

struct EdgeScores {
  double edge_precision = 0, edge_recall = 0, edge_f1 = 0;
  double leaf_precision = 0, leaf_recall = 0, leaves_f1 = 0;
};

// Nodes are matched one-to-one by bbox IoU >= match_iou (roles ignored),
// greedily by descending IoU. A predicted parent->child edge is a true
// positive when both endpoints are matched to the endpoints of a ground-truth
// edge. Two edgeless trees whose roots match score 1.
EdgeScores edge_f1(const AXNode& pred, const AXNode& gt, double match_iou = 0.5);

// Mean over ground-truth intermediate (non-root, non-leaf) nodes of the IoU
// of their greedily matched predicted intermediate node.
double container_match(const AXNode& pred, const AXNode& gt);

struct GedOptions {
  std::chrono::duration<double> time_budget{10.0};
  // Keep searching for cheaper paths after the first one until the budget
  // runs out or optimality is proven.
  bool refine = false;
};

struct GedResult {
  double ged = 0;
  bool is_fallback = false;
  // Set when the search space was exhausted, so `ged` is exact.
  bool proven_optimal = false;
};

// Directed graph edit distance with unit node/edge insertion and deletion
// and role-mismatch node substitution. Returns the first complete edit path
// found (an upper bound), or |edges(gt)| with is_fallback when the budget
// expires first.
GedResult ged_upper_bound(const AXNode& pred, const AXNode& gt,
                          const GedOptions& options = {});

struct TreeReport {
  double edge_f1 = 0;
  double leaves_f1 = 0;
  double ged = 0;
  bool ged_is_fallback = false;
  double container_match = 0;
};

struct TreeEvalOptions {
  double match_iou = 0.5;
  GedOptions ged;
};

TreeReport evaluate_tree(const AXNode& pred, const AXNode& gt,
                         const TreeEvalOptions& options = {});

std::string to_json(const TreeReport& report);

}  // namespace axsynth
