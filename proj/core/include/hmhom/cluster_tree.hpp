#pragma once

#include <vector>

#include "hmhom/geometry.hpp"

namespace hmhom {

/// Node of a geometric bisection tree over support points. Index ranges are
/// positions in the permuted order, so every node covers a contiguous range.
struct ClusterNode {
  int begin{0};
  int end{0};                    // half-open [begin, end)
  Vec3 bbox_min{Vec3::Zero()};
  Vec3 bbox_max{Vec3::Zero()};
  int child[2]{-1, -1};

  int size() const { return end - begin; }
  bool is_leaf() const { return child[0] < 0; }
  double diameter() const { return (bbox_max - bbox_min).norm(); }
};

/// Binary cluster tree: the root indexes all items, children partition their
/// parent disjointly, and every leaf holds at most `leaf_size` items.
class ClusterTree {
 public:
  std::vector<ClusterNode> nodes;
  std::vector<int> perm;   // perm[position] = original item index
  int leaf_size{15};

  int root() const { return 0; }
  int item_count() const { return static_cast<int>(perm.size()); }
  const ClusterNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }

  std::vector<int> leaf_ids() const;
  int depth() const;
};

/// Recursive geometric bisection: a node with >= leaf_size items is split at
/// the coordinate median of its longest bounding-box axis (position split on
/// the sorted coordinate, so both halves are non-empty and balanced).
ClusterTree build_cluster_tree(const std::vector<Vec3>& points, int leaf_size = 15);

/// Axis-aligned box distance between two cluster nodes.
double bbox_distance(const ClusterNode& a, const ClusterNode& b);

/// Far-field test: min{diam(a), diam(b)} <= eta * dist(a, b), with the
/// distance required to be strictly positive.
bool is_admissible(const ClusterNode& a, const ClusterNode& b, double eta);

}  // namespace hmhom
