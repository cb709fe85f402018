#include "hmhom/cluster_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hmhom {

namespace {

void compute_bbox(const std::vector<Vec3>& points, const std::vector<int>& perm, ClusterNode& node) {
  Vec3 lo = points[static_cast<std::size_t>(perm[static_cast<std::size_t>(node.begin)])];
  Vec3 hi = lo;
  for (int p = node.begin + 1; p < node.end; ++p) {
    const Vec3& x = points[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])];
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  node.bbox_min = lo;
  node.bbox_max = hi;
}

void split_recursive(const std::vector<Vec3>& points, ClusterTree& tree, int node_id) {
  if (tree.nodes[static_cast<std::size_t>(node_id)].size() < tree.leaf_size) return;

  const ClusterNode nd = tree.nodes[static_cast<std::size_t>(node_id)];
  Vec3 extent = nd.bbox_max - nd.bbox_min;
  int axis = 0;
  if (extent[1] > extent[axis]) axis = 1;
  if (extent[2] > extent[axis]) axis = 2;

  // Position-median split on the chosen coordinate; ties broken by original
  // index so the permutation is deterministic.
  auto first = tree.perm.begin() + nd.begin;
  auto last = tree.perm.begin() + nd.end;
  const int mid = nd.begin + nd.size() / 2;
  std::nth_element(first, tree.perm.begin() + mid, last, [&](int a, int b) {
    const double xa = points[static_cast<std::size_t>(a)][axis];
    const double xb = points[static_cast<std::size_t>(b)][axis];
    return xa < xb || (xa == xb && a < b);
  });

  ClusterNode left, right;
  left.begin = nd.begin;
  left.end = mid;
  right.begin = mid;
  right.end = nd.end;
  compute_bbox(points, tree.perm, left);
  compute_bbox(points, tree.perm, right);

  const int left_id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(left);
  const int right_id = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(right);
  tree.nodes[static_cast<std::size_t>(node_id)].child[0] = left_id;
  tree.nodes[static_cast<std::size_t>(node_id)].child[1] = right_id;

  split_recursive(points, tree, left_id);
  split_recursive(points, tree, right_id);
}

}  // namespace

ClusterTree build_cluster_tree(const std::vector<Vec3>& points, int leaf_size) {
  if (points.empty()) throw std::invalid_argument("cluster tree needs at least one point");
  if (leaf_size < 1) throw std::invalid_argument("leaf size must be >= 1");

  ClusterTree tree;
  tree.leaf_size = leaf_size;
  tree.perm.resize(points.size());
  std::iota(tree.perm.begin(), tree.perm.end(), 0);

  ClusterNode root;
  root.begin = 0;
  root.end = static_cast<int>(points.size());
  compute_bbox(points, tree.perm, root);
  tree.nodes.push_back(root);
  split_recursive(points, tree, 0);
  return tree;
}

std::vector<int> ClusterTree::leaf_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].is_leaf()) out.push_back(static_cast<int>(i));
  return out;
}

int ClusterTree::depth() const {
  // Iterative: depth of node 0.
  std::vector<std::pair<int, int>> stack{{0, 1}};
  int best = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const ClusterNode& nd = nodes[static_cast<std::size_t>(id)];
    if (!nd.is_leaf()) {
      stack.push_back({nd.child[0], d + 1});
      stack.push_back({nd.child[1], d + 1});
    }
  }
  return best;
}

double bbox_distance(const ClusterNode& a, const ClusterNode& b) {
  Vec3 gap;
  for (int i = 0; i < 3; ++i) {
    const double lo = std::max(a.bbox_min[i], b.bbox_min[i]);
    const double hi = std::min(a.bbox_max[i], b.bbox_max[i]);
    gap[i] = std::max(0.0, lo - hi);
  }
  return gap.norm();
}

bool is_admissible(const ClusterNode& a, const ClusterNode& b, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  const double dist = bbox_distance(a, b);
  if (!(dist > 0.0)) return false;
  return std::min(a.diameter(), b.diameter()) <= eta * dist;
}

}  // namespace hmhom
