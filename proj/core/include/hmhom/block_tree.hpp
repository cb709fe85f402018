#pragma once

#include <array>
#include <memory>
#include <vector>

#include "hmhom/cluster_tree.hpp"

namespace hmhom {

enum class BlockKind { LowRank, Dense, Subdivided };

/// Node of the block partition: a pair of cluster nodes plus how the block
/// is stored. Subdivided nodes have exactly four children (row child x col
/// child, row-major order).
struct BlockNode {
  int row_cluster{0};
  int col_cluster{0};
  BlockKind kind{BlockKind::Dense};
  std::array<int, 4> child{-1, -1, -1, -1};
};

/// Recursive block partition of the square index set of a cluster tree.
/// Leaves are either admissible (low-rank) pairs or small dense pairs, and
/// tile the full index square exactly once.
class BlockTree {
 public:
  std::shared_ptr<const ClusterTree> clusters;
  double eta{1.7};
  std::vector<BlockNode> nodes;

  int root() const { return 0; }
  const BlockNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
  const ClusterNode& row(int id) const { return clusters->node(node(id).row_cluster); }
  const ClusterNode& col(int id) const { return clusters->node(node(id).col_cluster); }

  std::vector<int> leaf_ids() const;
};

/// The pair (tau, sigma) subdivides when it is not admissible and both sides
/// still hold at least `leaf_size` items; otherwise it becomes a leaf,
/// low-rank if admissible and dense if small.
BlockTree build_block_tree(std::shared_ptr<const ClusterTree> clusters, double eta);

}  // namespace hmhom
