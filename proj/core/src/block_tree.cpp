#include "hmhom/block_tree.hpp"

#include <stdexcept>

namespace hmhom {

namespace {

int build(BlockTree& bt, int row_id, int col_id) {
  const ClusterTree& ct = *bt.clusters;
  const ClusterNode& row = ct.node(row_id);
  const ClusterNode& col = ct.node(col_id);

  const int id = static_cast<int>(bt.nodes.size());
  bt.nodes.push_back(BlockNode{row_id, col_id, BlockKind::Dense, {-1, -1, -1, -1}});

  if (is_admissible(row, col, bt.eta)) {
    bt.nodes[static_cast<std::size_t>(id)].kind = BlockKind::LowRank;
    return id;
  }
  const bool can_split =
      row.size() >= ct.leaf_size && col.size() >= ct.leaf_size && !row.is_leaf() && !col.is_leaf();
  if (!can_split) return id;  // small dense leaf

  bt.nodes[static_cast<std::size_t>(id)].kind = BlockKind::Subdivided;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const int child = build(bt, row.child[i], col.child[j]);
      bt.nodes[static_cast<std::size_t>(id)].child[static_cast<std::size_t>(2 * i + j)] = child;
    }
  return id;
}

}  // namespace

BlockTree build_block_tree(std::shared_ptr<const ClusterTree> clusters, double eta) {
  if (!clusters) throw std::invalid_argument("null cluster tree");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  BlockTree bt;
  bt.clusters = std::move(clusters);
  bt.eta = eta;
  build(bt, bt.clusters->root(), bt.clusters->root());
  return bt;
}

std::vector<int> BlockTree::leaf_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind != BlockKind::Subdivided) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace hmhom
