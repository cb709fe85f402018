#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "hmhom/aca.hpp"
#include "hmhom/block_tree.hpp"
#include "hmhom/entry_generator.hpp"

namespace hmhom {

enum class AcaMode { Full, Partial };

struct AssemblyOptions {
  double epsilon{1e-3};
  AcaMode mode{AcaMode::Partial};
  bool recompress{true};    // run svd_recompress on every compressed leaf
  int k_max{0};             // 0: no cap beyond min(side)
  int threads{0};           // 0: HMHOM_THREADS env var, else hardware concurrency
};

/// Storage accounting and timings of an assembled operator.
struct CompressionStats {
  long long stored_scalars{0};
  long long dense_scalars{0};   // n^2
  double ratio{0.0};
  int rank_min{0};
  int rank_max{0};
  double rank_mean{0.0};
  std::vector<int> rank_histogram;   // count per rank value
  double assembly_seconds{0.0};
  double factor_seconds{0.0};
  double solve_seconds{0.0};
};

/// A leaf that did not reach its target accuracy during assembly.
struct LeafWarning {
  int block_id{0};
  int row_begin{0}, row_end{0}, col_begin{0}, col_end{0};
  double rel_error{0.0};
};

/// Hierarchical matrix: a block tree whose leaves hold either dense blocks
/// or rank-k factorizations, plus the permutation between original and
/// tree-ordered indices. Items may carry several scalar dofs each
/// (dofs_per_item); cluster ranges are in items, storage is in scalars.
/// Immutable after assembly and safe to share across threads.
class HMatrix {
 public:
  struct Leaf {
    int block_id{0};
    int row_begin{0}, row_end{0};   // permuted scalar ranges
    int col_begin{0}, col_end{0};
    bool low_rank{false};
    Eigen::MatrixXd dense;
    LowRankBlock lr;
  };

  std::shared_ptr<const ClusterTree> clusters;
  std::shared_ptr<const BlockTree> blocks;
  int dofs_per_item{1};
  std::vector<Leaf> leaves;
  std::vector<int> leaf_of_block;   // block node id -> leaf index, -1 for branches
  std::vector<LeafWarning> warnings;
  double assembly_seconds{0.0};

  int n() const { return clusters->item_count() * dofs_per_item; }

  /// Original scalar index of a permuted scalar position.
  int original_index(int permuted) const {
    const int item = permuted / dofs_per_item;
    const int comp = permuted % dofs_per_item;
    return clusters->perm[static_cast<std::size_t>(item)] * dofs_per_item + comp;
  }

  Eigen::VectorXd matvec(const Eigen::VectorXd& x) const;

  /// Dense reconstruction in the original index ordering (small n only).
  Eigen::MatrixXd densify() const;

  CompressionStats stats() const;

  /// Nested JSON description of the block structure (kind, sides, rank),
  /// enough to re-render block pictures externally.
  std::string structure_json() const;
};

/// Compresses every admissible leaf at the given tolerance (then recompresses)
/// and materializes dense leaves exactly. Leaves are processed concurrently;
/// the generator must tolerate concurrent calls. ACA failures are recorded in
/// `warnings` with their block coordinates.
HMatrix assemble(const EntryGenerator& gen, std::shared_ptr<const ClusterTree> clusters,
                 std::shared_ptr<const BlockTree> blocks, const AssemblyOptions& opts,
                 int dofs_per_item = 1);

}  // namespace hmhom
