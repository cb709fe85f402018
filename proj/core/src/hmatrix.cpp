#include "hmhom/hmatrix.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hmhom {

namespace {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HMHOM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<int> original_indices(const HMatrix& h, int begin, int end) {
  std::vector<int> idx(static_cast<std::size_t>(end - begin));
  for (int p = begin; p < end; ++p) idx[static_cast<std::size_t>(p - begin)] = h.original_index(p);
  return idx;
}

}  // namespace

HMatrix assemble(const EntryGenerator& gen, std::shared_ptr<const ClusterTree> clusters,
                 std::shared_ptr<const BlockTree> blocks, const AssemblyOptions& opts,
                 int dofs_per_item) {
  if (!clusters || !blocks) throw std::invalid_argument("null tree");
  if (dofs_per_item < 1) throw std::invalid_argument("dofs_per_item must be >= 1");
  const int n_scalar = clusters->item_count() * dofs_per_item;
  if (gen.rows() != n_scalar || gen.cols() != n_scalar)
    throw std::invalid_argument("generator dimension does not match the tree");

  const auto t0 = std::chrono::steady_clock::now();

  HMatrix h;
  h.clusters = std::move(clusters);
  h.blocks = std::move(blocks);
  h.dofs_per_item = dofs_per_item;
  h.leaf_of_block.assign(h.blocks->nodes.size(), -1);

  const std::vector<int> leaf_blocks = h.blocks->leaf_ids();
  h.leaves.resize(leaf_blocks.size());
  for (std::size_t li = 0; li < leaf_blocks.size(); ++li) {
    const int bid = leaf_blocks[li];
    const BlockNode& bn = h.blocks->node(bid);
    const ClusterNode& row = h.clusters->node(bn.row_cluster);
    const ClusterNode& col = h.clusters->node(bn.col_cluster);
    HMatrix::Leaf& leaf = h.leaves[li];
    leaf.block_id = bid;
    leaf.row_begin = row.begin * dofs_per_item;
    leaf.row_end = row.end * dofs_per_item;
    leaf.col_begin = col.begin * dofs_per_item;
    leaf.col_end = col.end * dofs_per_item;
    leaf.low_rank = bn.kind == BlockKind::LowRank;
    h.leaf_of_block[static_cast<std::size_t>(bid)] = static_cast<int>(li);
  }

  std::mutex warn_mutex;
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    try {
      while (true) {
        const std::size_t li = cursor.fetch_add(1);
        if (li >= h.leaves.size()) return;
        HMatrix::Leaf& leaf = h.leaves[li];
        const std::vector<int> rows = original_indices(h, leaf.row_begin, leaf.row_end);
        const std::vector<int> cols = original_indices(h, leaf.col_begin, leaf.col_end);
        const int m = static_cast<int>(rows.size());
        const int nc = static_cast<int>(cols.size());

        if (!leaf.low_rank) {
          leaf.dense.resize(m, nc);
          Eigen::VectorXd buf(nc);
          for (int i = 0; i < m; ++i) {
            gen.row(rows[static_cast<std::size_t>(i)], cols, std::span<double>(buf.data(), static_cast<std::size_t>(nc)));
            leaf.dense.row(i) = buf.transpose();
          }
          continue;
        }

        AcaResult aca;
        if (opts.mode == AcaMode::Partial) {
          aca = aca_partial(gen, rows, cols, opts.epsilon, opts.k_max);
        } else {
          Eigen::MatrixXd block(m, nc);
          Eigen::VectorXd buf(nc);
          for (int i = 0; i < m; ++i) {
            gen.row(rows[static_cast<std::size_t>(i)], cols, std::span<double>(buf.data(), static_cast<std::size_t>(nc)));
            block.row(i) = buf.transpose();
          }
          aca = aca_full(block, opts.epsilon, opts.k_max);
        }
        leaf.lr = opts.recompress ? svd_recompress(aca.block, opts.epsilon) : std::move(aca.block);
        if (!aca.converged) {
          std::lock_guard<std::mutex> lock(warn_mutex);
          h.warnings.push_back(LeafWarning{leaf.block_id, leaf.row_begin, leaf.row_end,
                                           leaf.col_begin, leaf.col_end, aca.rel_error});
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  const int threads = std::min<int>(resolve_thread_count(opts.threads),
                                    std::max<int>(1, static_cast<int>(h.leaves.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  h.assembly_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return h;
}

Eigen::VectorXd HMatrix::matvec(const Eigen::VectorXd& x) const {
  const int dim = n();
  if (x.size() != dim) throw std::invalid_argument("matvec dimension mismatch");

  Eigen::VectorXd xp(dim), yp = Eigen::VectorXd::Zero(dim);
  for (int p = 0; p < dim; ++p) xp[p] = x[original_index(p)];

  for (const Leaf& leaf : leaves) {
    const auto xs = xp.segment(leaf.col_begin, leaf.col_end - leaf.col_begin);
    auto ys = yp.segment(leaf.row_begin, leaf.row_end - leaf.row_begin);
    if (leaf.low_rank) {
      if (leaf.lr.rank() > 0) ys.noalias() += leaf.lr.left * (leaf.lr.right.transpose() * xs);
    } else {
      ys.noalias() += leaf.dense * xs;
    }
  }

  Eigen::VectorXd y(dim);
  for (int p = 0; p < dim; ++p) y[original_index(p)] = yp[p];
  return y;
}

Eigen::MatrixXd HMatrix::densify() const {
  const int dim = n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (const Leaf& leaf : leaves) {
    const Eigen::MatrixXd block = leaf.low_rank ? leaf.lr.materialize() : leaf.dense;
    for (int i = leaf.row_begin; i < leaf.row_end; ++i)
      for (int j = leaf.col_begin; j < leaf.col_end; ++j)
        a(original_index(i), original_index(j)) = block(i - leaf.row_begin, j - leaf.col_begin);
  }
  return a;
}

CompressionStats HMatrix::stats() const {
  CompressionStats s;
  const long long dim = n();
  s.dense_scalars = dim * dim;
  s.assembly_seconds = assembly_seconds;

  long long rank_sum = 0;
  int lr_count = 0;
  s.rank_min = 0;
  s.rank_max = 0;
  bool first = true;
  for (const Leaf& leaf : leaves) {
    const long long m = leaf.row_end - leaf.row_begin;
    const long long nc = leaf.col_end - leaf.col_begin;
    if (leaf.low_rank) {
      const int k = leaf.lr.rank();
      s.stored_scalars += static_cast<long long>(k) * (m + nc);
      rank_sum += k;
      ++lr_count;
      if (first) { s.rank_min = s.rank_max = k; first = false; }
      s.rank_min = std::min(s.rank_min, k);
      s.rank_max = std::max(s.rank_max, k);
      if (static_cast<std::size_t>(k) >= s.rank_histogram.size()) s.rank_histogram.resize(static_cast<std::size_t>(k) + 1, 0);
      ++s.rank_histogram[static_cast<std::size_t>(k)];
    } else {
      s.stored_scalars += m * nc;
    }
  }
  s.rank_mean = lr_count > 0 ? double(rank_sum) / lr_count : 0.0;
  s.ratio = s.dense_scalars > 0 ? double(s.stored_scalars) / double(s.dense_scalars) : 0.0;
  return s;
}

namespace {

void structure_node(const HMatrix& h, int block_id, std::ostringstream& out) {
  const BlockNode& bn = h.blocks->node(block_id);
  const ClusterNode& row = h.clusters->node(bn.row_cluster);
  const ClusterNode& col = h.clusters->node(bn.col_cluster);
  const int d = h.dofs_per_item;
  out << "{\"rows\":[" << row.begin * d << "," << row.end * d << "],\"cols\":[" << col.begin * d
      << "," << col.end * d << "]";
  if (bn.kind == BlockKind::Subdivided) {
    out << ",\"kind\":\"branch\",\"children\":[";
    for (int c = 0; c < 4; ++c) {
      if (c) out << ",";
      structure_node(h, bn.child[static_cast<std::size_t>(c)], out);
    }
    out << "]";
  } else if (bn.kind == BlockKind::LowRank) {
    const int li = h.leaf_of_block[static_cast<std::size_t>(block_id)];
    out << ",\"kind\":\"lowrank\",\"rank\":" << (li >= 0 ? h.leaves[static_cast<std::size_t>(li)].lr.rank() : 0);
  } else {
    out << ",\"kind\":\"dense\"";
  }
  out << "}";
}

}  // namespace

std::string HMatrix::structure_json() const {
  std::ostringstream out;
  out << "{\"n\":" << n() << ",\"root\":";
  structure_node(*this, blocks->root(), out);
  out << "}";
  return out.str();
}

}  // namespace hmhom
