#include "hmhom/hlu.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hmhom/errors.hpp"

namespace hmhom {

// The factor workspace mirrors the block tree. Branch children are ordered
// [A11, A12, A21, A22]; after factoring, A12 holds U12, A21 holds L21 and the
// diagonal children hold their own factorizations.
struct HluFactor::Node {
  enum Kind { Dense, LowRank, Branch };
  Kind kind{Dense};
  int rb{0}, re{0}, cb{0}, ce{0};   // permuted scalar ranges
  Eigen::MatrixXd dense;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool factored{false};
  LowRankBlock lr;
  std::array<std::unique_ptr<Node>, 4> child;

  int rows() const { return re - rb; }
  int cols() const { return ce - cb; }
};

namespace {

using Node = HluFactor::Node;
using Eigen::MatrixXd;
using PanelRef = Eigen::Ref<MatrixXd>;
using ConstPanelRef = Eigen::Ref<const MatrixXd>;

// ---- panel products -------------------------------------------------------

// y += alpha * A * x, x indexed over A's columns, y over A's rows.
void apply(const Node& a, ConstPanelRef x, PanelRef y, double alpha) {
  switch (a.kind) {
    case Node::Dense:
      y.noalias() += alpha * (a.dense * x);
      return;
    case Node::LowRank:
      if (a.lr.rank() > 0) y.noalias() += alpha * (a.lr.left * (a.lr.right.transpose() * x));
      return;
    case Node::Branch:
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const Node& c = *a.child[static_cast<std::size_t>(2 * i + j)];
          apply(c, x.middleRows(c.cb - a.cb, c.cols()), y.middleRows(c.rb - a.rb, c.rows()), alpha);
        }
      return;
  }
}

// y += alpha * A^T * x, x indexed over A's rows, y over A's columns.
void apply_transposed(const Node& a, ConstPanelRef x, PanelRef y, double alpha) {
  switch (a.kind) {
    case Node::Dense:
      y.noalias() += alpha * (a.dense.transpose() * x);
      return;
    case Node::LowRank:
      if (a.lr.rank() > 0) y.noalias() += alpha * (a.lr.right * (a.lr.left.transpose() * x));
      return;
    case Node::Branch:
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const Node& c = *a.child[static_cast<std::size_t>(2 * i + j)];
          apply_transposed(c, x.middleRows(c.rb - a.rb, c.rows()), y.middleRows(c.cb - a.cb, c.cols()), alpha);
        }
      return;
  }
}

// ---- low-rank conversions -------------------------------------------------

LowRankBlock add_lowrank(const LowRankBlock& a, const LowRankBlock& b, double eps) {
  if (a.rank() == 0) return b;
  if (b.rank() == 0) return a;
  LowRankBlock sum;
  sum.left.resize(a.left.rows(), a.rank() + b.rank());
  sum.left << a.left, b.left;
  sum.right.resize(a.right.rows(), a.rank() + b.rank());
  sum.right << a.right, b.right;
  return svd_recompress(sum, eps);
}

LowRankBlock to_lowrank(const Node& a, double eps) {
  switch (a.kind) {
    case Node::LowRank:
      return a.lr;
    case Node::Dense: {
      LowRankBlock raw{a.dense, MatrixXd::Identity(a.cols(), a.cols())};
      return svd_recompress(raw, eps);
    }
    case Node::Branch: {
      int total = 0;
      std::array<LowRankBlock, 4> part;
      for (int c = 0; c < 4; ++c) {
        part[static_cast<std::size_t>(c)] = to_lowrank(*a.child[static_cast<std::size_t>(c)], eps);
        total += part[static_cast<std::size_t>(c)].rank();
      }
      LowRankBlock agg;
      agg.left = MatrixXd::Zero(a.rows(), total);
      agg.right = MatrixXd::Zero(a.cols(), total);
      int pos = 0;
      for (int c = 0; c < 4; ++c) {
        const Node& ch = *a.child[static_cast<std::size_t>(c)];
        const LowRankBlock& p = part[static_cast<std::size_t>(c)];
        if (p.rank() == 0) continue;
        agg.left.block(ch.rb - a.rb, pos, ch.rows(), p.rank()) = p.left;
        agg.right.block(ch.cb - a.cb, pos, ch.cols(), p.rank()) = p.right;
        pos += p.rank();
      }
      return svd_recompress(agg, eps);
    }
  }
  return {};
}

// Low-rank approximation of the product A * B.
LowRankBlock multiply_to_lowrank(const Node& a, const Node& b, double eps) {
  if (a.kind == Node::LowRank) {
    LowRankBlock out;
    out.left = a.lr.left;
    out.right = MatrixXd::Zero(b.cols(), a.lr.rank());
    if (a.lr.rank() > 0) apply_transposed(b, a.lr.right, out.right, 1.0);
    return out;
  }
  if (b.kind == Node::LowRank) {
    LowRankBlock out;
    out.left = MatrixXd::Zero(a.rows(), b.lr.rank());
    if (b.lr.rank() > 0) apply(a, b.lr.left, out.left, 1.0);
    out.right = b.lr.right;
    return out;
  }
  if (a.kind == Node::Dense && b.kind == Node::Dense) {
    LowRankBlock raw{a.dense * b.dense, MatrixXd::Identity(b.cols(), b.cols())};
    return svd_recompress(raw, eps);
  }
  assert(a.kind == Node::Branch && b.kind == Node::Branch);

  // Aggregate the 2x2 products of children.
  LowRankBlock agg;
  std::array<LowRankBlock, 4> part;
  int total = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      LowRankBlock sum;
      for (int k = 0; k < 2; ++k) {
        const Node& aik = *a.child[static_cast<std::size_t>(2 * i + k)];
        const Node& bkj = *b.child[static_cast<std::size_t>(2 * k + j)];
        sum = add_lowrank(sum, multiply_to_lowrank(aik, bkj, eps), eps);
      }
      part[static_cast<std::size_t>(2 * i + j)] = std::move(sum);
      total += part[static_cast<std::size_t>(2 * i + j)].rank();
    }
  agg.left = MatrixXd::Zero(a.rows(), total);
  agg.right = MatrixXd::Zero(b.cols(), total);
  int pos = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Node& ai = *a.child[static_cast<std::size_t>(2 * i)];        // row child i (col index 0)
      const Node& bj = *b.child[static_cast<std::size_t>(j)];            // col child j (row index 0)
      const LowRankBlock& p = part[static_cast<std::size_t>(2 * i + j)];
      if (p.rank() == 0) continue;
      agg.left.block(ai.rb - a.rb, pos, ai.rows(), p.rank()) = p.left;
      agg.right.block(bj.cb - b.cb, pos, bj.cols(), p.rank()) = p.right;
      pos += p.rank();
    }
  return svd_recompress(agg, eps);
}

// C -= U * V^T, with U over C's rows and V over C's columns.
void subtract_lowrank(Node& c, const MatrixXd& u, const MatrixXd& v, double eps) {
  if (u.cols() == 0) return;
  switch (c.kind) {
    case Node::Dense:
      c.dense.noalias() -= u * v.transpose();
      return;
    case Node::LowRank: {
      LowRankBlock update{-u, v};
      c.lr = add_lowrank(c.lr, update, eps);
      return;
    }
    case Node::Branch:
      for (int i = 0; i < 4; ++i) {
        Node& ch = *c.child[static_cast<std::size_t>(i)];
        subtract_lowrank(ch, u.middleRows(ch.rb - c.rb, ch.rows()), v.middleRows(ch.cb - c.cb, ch.cols()), eps);
      }
      return;
  }
}

// C -= A * B with truncation at eps.
void multiply_subtract(Node& c, const Node& a, const Node& b, double eps) {
  if (c.kind == Node::Branch && a.kind == Node::Branch && b.kind == Node::Branch) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          multiply_subtract(*c.child[static_cast<std::size_t>(2 * i + j)],
                            *a.child[static_cast<std::size_t>(2 * i + k)],
                            *b.child[static_cast<std::size_t>(2 * k + j)], eps);
    return;
  }
  const LowRankBlock p = multiply_to_lowrank(a, b, eps);
  subtract_lowrank(c, p.left, p.right, eps);
}

// ---- triangular panel solves ---------------------------------------------

void lower_solve_dense(const Node& l, PanelRef p) {
  assert(l.factored);
  p = l.lu.permutationP() * p;
  l.lu.matrixLU().triangularView<Eigen::UnitLower>().solveInPlace(p);
}

void upper_solve_dense(const Node& l, PanelRef p) {
  assert(l.factored);
  l.lu.matrixLU().triangularView<Eigen::Upper>().solveInPlace(p);
}

void upper_transpose_solve_dense(const Node& l, PanelRef p) {
  assert(l.factored);
  l.lu.matrixLU().triangularView<Eigen::Upper>().transpose().solveInPlace(p);
}

// p <- L^{-1} p over a factored diagonal node.
void lower_solve_hpanel(const Node& l, PanelRef p) {
  if (l.kind == Node::Dense) {
    lower_solve_dense(l, p);
    return;
  }
  assert(l.kind == Node::Branch);
  const Node& l11 = *l.child[0];
  const Node& l21 = *l.child[2];
  const Node& l22 = *l.child[3];
  auto p1 = p.topRows(l11.rows());
  auto p2 = p.bottomRows(l22.rows());
  lower_solve_hpanel(l11, p1);
  apply(l21, p1, p2, -1.0);
  lower_solve_hpanel(l22, p2);
}

// p <- U^{-1} p over a factored diagonal node.
void upper_solve_hpanel(const Node& u, PanelRef p) {
  if (u.kind == Node::Dense) {
    upper_solve_dense(u, p);
    return;
  }
  assert(u.kind == Node::Branch);
  const Node& u11 = *u.child[0];
  const Node& u12 = *u.child[1];
  const Node& u22 = *u.child[3];
  auto p1 = p.topRows(u11.rows());
  auto p2 = p.bottomRows(u22.rows());
  upper_solve_hpanel(u22, p2);
  apply(u12, p2, p1, -1.0);
  upper_solve_hpanel(u11, p1);
}

// q <- U^{-T} q over a factored diagonal node (column panel over U's range).
void upper_transpose_solve_hpanel(const Node& u, PanelRef q) {
  if (u.kind == Node::Dense) {
    upper_transpose_solve_dense(u, q);
    return;
  }
  assert(u.kind == Node::Branch);
  const Node& u11 = *u.child[0];
  const Node& u12 = *u.child[1];
  const Node& u22 = *u.child[3];
  auto q1 = q.topRows(u11.cols());
  auto q2 = q.bottomRows(u22.cols());
  upper_transpose_solve_hpanel(u11, q1);
  apply_transposed(u12, q1, q2, -1.0);
  upper_transpose_solve_hpanel(u22, q2);
}

// B <- L^{-1} B where l is the factored diagonal sharing B's row range.
void lower_left_solve(const Node& l, Node& b, double eps) {
  if (b.kind == Node::Dense) {
    lower_solve_hpanel(l, b.dense);
    return;
  }
  if (b.kind == Node::LowRank) {
    if (b.lr.rank() > 0) lower_solve_hpanel(l, b.lr.left);
    return;
  }
  assert(l.kind == Node::Branch);  // a dense l cannot face a subdivided b
  const Node& l11 = *l.child[0];
  const Node& l21 = *l.child[2];
  const Node& l22 = *l.child[3];
  for (int j = 0; j < 2; ++j) {
    Node& btop = *b.child[static_cast<std::size_t>(j)];
    Node& bbot = *b.child[static_cast<std::size_t>(2 + j)];
    lower_left_solve(l11, btop, eps);
    multiply_subtract(bbot, l21, btop, eps);
    lower_left_solve(l22, bbot, eps);
  }
}

// B <- B U^{-1} where u is the factored diagonal sharing B's column range.
void upper_right_solve(const Node& u, Node& b, double eps) {
  if (b.kind == Node::Dense) {
    MatrixXd t = b.dense.transpose();
    upper_transpose_solve_hpanel(u, t);
    b.dense = t.transpose();
    return;
  }
  if (b.kind == Node::LowRank) {
    if (b.lr.rank() > 0) upper_transpose_solve_hpanel(u, b.lr.right);
    return;
  }
  assert(u.kind == Node::Branch);
  const Node& u11 = *u.child[0];
  const Node& u12 = *u.child[1];
  const Node& u22 = *u.child[3];
  for (int i = 0; i < 2; ++i) {
    Node& bleft = *b.child[static_cast<std::size_t>(2 * i)];
    Node& bright = *b.child[static_cast<std::size_t>(2 * i + 1)];
    upper_right_solve(u11, bleft, eps);
    multiply_subtract(bright, bleft, u12, eps);
    upper_right_solve(u22, bright, eps);
  }
}

void factor(Node& a, double eps) {
  if (a.kind == Node::Dense) {
    a.lu.compute(a.dense);
    const Eigen::VectorXd diag = a.lu.matrixLU().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff();
    if (!(dmax > 0.0) || diag.minCoeff() < 1e-14 * dmax)
      throw SolverFailure("near-zero pivot block in H-LU factorization");
    a.factored = true;
    return;
  }
  assert(a.kind == Node::Branch);
  factor(*a.child[0], eps);
  lower_left_solve(*a.child[0], *a.child[1], eps);   // A12 <- U12
  upper_right_solve(*a.child[0], *a.child[2], eps);  // A21 <- L21
  multiply_subtract(*a.child[3], *a.child[2], *a.child[1], eps);
  factor(*a.child[3], eps);
  a.factored = true;
}

std::unique_ptr<Node> build_workspace(const HMatrix& h, int block_id) {
  const BlockNode& bn = h.blocks->node(block_id);
  const ClusterNode& row = h.clusters->node(bn.row_cluster);
  const ClusterNode& col = h.clusters->node(bn.col_cluster);
  const int d = h.dofs_per_item;

  auto node = std::make_unique<Node>();
  node->rb = row.begin * d;
  node->re = row.end * d;
  node->cb = col.begin * d;
  node->ce = col.end * d;
  if (bn.kind == BlockKind::Subdivided) {
    node->kind = Node::Branch;
    for (int c = 0; c < 4; ++c)
      node->child[static_cast<std::size_t>(c)] = build_workspace(h, bn.child[static_cast<std::size_t>(c)]);
    return node;
  }
  const int li = h.leaf_of_block[static_cast<std::size_t>(block_id)];
  const HMatrix::Leaf& leaf = h.leaves[static_cast<std::size_t>(li)];
  if (leaf.low_rank) {
    node->kind = Node::LowRank;
    node->lr = leaf.lr;
  } else {
    node->kind = Node::Dense;
    node->dense = leaf.dense;
  }
  return node;
}

}  // namespace

HluFactor::HluFactor(const HMatrix& h, double epsilon_lu) {
  if (!(epsilon_lu >= 0.0)) throw std::invalid_argument("epsilon_lu must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  root_ = build_workspace(h, h.blocks->root());
  to_original_.resize(static_cast<std::size_t>(h.n()));
  for (int p = 0; p < h.n(); ++p) to_original_[static_cast<std::size_t>(p)] = h.original_index(p);
  factor(*root_, epsilon_lu);
  factor_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

HluFactor::~HluFactor() = default;
HluFactor::HluFactor(HluFactor&&) noexcept = default;
HluFactor& HluFactor::operator=(HluFactor&&) noexcept = default;

Eigen::VectorXd HluFactor::solve(const Eigen::VectorXd& r) const {
  const int n = static_cast<int>(to_original_.size());
  if (r.size() != n) throw std::invalid_argument("H-LU solve dimension mismatch");
  Eigen::MatrixXd p(n, 1);
  for (int i = 0; i < n; ++i) p(i, 0) = r[to_original_[static_cast<std::size_t>(i)]];
  lower_solve_hpanel(*root_, p);
  upper_solve_hpanel(*root_, p);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[to_original_[static_cast<std::size_t>(i)]] = p(i, 0);
  return z;
}

}  // namespace hmhom
