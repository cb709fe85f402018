#include "hmhom/aca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hmhom {

AcaResult aca_full(const Eigen::MatrixXd& block, double epsilon, int k_max) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  const int m = static_cast<int>(block.rows());
  const int n = static_cast<int>(block.cols());
  const int cap = k_max > 0 ? std::min(k_max, std::min(m, n)) : std::min(m, n);

  AcaResult res;
  res.block.left.resize(m, cap);
  res.block.right.resize(n, cap);

  Eigen::MatrixXd residual = block;
  const double target = epsilon * block.norm();

  int k = 0;
  while (k < cap) {
    int pi = 0, pj = 0;
    const double pivot_abs = residual.cwiseAbs().maxCoeff(&pi, &pj);
    if (pivot_abs == 0.0) break;  // exact reproduction

    const double pivot = residual(pi, pj);
    res.block.left.col(k) = residual.col(pj) / pivot;
    res.block.right.col(k) = residual.row(pi).transpose();
    residual.noalias() -= res.block.left.col(k) * res.block.right.col(k).transpose();
    ++k;
    if (residual.norm() <= target) break;
  }

  res.block.left.conservativeResize(m, k);
  res.block.right.conservativeResize(n, k);
  res.iterations = k;
  const double denom = block.norm();
  res.rel_error = denom > 0.0 ? residual.norm() / denom : 0.0;
  res.converged = residual.norm() <= target || denom == 0.0;
  return res;
}

AcaResult aca_partial(const EntryGenerator& gen, std::span<const int> row_idx,
                      std::span<const int> col_idx, double epsilon, int k_max) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const int m = static_cast<int>(row_idx.size());
  const int n = static_cast<int>(col_idx.size());
  const int cap = k_max > 0 ? std::min(k_max, std::min(m, n)) : std::min(m, n);

  AcaResult res;
  Eigen::MatrixXd U(m, cap), V(n, cap);
  std::vector<char> row_used(static_cast<std::size_t>(m), 0);

  double approx_norm_sq = 0.0;       // ||M_k||_F^2, updated incrementally
  int k = 0;
  int next_row = 0;
  int rows_tried = 0;
  bool met_tolerance = false;
  bool rows_exhausted = false;       // every row visited: block reproduced exactly

  Eigen::VectorXd r(n), c(m);
  while (k < cap) {
    // Residual of the current pivot row.
    gen.row(row_idx[static_cast<std::size_t>(next_row)], col_idx, std::span<double>(r.data(), static_cast<std::size_t>(n)));
    if (k > 0) r.noalias() -= V.leftCols(k) * U.row(next_row).head(k).transpose();
    row_used[static_cast<std::size_t>(next_row)] = 1;
    ++rows_tried;

    int pj = 0;
    const double pivot_abs = r.cwiseAbs().maxCoeff(&pj);
    const double scale = approx_norm_sq > 0.0 ? std::sqrt(approx_norm_sq) : 1.0;
    if (!(pivot_abs > scale * 1e-15)) {
      // Degenerate row: fall back to the next untried one.
      int fallback = -1;
      for (int i = 0; i < m; ++i)
        if (!row_used[static_cast<std::size_t>(i)]) { fallback = i; break; }
      if (fallback < 0) { rows_exhausted = true; break; }
      next_row = fallback;
      continue;
    }

    // Residual of the pivot column.
    gen.column(col_idx[static_cast<std::size_t>(pj)], row_idx, std::span<double>(c.data(), static_cast<std::size_t>(m)));
    if (k > 0) c.noalias() -= U.leftCols(k) * V.row(pj).head(k).transpose();

    U.col(k) = c / r[pj];
    V.col(k) = r;

    // ||M_{k+1}||^2 = ||M_k||^2 + 2 sum_nu (a.a_nu)(b.b_nu) + ||a||^2 ||b||^2
    const double a2 = U.col(k).squaredNorm();
    const double b2 = V.col(k).squaredNorm();
    double cross = 0.0;
    for (int nu = 0; nu < k; ++nu)
      cross += U.col(k).dot(U.col(nu)) * V.col(k).dot(V.col(nu));
    approx_norm_sq += 2.0 * cross + a2 * b2;
    ++k;

    const double update_norm = std::sqrt(a2 * b2);
    res.rel_error = approx_norm_sq > 0.0 ? update_norm / std::sqrt(approx_norm_sq) : 0.0;
    if (update_norm <= epsilon * std::sqrt(approx_norm_sq)) { met_tolerance = true; break; }

    // Next pivot row: largest entry of the residual column among untried rows.
    int best = -1;
    double best_abs = -1.0;
    for (int i = 0; i < m; ++i) {
      if (row_used[static_cast<std::size_t>(i)]) continue;
      const double v = std::abs(c[i]);
      if (v > best_abs) { best_abs = v; best = i; }
    }
    if (best < 0) { rows_exhausted = true; break; }
    next_row = best;
  }

  res.block.left = U.leftCols(k);
  res.block.right = V.leftCols(k);
  res.iterations = k;
  res.converged = met_tolerance || rows_exhausted || k == std::min(m, n);
  return res;
}

LowRankBlock svd_recompress(const LowRankBlock& lr, double epsilon) {
  const int k = lr.rank();
  if (k == 0) return lr;
  const int m = static_cast<int>(lr.left.rows());
  const int n = static_cast<int>(lr.right.rows());

  Eigen::HouseholderQR<Eigen::MatrixXd> qru(lr.left);
  Eigen::HouseholderQR<Eigen::MatrixXd> qrv(lr.right);
  const int ku = std::min(m, k);
  const int kv = std::min(n, k);
  Eigen::MatrixXd ru = qru.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rv = qrv.matrixQR().topRows(kv).triangularView<Eigen::Upper>();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ru * rv.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  const double total_sq = sigma.squaredNorm();
  if (total_sq == 0.0) return LowRankBlock{Eigen::MatrixXd(m, 0), Eigen::MatrixXd(n, 0)};

  // Smallest rank r with tail energy <= (eps * ||product||_F)^2. eps = 0
  // keeps singular values above the round-off floor of the factorization.
  const double eps_eff = epsilon > 0.0 ? epsilon : 0.0;
  const double floor_sq = epsilon > 0.0
                              ? eps_eff * eps_eff * total_sq
                              : std::pow(sigma[0] * std::max(m, n) * std::numeric_limits<double>::epsilon(), 2);
  int r = static_cast<int>(sigma.size());
  double tail = 0.0;
  while (r > 0) {
    const double next = tail + sigma[r - 1] * sigma[r - 1];
    if (next > floor_sq) break;
    tail = next;
    --r;
  }
  if (r == 0) return LowRankBlock{Eigen::MatrixXd(m, 0), Eigen::MatrixXd(n, 0)};

  Eigen::MatrixXd qu = qru.householderQ() * Eigen::MatrixXd::Identity(m, ku);
  Eigen::MatrixXd qv = qrv.householderQ() * Eigen::MatrixXd::Identity(n, kv);

  LowRankBlock out;
  out.left = qu * svd.matrixU().leftCols(r) * sigma.head(r).asDiagonal();
  out.right = qv * svd.matrixV().leftCols(r);
  return out;
}

int truncated_svd_rank(const Eigen::MatrixXd& block, double epsilon) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double total_sq = sigma.squaredNorm();
  if (total_sq == 0.0) return 0;
  const double budget = epsilon * epsilon * total_sq;
  int r = static_cast<int>(sigma.size());
  double tail = 0.0;
  while (r > 0 && tail + sigma[r - 1] * sigma[r - 1] <= budget) {
    tail += sigma[r - 1] * sigma[r - 1];
    --r;
  }
  return r;
}

}  // namespace hmhom
