#pragma once

#include <Eigen/Dense>
#include <span>

#include "hmhom/entry_generator.hpp"

namespace hmhom {

/// Rank-k factorization left * right^T with left m-by-k and right n-by-k.
struct LowRankBlock {
  Eigen::MatrixXd left;    // m x k
  Eigen::MatrixXd right;   // n x k

  int rank() const { return static_cast<int>(left.cols()); }
  Eigen::MatrixXd materialize() const { return left * right.transpose(); }
};

struct AcaResult {
  LowRankBlock block;
  bool converged{true};
  int iterations{0};
  /// For full pivoting: the exact relative Frobenius error against the
  /// supplied matrix. For partial pivoting: the last stagnation estimate
  /// ||a x b||_F / ||M_k||_F (heuristic, not a guaranteed bound).
  double rel_error{0.0};
};

/// Greedy cross approximation with full pivoting: at every step the pivot is
/// the largest residual entry, and iteration stops once the residual's
/// Frobenius norm drops below epsilon times the input's. Quasi-optimal but
/// requires the materialized block.
AcaResult aca_full(const Eigen::MatrixXd& block, double epsilon, int k_max = -1);

/// Cross approximation with partial pivoting: reads only selected rows and
/// columns through the generator. The pivot column maximizes the residual of
/// the current row; the next row maximizes the residual of the pivot column
/// among untried rows; a degenerate (all ~zero) residual row falls back to
/// the next untried row. Stops on the stagnation estimate
/// ||a x b||_F <= epsilon ||M_k||_F.
AcaResult aca_partial(const EntryGenerator& gen, std::span<const int> row_idx,
                      std::span<const int> col_idx, double epsilon, int k_max = -1);

/// Truncated SVD of left * right^T via QR of both factors: the minimal rank
/// achieving relative Frobenius error <= epsilon against the input product.
/// epsilon = 0 keeps everything above the numerical noise floor.
/// Cost O((m + n) k^2).
LowRankBlock svd_recompress(const LowRankBlock& lr, double epsilon);

/// Rank needed for a relative Frobenius truncation error <= epsilon, from a
/// full SVD of the matrix. Test and calibration helper.
int truncated_svd_rank(const Eigen::MatrixXd& block, double epsilon);

}  // namespace hmhom
