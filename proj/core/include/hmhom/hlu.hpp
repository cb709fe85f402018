#pragma once

#include <Eigen/Dense>
#include <memory>

#include "hmhom/hmatrix.hpp"

namespace hmhom {

/// Incomplete LU factorization computed within the hierarchical block
/// structure: recursive block elimination where every formatted addition and
/// multiplication is recompressed at `epsilon_lu`. Intended as a
/// preconditioner; epsilon_lu -> 0 approaches the exact factorization.
class HluFactor {
 public:
  /// Throws SolverFailure on a near-zero pivot block (the operator is
  /// numerically indefinite under this ordering; regularize or switch
  /// preconditioner).
  HluFactor(const HMatrix& h, double epsilon_lu);
  ~HluFactor();
  HluFactor(HluFactor&&) noexcept;
  HluFactor& operator=(HluFactor&&) noexcept;

  /// z = (LU)^{-1} r, both in the original index ordering.
  Eigen::VectorXd solve(const Eigen::VectorXd& r) const;

  double factor_seconds() const { return factor_seconds_; }

  struct Node;

 private:
  std::unique_ptr<Node> root_;
  std::vector<int> to_original_;   // permuted scalar position -> original index
  double factor_seconds_{0.0};
};

}  // namespace hmhom
