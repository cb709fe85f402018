#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "hmhom/hmatrix.hpp"

namespace hmhom {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct IterationReport {
  enum class Status { Converged, MaxIterations, Breakdown };
  Status status{Status::Converged};
  int iterations{0};
  double residual{0.0};   // final true relative residual ||Ax - b|| / ||b||
  double seconds{0.0};

  bool converged() const { return status == Status::Converged; }
};

/// Identity preconditioner.
LinearMap identity_precond();

/// Preconditioned conjugate gradient. Stops on the true relative residual.
/// Non-positive curvature is reported as Breakdown, distinct from running out
/// of iterations.
std::pair<Eigen::VectorXd, IterationReport> pcg(const LinearMap& op, const Eigen::VectorXd& b,
                                                const LinearMap& precond, double tol, int max_iter);

/// Restarted GMRES with right preconditioning (the reported residual is the
/// true one). `max_iter` counts total inner iterations across restarts.
std::pair<Eigen::VectorXd, IterationReport> gmres(const LinearMap& op, const Eigen::VectorXd& b,
                                                  const LinearMap& precond, double tol, int restart,
                                                  int max_iter);

// Convenience overloads taking an assembled operator directly.
std::pair<Eigen::VectorXd, IterationReport> pcg(const HMatrix& h, const LinearMap& precond,
                                                const Eigen::VectorXd& b, double tol, int max_iter);
std::pair<Eigen::VectorXd, IterationReport> gmres(const HMatrix& h, const LinearMap& precond,
                                                  const Eigen::VectorXd& b, double tol, int restart,
                                                  int max_iter);

}  // namespace hmhom
