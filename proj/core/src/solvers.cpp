#include "hmhom/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace hmhom {

LinearMap identity_precond() {
  return [](const Eigen::VectorXd& v) { return v; };
}

std::pair<Eigen::VectorXd, IterationReport> pcg(const LinearMap& op, const Eigen::VectorXd& b,
                                                const LinearMap& precond, double tol, int max_iter) {
  using Status = IterationReport::Status;
  const auto t0 = std::chrono::steady_clock::now();
  IterationReport rep;

  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (bnorm == 0.0) {
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {x, rep};
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  rep.status = Status::MaxIterations;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd ap = op(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) {
      rep.status = Status::Breakdown;
      rep.iterations = it;
      break;
    }
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    rep.iterations = it;
    if (r.norm() <= tol * bnorm) {
      rep.status = Status::Converged;
      break;
    }
    z = precond(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  rep.residual = r.norm() / bnorm;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {x, rep};
}

std::pair<Eigen::VectorXd, IterationReport> gmres(const LinearMap& op, const Eigen::VectorXd& b,
                                                  const LinearMap& precond, double tol, int restart,
                                                  int max_iter) {
  using Status = IterationReport::Status;
  if (restart < 1) throw std::invalid_argument("gmres restart must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  IterationReport rep;

  const int n = static_cast<int>(b.size());
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {x, rep};
  }

  rep.status = Status::MaxIterations;
  int total = 0;
  while (total < max_iter) {
    Eigen::VectorXd r = b - op(x);
    double beta = r.norm();
    if (beta <= tol * bnorm) {
      rep.status = Status::Converged;
      break;
    }

    const int m = restart;
    Eigen::MatrixXd v(n, m + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    v.col(0) = r / beta;
    g[0] = beta;

    int j = 0;
    bool happy = false;
    for (; j < m && total < max_iter; ++j, ++total) {
      Eigen::VectorXd w = op(precond(v.col(j)));
      for (int i = 0; i <= j; ++i) {
        h(i, j) = w.dot(v.col(i));
        w -= h(i, j) * v.col(i);
      }
      h(j + 1, j) = w.norm();
      if (h(j + 1, j) > 0.0) v.col(j + 1) = w / h(j + 1, j);

      // Apply accumulated Givens rotations, then form the new one.
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs[j] = h(j, j) / denom;
      sn[j] = h(j + 1, j) / denom;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      if (std::abs(g[j + 1]) <= tol * bnorm) {
        ++j;
        ++total;
        happy = true;
        break;
      }
      if (h(j + 1, j) == 0.0 && v.col(j + 1).norm() == 0.0) {
        ++j;
        ++total;
        happy = true;
        break;
      }
    }

    const Eigen::VectorXd y =
        h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += precond(v.leftCols(j) * y);
    rep.iterations = total;

    if (happy) {
      const double res = (b - op(x)).norm() / bnorm;
      if (res <= tol * 1.01) {   // allow round-off on the recomputed residual
        rep.status = Status::Converged;
        break;
      }
    }
  }

  rep.residual = (b - op(x)).norm() / bnorm;
  if (rep.residual <= tol) rep.status = Status::Converged;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {x, rep};
}

std::pair<Eigen::VectorXd, IterationReport> pcg(const HMatrix& h, const LinearMap& precond,
                                                const Eigen::VectorXd& b, double tol, int max_iter) {
  return pcg([&h](const Eigen::VectorXd& v) { return h.matvec(v); }, b, precond, tol, max_iter);
}

std::pair<Eigen::VectorXd, IterationReport> gmres(const HMatrix& h, const LinearMap& precond,
                                                  const Eigen::VectorXd& b, double tol, int restart,
                                                  int max_iter) {
  return gmres([&h](const Eigen::VectorXd& v) { return h.matvec(v); }, b, precond, tol, restart,
               max_iter);
}

}  // namespace hmhom
