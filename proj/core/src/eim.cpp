#include "hmhom/eim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hmhom/errors.hpp"

namespace hmhom {

void EimProblem::validate() const {
  microstructure.validate();
  if (microstructure.domain.kind != Domain::Kind::Ball)
    throw std::invalid_argument("this formulation needs a ball domain");
  if (!(kappa0 > 0.0)) throw std::invalid_argument("kappa0 must be positive");
  for (std::size_t a = 0; a < microstructure.spheres.size(); ++a)
    if (microstructure.spheres[a].kappa == kappa0)
      throw std::invalid_argument("inclusion " + std::to_string(a) +
                                  " has kappa equal to kappa0; the contrast factor does not exist");
}

Mat3 gamma_inf(const Vec3& x, const Vec3& y, double kappa0) {
  const Vec3 r = x - y;
  const double d2 = r.squaredNorm();
  if (!(d2 > 0.0)) throw std::invalid_argument("gamma_inf is singular at coincident points");
  const double d = std::sqrt(d2);
  const double c = 1.0 / (4.0 * std::numbers::pi * kappa0 * d2 * d);
  return c * (Mat3::Identity() - (3.0 / d2) * (r * r.transpose()));
}

Mat3 pairwise_interaction(const Sphere& a, const Sphere& b, double kappa0) {
  const bool self = &a == &b || (a.center == b.center && a.radius == b.radius);
  if (self) return a.volume() / (3.0 * kappa0) * Mat3::Identity();
  if ((a.center - b.center).norm() <= a.radius + b.radius)
    throw std::invalid_argument("pairwise interaction needs disjoint spheres");
  return a.volume() * b.volume() * gamma_inf(a.center, b.center, kappa0);
}

Mat3 domain_correction(const Sphere& a, const Sphere& b, const Domain& ball, double kappa0) {
  if (ball.kind != Domain::Kind::Ball) throw std::invalid_argument("domain correction needs a ball domain");
  if (a.center.norm() + a.radius > ball.ball_radius)
    throw std::invalid_argument("sphere is not inside the domain ball");
  return -(b.volume() * a.volume()) / (3.0 * kappa0) * Mat3::Identity();
}

namespace {

class EimGenerator final : public EntryGenerator {
 public:
  explicit EimGenerator(const EimProblem& problem)
      : spheres_(problem.microstructure.spheres), kappa0_(problem.kappa0) {
    volumes_.reserve(spheres_.size());
    contrast_.reserve(spheres_.size());
    for (const Sphere& s : spheres_) {
      volumes_.push_back(s.volume());
      contrast_.push_back(1.0 / (s.kappa - kappa0_));
    }
  }

  int rows() const override { return 3 * static_cast<int>(spheres_.size()); }
  int cols() const override { return rows(); }

  Mat3 block(int row_item, int col_item) const {
    const double fb = volumes_[static_cast<std::size_t>(row_item)];
    const double fa = volumes_[static_cast<std::size_t>(col_item)];
    Mat3 out;
    if (row_item == col_item) {
      out = fb * (contrast_[static_cast<std::size_t>(row_item)] + 1.0 / (3.0 * kappa0_)) * Mat3::Identity();
    } else {
      out = fa * fb * gamma_inf(spheres_[static_cast<std::size_t>(col_item)].center,
                                spheres_[static_cast<std::size_t>(row_item)].center, kappa0_);
    }
    out -= fb * fa / (3.0 * kappa0_) * Mat3::Identity();
    return out;
  }

  double entry(int i, int j) const override {
    return block(i / 3, j / 3)(i % 3, j % 3);
  }

  void row(int i, std::span<const int> cols_idx, std::span<double> out) const override {
    const int bi = i / 3, ci = i % 3;
    int cached = -1;
    Mat3 blk;
    for (std::size_t k = 0; k < cols_idx.size(); ++k) {
      const int bj = cols_idx[k] / 3;
      if (bj != cached) {
        blk = block(bi, bj);
        cached = bj;
      }
      out[k] = blk(ci, cols_idx[k] % 3);
    }
  }

  void column(int j, std::span<const int> rows_idx, std::span<double> out) const override {
    const int bj = j / 3, cj = j % 3;
    int cached = -1;
    Mat3 blk;
    for (std::size_t k = 0; k < rows_idx.size(); ++k) {
      const int bi = rows_idx[k] / 3;
      if (bi != cached) {
        blk = block(bi, bj);
        cached = bi;
      }
      out[k] = blk(rows_idx[k] % 3, cj);
    }
  }

 private:
  std::vector<Sphere> spheres_;   // copied so the generator owns its inputs
  double kappa0_;
  std::vector<double> volumes_;
  std::vector<double> contrast_;
};

}  // namespace

std::unique_ptr<EntryGenerator> eim_generator(const EimProblem& problem) {
  problem.validate();
  return std::make_unique<EimGenerator>(problem);
}

Eigen::VectorXd eim_rhs(const EimProblem& problem) {
  const auto& spheres = problem.microstructure.spheres;
  Eigen::VectorXd b(3 * static_cast<Eigen::Index>(spheres.size()));
  for (std::size_t a = 0; a < spheres.size(); ++a)
    b.segment<3>(3 * static_cast<Eigen::Index>(a)) = spheres[a].volume() * problem.macro_gradient;
  return b;
}

Eigen::MatrixXd materialize(const EntryGenerator& gen) {
  Eigen::MatrixXd a(gen.rows(), gen.cols());
  std::vector<int> cols(static_cast<std::size_t>(gen.cols()));
  for (int j = 0; j < gen.cols(); ++j) cols[static_cast<std::size_t>(j)] = j;
  Eigen::VectorXd buf(gen.cols());
  for (int i = 0; i < gen.rows(); ++i) {
    gen.row(i, cols, std::span<double>(buf.data(), static_cast<std::size_t>(gen.cols())));
    a.row(i) = buf.transpose();
  }
  return a;
}

EimOperator build_eim_operator(const EimProblem& problem, const EimSolveOptions& opts) {
  problem.validate();
  const auto& spheres = problem.microstructure.spheres;
  std::vector<Vec3> centers;
  centers.reserve(spheres.size());
  for (const Sphere& s : spheres) centers.push_back(s.center);

  EimOperator op;
  auto ct = std::make_shared<ClusterTree>(build_cluster_tree(centers, opts.c_leaf));
  auto bt = std::make_shared<BlockTree>(build_block_tree(ct, opts.eta));
  op.clusters = ct;
  op.blocks = bt;

  const auto gen = eim_generator(problem);
  AssemblyOptions aopts;
  aopts.epsilon = opts.epsilon;
  aopts.mode = opts.mode;
  aopts.threads = opts.threads;
  op.h = assemble(*gen, ct, bt, aopts, 3);

  const double eps_lu = opts.epsilon_lu.value_or(std::max(opts.epsilon, 1e-2));
  op.lu = std::make_unique<HluFactor>(op.h, eps_lu);

  op.stats = op.h.stats();
  op.stats.factor_seconds = op.lu->factor_seconds();
  return op;
}

EimSolution solve_with_operator(const EimProblem& problem, const EimOperator& op, const Vec3& gradient,
                                const EimSolveOptions& opts) {
  EimProblem p = problem;
  p.macro_gradient = gradient;
  const Eigen::VectorXd b = eim_rhs(p);

  LinearMap precond = op.lu ? LinearMap([&op](const Eigen::VectorXd& r) { return op.lu->solve(r); })
                            : identity_precond();

  EimSolution sol;
  auto [x, rep] = pcg(op.h, precond, b, opts.tol, opts.max_iter);
  if (rep.status == IterationReport::Status::Breakdown) {
    sol.used_gmres_fallback = true;
    std::tie(x, rep) = gmres(op.h, precond, b, opts.tol, 50, opts.max_iter);
  }
  if (!rep.converged())
    throw SolverFailure("polarization solve did not converge: relative residual " +
                        std::to_string(rep.residual) + " after " + std::to_string(rep.iterations) +
                        " iterations");

  const std::size_t n = problem.microstructure.spheres.size();
  sol.tau.resize(n);
  for (std::size_t a = 0; a < n; ++a) sol.tau[a] = x.segment<3>(3 * static_cast<Eigen::Index>(a));
  sol.stats = op.stats;
  sol.stats.solve_seconds = rep.seconds;
  sol.report = rep;
  return sol;
}

EimSolution solve_eim(const EimProblem& problem, const EimSolveOptions& opts) {
  if (problem.microstructure.spheres.empty()) {
    problem.validate();
    return EimSolution{};
  }
  const EimOperator op = build_eim_operator(problem, opts);
  return solve_with_operator(problem, op, problem.macro_gradient, opts);
}

EffectiveEstimate effective_estimate(const EimProblem& problem,
                                     const std::array<PolarizationField, 3>& tau_per_direction) {
  const auto& spheres = problem.microstructure.spheres;
  for (const auto& tau : tau_per_direction)
    if (tau.size() != spheres.size())
      throw std::invalid_argument("polarization missing for some basis direction");

  const double volume = problem.microstructure.domain.volume();
  Mat3 k = problem.kappa0 * Mat3::Identity();
  for (int j = 0; j < 3; ++j) {
    Vec3 sum = Vec3::Zero();
    for (std::size_t a = 0; a < spheres.size(); ++a)
      sum += spheres[a].volume() * tau_per_direction[static_cast<std::size_t>(j)][a];
    k.col(j) += sum / volume;
  }

  EffectiveEstimate est;
  est.tensor = 0.5 * (k + k.transpose());
  est.scalar = est.tensor.trace() / 3.0;
  est.volume_fraction = volume_fraction(problem.microstructure);
  return est;
}

EffectiveEstimate effective_estimate_eim(const EimProblem& problem, const EimSolveOptions& opts) {
  if (problem.microstructure.spheres.empty()) {
    problem.validate();
    EffectiveEstimate est;
    est.tensor = problem.kappa0 * Mat3::Identity();
    est.scalar = problem.kappa0;
    return est;
  }
  const EimOperator op = build_eim_operator(problem, opts);
  std::array<PolarizationField, 3> taus;
  for (int j = 0; j < 3; ++j)
    taus[static_cast<std::size_t>(j)] = solve_with_operator(problem, op, Vec3::Unit(j), opts).tau;
  return effective_estimate(problem, taus);
}

}  // namespace hmhom
