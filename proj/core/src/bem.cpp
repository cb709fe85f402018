#include "hmhom/bem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hmhom/errors.hpp"

namespace hmhom {

namespace {

constexpr double kPi = std::numbers::pi;

double g_free(const Vec3& r) { return 1.0 / (4.0 * kPi * r.norm()); }

// Gradient of the scalar kernel at argument r, oriented so -n.grad gives the
// operator with +1/2(2l+1) sphere eigenvalues.
Vec3 kernel_grad_free(const Vec3& r) {
  const double d2 = r.squaredNorm();
  return -r / (4.0 * kPi * d2 * std::sqrt(d2));
}

}  // namespace

void BieProblem::validate() const {
  if (!(kappa_int > 0.0) || !(kappa_ext > 0.0))
    throw std::invalid_argument("coefficients must be positive");
  if (kappa_int == kappa_ext)
    throw std::invalid_argument("equal coefficients: the contrast factor does not exist");
  if (mesh.panel_count() == 0) throw std::invalid_argument("empty mesh");
  if (mesh.centroid.size() != mesh.triangles.size())
    throw std::invalid_argument("mesh cache not built");
  if (kernel == Kernel::Periodic) {
    if (!expansion) throw std::invalid_argument("periodic kernel needs a Green expansion");
    for (const Vec3& v : mesh.vertices)
      for (int i = 0; i < 3; ++i)
        if (!(std::abs(v[i]) < 0.5))
          throw std::invalid_argument("mesh must be strictly inside the unit cell");
  }
}

double BieProblem::contrast_lambda() const {
  return (kappa_int + kappa_ext) / (2.0 * (kappa_int - kappa_ext));
}

namespace {

class KprimeGenerator final : public EntryGenerator {
 public:
  KprimeGenerator(const BieProblem& problem)
      : mesh_(problem.mesh),
        periodic_(problem.kernel == BieProblem::Kernel::Periodic),
        expansion_(problem.expansion),
        normal_at_source_(problem.normal_at_source),
        n_(problem.mesh.panel_count()) {}

  int rows() const override { return n_; }
  int cols() const override { return n_; }

  double entry(int i, int j) const override {
    const std::size_t si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
    const Vec3& nrm = normal_at_source_ ? mesh_.normal[sj] : mesh_.normal[si];
    if (i == j) {
      if (!periodic_) return 0.0;   // (x - y) stays in the panel plane
      return -mesh_.area[si] * nrm.dot(grad_gper_regular(*expansion_, Vec3::Zero()));
    }
    const Vec3 r = mesh_.centroid[si] - mesh_.centroid[sj];
    const Vec3 grad = periodic_ ? grad_gper(*expansion_, r) : kernel_grad_free(r);
    return -mesh_.area[sj] * nrm.dot(grad);
  }

 private:
  TriangleMesh mesh_;   // copied so the generator owns its inputs
  bool periodic_;
  std::shared_ptr<const PeriodicGreenExpansion> expansion_;
  bool normal_at_source_;
  int n_;
};

}  // namespace

std::unique_ptr<EntryGenerator> kprime_generator(const BieProblem& problem) {
  problem.validate();
  return std::make_unique<KprimeGenerator>(problem);
}

BemOperator build_bem_operator(const BieProblem& problem, const BemSolveOptions& opts) {
  problem.validate();
  BemOperator op;
  auto ct = std::make_shared<ClusterTree>(build_cluster_tree(problem.mesh.centroid, opts.c_leaf));
  auto bt = std::make_shared<BlockTree>(build_block_tree(ct, opts.eta));
  op.clusters = ct;
  op.blocks = bt;

  const auto gen = kprime_generator(problem);
  AssemblyOptions aopts;
  aopts.epsilon = opts.epsilon;
  aopts.mode = opts.mode;
  aopts.threads = opts.threads;
  op.h = assemble(*gen, ct, bt, aopts, 1);
  op.stats = op.h.stats();
  return op;
}

BemSolution solve_with_operator(const BieProblem& problem, const BemOperator& op,
                                const Vec3& gradient, const BemSolveOptions& opts) {
  const int n = problem.mesh.panel_count();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = gradient.dot(problem.mesh.normal[static_cast<std::size_t>(i)]);

  const double lambda = problem.contrast_lambda();
  const LinearMap system = [&op, lambda](const Eigen::VectorXd& x) {
    return (lambda * x - op.h.matvec(x)).eval();
  };

  auto [x, rep] = gmres(system, b, identity_precond(), opts.tol, opts.restart, opts.max_iter);
  if (!rep.converged())
    throw SolverFailure("boundary solve did not converge: relative residual " +
                        std::to_string(rep.residual));

  BemSolution sol;
  sol.sigma = -x;   // classical single-layer density
  sol.stats = op.stats;
  sol.stats.solve_seconds = rep.seconds;
  sol.report = rep;
  return sol;
}

BemSolution solve_bie(const BieProblem& problem, const BemSolveOptions& opts) {
  const BemOperator op = build_bem_operator(problem, opts);
  return solve_with_operator(problem, op, problem.macro_gradient, opts);
}

namespace {

double panel_diameter(const TriangleMesh& mesh, std::size_t t) {
  const Vec3& a = mesh.vertices[static_cast<std::size_t>(mesh.triangles[t][0])];
  const Vec3& b = mesh.vertices[static_cast<std::size_t>(mesh.triangles[t][1])];
  const Vec3& c = mesh.vertices[static_cast<std::size_t>(mesh.triangles[t][2])];
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

// Integral of 1/|p - y| over the triangle, p strictly inside its plane
// footprint: sum of wedge integrals d [asinh(t2/d) - asinh(t1/d)] per edge.
double flat_triangle_inverse_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3* v[4] = {&a, &b, &c, &a};
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec3& v1 = *v[e];
    const Vec3& v2 = *v[e + 1];
    const Vec3 dir = (v2 - v1).normalized();
    const Vec3 foot = v1 + dir * (p - v1).dot(dir);
    const double d = (p - foot).norm();
    if (d < 1e-14) continue;   // p on the edge line: degenerate wedge
    const double t1 = (v1 - foot).dot(dir);
    const double t2 = (v2 - foot).dot(dir);
    total += d * (std::asinh(t2 / d) - std::asinh(t1 / d));
  }
  return total;
}

}  // namespace

CorrectorSamples eval_corrector(const BieProblem& problem, const DensityField& sigma,
                                std::span<const Vec3> points) {
  if (sigma.size() != problem.mesh.panel_count())
    throw std::invalid_argument("density size does not match the mesh");
  const bool periodic = problem.kernel == BieProblem::Kernel::Periodic;
  const TriangleMesh& mesh = problem.mesh;
  const std::size_t np = mesh.triangles.size();

  std::vector<double> diam(np);
  for (std::size_t t = 0; t < np; ++t) diam[t] = panel_diameter(mesh, t);

  CorrectorSamples out;
  out.values.resize(static_cast<Eigen::Index>(points.size()));
  out.near_panel.assign(points.size(), 0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    double u = 0.0;
    bool near = false;
    for (std::size_t j = 0; j < np; ++j) {
      const Vec3 r = points[k] - mesh.centroid[j];
      if (r.norm() < diam[j]) near = true;
      const double g = periodic ? eval_gper(*problem.expansion, r) : g_free(r);
      u += sigma[static_cast<Eigen::Index>(j)] * mesh.area[j] * g;
    }
    out.values[static_cast<Eigen::Index>(k)] = u;
    out.near_panel[k] = near ? 1 : 0;
  }
  return out;
}

Eigen::VectorXd boundary_trace(const BieProblem& problem, const DensityField& sigma) {
  if (sigma.size() != problem.mesh.panel_count())
    throw std::invalid_argument("density size does not match the mesh");
  const bool periodic = problem.kernel == BieProblem::Kernel::Periodic;
  const TriangleMesh& mesh = problem.mesh;
  const int n = mesh.panel_count();

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      if (i == j) {
        const auto& tri = mesh.triangles[sj];
        double self = flat_triangle_inverse_distance(
                          mesh.centroid[sj], mesh.vertices[static_cast<std::size_t>(tri[0])],
                          mesh.vertices[static_cast<std::size_t>(tri[1])],
                          mesh.vertices[static_cast<std::size_t>(tri[2])]) /
                      (4.0 * kPi);
        if (periodic) self += mesh.area[sj] * eval_gper_regular(*problem.expansion, Vec3::Zero());
        acc += sigma[j] * self;
      } else {
        const Vec3 r = mesh.centroid[si] - mesh.centroid[sj];
        const double g = periodic ? eval_gper(*problem.expansion, r) : g_free(r);
        acc += sigma[j] * mesh.area[sj] * g;
      }
    }
    u[i] = acc;
  }
  return u;
}

std::vector<double> mesh_inclusion_volumes(const TriangleMesh& mesh) {
  int max_owner = -1;
  for (int o : mesh.owner) max_owner = std::max(max_owner, o);
  std::vector<double> vol(static_cast<std::size_t>(max_owner + 1), 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    vol[static_cast<std::size_t>(mesh.owner[t])] +=
        mesh.area[t] * mesh.centroid[t].dot(mesh.normal[t]) / 3.0;
  return vol;
}

EffectiveEstimate effective_estimate_bem(const BieProblem& problem,
                                         const std::array<DensityField, 3>& sigma_per_direction) {
  problem.validate();
  const TriangleMesh& mesh = problem.mesh;
  const double cell_volume = 1.0;   // estimates are per unit cell

  const std::vector<double> volumes = mesh_inclusion_volumes(mesh);
  double f_total = 0.0;
  for (double v : volumes) f_total += v;

  Mat3 k = problem.kappa_ext * Mat3::Identity();
  const double contrast = problem.kappa_int - problem.kappa_ext;
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd u = boundary_trace(problem, sigma_per_direction[static_cast<std::size_t>(j)]);
    Vec3 flux = f_total * Vec3::Unit(j);
    for (int t = 0; t < mesh.panel_count(); ++t)
      flux += u[t] * mesh.area[static_cast<std::size_t>(t)] * mesh.normal[static_cast<std::size_t>(t)];
    k.col(j) += contrast / cell_volume * flux;
  }

  EffectiveEstimate est;
  est.tensor = 0.5 * (k + k.transpose());
  est.scalar = est.tensor.trace() / 3.0;
  est.volume_fraction = f_total / cell_volume;
  return est;
}

EffectiveEstimate effective_estimate_bem_pipeline(const BieProblem& problem,
                                                  const BemSolveOptions& opts) {
  const BemOperator op = build_bem_operator(problem, opts);
  std::array<DensityField, 3> sigmas;
  for (int j = 0; j < 3; ++j)
    sigmas[static_cast<std::size_t>(j)] = solve_with_operator(problem, op, Vec3::Unit(j), opts).sigma;
  return effective_estimate_bem(problem, sigmas);
}

}  // namespace hmhom
