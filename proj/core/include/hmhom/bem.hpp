#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hmhom/eim.hpp"
#include "hmhom/entry_generator.hpp"
#include "hmhom/hmatrix.hpp"
#include "hmhom/mesh.hpp"
#include "hmhom/periodic_green.hpp"
#include "hmhom/solvers.hpp"

namespace hmhom {

/// Transmission problem on the boundary of the inclusions: the corrector is
/// represented by a single-layer potential and the density solves a
/// second-kind equation with the adjoint double-layer operator.
struct BieProblem {
  TriangleMesh mesh;
  double kappa_int{100.0};
  double kappa_ext{1.0};
  Vec3 macro_gradient{Vec3::UnitX()};

  enum class Kernel { FreeSpace, Periodic };
  Kernel kernel{Kernel::FreeSpace};
  std::shared_ptr<const PeriodicGreenExpansion> expansion;   // required for Periodic

  /// Alternative operator convention (normal taken at the source panel
  /// instead of the collocation point); kept selectable for comparison,
  /// never mixed with the default.
  bool normal_at_source{false};

  void validate() const;

  /// Contrast factor of the second-kind system (lambda Id - K') sigma = rhs:
  /// (kappa_int + kappa_ext) / (2 (kappa_int - kappa_ext)). With the
  /// operator's sphere eigenvalues +1/2(2l+1), this reproduces the analytic
  /// single-sphere transmission solution.
  double contrast_lambda() const;
};

/// Per-panel constant single-layer density.
using DensityField = Eigen::VectorXd;

/// Collocation entries of the adjoint double-layer operator: for i != j,
/// K_ij = area_j * n_i . (x_i - y_j) / (4 pi |x_i - y_j|^3) in the free-space
/// case (gradient of the periodic kernel in the periodic case), oriented so
/// that row sums approach +1/2 on a closed outward-oriented surface. The
/// free-space self entry vanishes on flat panels; the periodic self entry
/// keeps the smooth correction evaluated at the centroid times the area.
std::unique_ptr<EntryGenerator> kprime_generator(const BieProblem& problem);

struct BemSolveOptions {
  double epsilon{1e-3};
  double eta{1.7};
  int c_leaf{15};
  AcaMode mode{AcaMode::Partial};
  double tol{1e-8};
  int restart{50};
  int max_iter{2000};
  int threads{0};
};

/// Assembled operator, reusable across right-hand sides and contrasts (the
/// identity part and the contrast factor stay outside the compression).
struct BemOperator {
  std::shared_ptr<const ClusterTree> clusters;
  std::shared_ptr<const BlockTree> blocks;
  HMatrix h;   // compressed K' only
  CompressionStats stats;
};

BemOperator build_bem_operator(const BieProblem& problem, const BemSolveOptions& opts);

struct BemSolution {
  DensityField sigma;
  CompressionStats stats;
  IterationReport report;
};

/// GMRES solve of (lambda Id - K') with the identity part applied exactly.
/// Returns the classical single-layer density: u = sum_j sigma_j area_j
/// G(x - y_j) reproduces the corrector (the solved system's unknown is its
/// negative; the sign is flipped on return).
BemSolution solve_with_operator(const BieProblem& problem, const BemOperator& op,
                                const Vec3& gradient, const BemSolveOptions& opts);
BemSolution solve_bie(const BieProblem& problem, const BemSolveOptions& opts = {});

struct CorrectorSamples {
  Eigen::VectorXd values;
  std::vector<std::uint8_t> near_panel;   // 1: closer to a panel than its diameter
};

/// Single-layer potential by the centroid rule, u(x) = sum_j sigma_j area_j
/// G(x - y_j). Points closer to a panel than its diameter are flagged; the
/// value is still returned.
CorrectorSamples eval_corrector(const BieProblem& problem, const DensityField& sigma,
                                std::span<const Vec3> points);

/// Boundary trace of the single-layer potential at panel centroids; the
/// singular self panel uses the analytic flat-triangle integral.
Eigen::VectorXd boundary_trace(const BieProblem& problem, const DensityField& sigma);

/// Volume of each inclusion enclosed by its panels (divergence theorem;
/// exact for the polyhedral surface).
std::vector<double> mesh_inclusion_volumes(const TriangleMesh& mesh);

/// Effective tensor from three directional densities:
/// keff e_j = kappa_ext e_j + (kappa_int - kappa_ext) / |cell| *
///            (sum_inc f_inc e_j + sum_panels u_i n_i area_i), symmetrized.
EffectiveEstimate effective_estimate_bem(const BieProblem& problem,
                                         const std::array<DensityField, 3>& sigma_per_direction);

/// One assembly, three directional solves, estimate.
EffectiveEstimate effective_estimate_bem_pipeline(const BieProblem& problem,
                                                  const BemSolveOptions& opts = {});

}  // namespace hmhom
