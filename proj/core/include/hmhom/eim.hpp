#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "hmhom/entry_generator.hpp"
#include "hmhom/geometry.hpp"
#include "hmhom/hlu.hpp"
#include "hmhom/hmatrix.hpp"
#include "hmhom/solvers.hpp"

namespace hmhom {

/// Volumic integral formulation over constant-per-inclusion polarizations in
/// a spherical domain, with the reference medium matching the matrix.
struct EimProblem {
  Microstructure microstructure;   // ball domain
  double kappa0{1.0};              // reference coefficient
  Vec3 macro_gradient{Vec3::UnitX()};

  /// Checks the microstructure, kappa0 > 0, a ball domain, and that no
  /// inclusion coefficient equals kappa0 (the contrast factor must exist).
  void validate() const;
};

/// Per-inclusion polarization vectors; zero in the matrix by construction.
using PolarizationField = std::vector<Vec3>;

struct EffectiveEstimate {
  Mat3 tensor{Mat3::Zero()};
  double scalar{0.0};              // trace / 3
  double volume_fraction{0.0};
};

/// Free-space fundamental operator: kappa0^{-1} grad_y grad_x of the Laplace
/// Green's function, i.e. (I - 3 rr^T/|r|^2) / (4 pi kappa0 |r|^3) with
/// r = x - y. Symmetric and trace-free; throws on coincident points.
Mat3 gamma_inf(const Vec3& x, const Vec3& y, double kappa0);

/// Double ball integral of gamma_inf against the two indicator functions.
/// Distinct disjoint spheres reduce to f_a f_b gamma_inf(c_a, c_b) by the
/// mean value property; the self term is f_a / (3 kappa0) * I.
Mat3 pairwise_interaction(const Sphere& a, const Sphere& b, double kappa0);

/// Domain term -f_b * integral over the enclosing ball: the inner integral
/// of gamma_inf over a ball containing the evaluation point is the constant
/// I / (3 kappa0), so the result is -f_b f_a / (3 kappa0) * I.
Mat3 domain_correction(const Sphere& a, const Sphere& b, const Domain& ball, double kappa0);

/// Scalar entry oracle over the 3n x 3n coupled system; row 3b+i / column
/// 3a+j address component (i, j) of the (b, a) inclusion block. Pure and
/// safe for concurrent use.
std::unique_ptr<EntryGenerator> eim_generator(const EimProblem& problem);

/// Right-hand side f_b * E in the original scalar ordering.
Eigen::VectorXd eim_rhs(const EimProblem& problem);

/// Materializes any generator densely (oracle/testing helper; small n only).
Eigen::MatrixXd materialize(const EntryGenerator& gen);

struct EimSolveOptions {
  double epsilon{1e-3};
  double eta{1.7};
  int c_leaf{15};
  AcaMode mode{AcaMode::Partial};
  std::optional<double> epsilon_lu;   // default max(epsilon, 1e-2)
  double tol{1e-10};
  int max_iter{2000};
  int threads{0};
};

struct EimSolution {
  PolarizationField tau;
  CompressionStats stats;
  IterationReport report;
  bool used_gmres_fallback{false};
};

/// Assembled operator with its preconditioner, reusable across right-hand
/// sides (the matrix does not depend on the macroscopic gradient).
struct EimOperator {
  std::shared_ptr<const ClusterTree> clusters;
  std::shared_ptr<const BlockTree> blocks;
  HMatrix h;
  std::unique_ptr<HluFactor> lu;
  CompressionStats stats;
};

EimOperator build_eim_operator(const EimProblem& problem, const EimSolveOptions& opts);

/// Solves for the polarization with the given macroscopic gradient using the
/// prebuilt operator: preconditioned CG, falling back to GMRES on curvature
/// breakdown. Throws SolverFailure if neither converges.
EimSolution solve_with_operator(const EimProblem& problem, const EimOperator& op, const Vec3& gradient,
                                const EimSolveOptions& opts);

/// Assembles, preconditions and solves for the problem's own gradient.
EimSolution solve_eim(const EimProblem& problem, const EimSolveOptions& opts = {});

/// Effective tensor from the three basis-direction polarizations:
/// keff e_j = kappa0 e_j + (1/|Omega|) sum_a f_a tau_a^{(j)}, symmetrized.
EffectiveEstimate effective_estimate(const EimProblem& problem,
                                     const std::array<PolarizationField, 3>& tau_per_direction);

/// Convenience pipeline: one assembly, three directional solves, estimate.
EffectiveEstimate effective_estimate_eim(const EimProblem& problem, const EimSolveOptions& opts = {});

}  // namespace hmhom
