#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <memory>

#include "spheremesh/operators.hpp"

namespace spheremesh {

/// Solves the discretized Poisson equation Delta^h u + eps_h u = f on the
/// grid for quadrature-mean-zero right-hand sides (the RHS is projected on
/// every call). After the linear solve the Lipschitz bound max|grad^h u| < R
/// is verified; if it fails, the parabolic iteration on the max-form operator
///   max{-Delta^h u + f, E^h} + eps_h u = 0
/// takes over. The assembled system is cached, so repeated solves (one per
/// OIT step) reuse the preconditioner.
class PoissonSolver {
 public:
  struct Stats {
    double residual_inf = 0.0;
    bool used_fallback = false;
    int fallback_sweeps = 0;
  };

  PoissonSolver(const Grid& grid, const StencilTable& st,
                const OperatorParams& params);

  /// Returns the quadrature-mean-zero solution.
  ScalarField solve(const ScalarField& rhs) const;

  double eps_h() const { return params_.eps_h; }
  const Stats& last_stats() const { return stats_; }

 private:
  const Grid& grid_;
  const StencilTable& st_;
  OperatorParams params_;
  double min_candidate_distance_;
  Eigen::SparseMatrix<double> matrix_;
  std::unique_ptr<
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>
      krylov_;
  mutable Stats stats_;

  ScalarField solve_fallback(const ScalarField& rhs) const;
  void shift_mean_zero(ScalarField& u) const;
};

/// One-shot convenience wrapper around PoissonSolver.
ScalarField solve_poisson(const Grid& grid, const StencilTable& st,
                          const ScalarField& rhs, const OperatorParams& params);

}  // namespace spheremesh
