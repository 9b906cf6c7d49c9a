#include "spheremesh/poisson.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <vector>

namespace spheremesh {

PoissonSolver::PoissonSolver(const Grid& grid, const StencilTable& st,
                             const OperatorParams& params)
    : grid_(grid), st_(st), params_(params) {
  if (params_.eps_h <= 0.0) {
    params_.eps_h = std::max(measure_laplacian_consistency(grid, st), 1e-12);
  }
  const int n = grid.num_points();

  min_candidate_distance_ = std::numeric_limits<double>::infinity();
  for (const NodeStencil& ns : st.nodes) {
    for (const Candidate& c : ns.candidates) {
      min_candidate_distance_ = std::min(min_candidate_distance_, c.r);
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(9) * n);
  for (int i = 0; i < n; ++i) {
    double diag = params_.eps_h;
    for (int d : {st.dirset.coordinate_e1(), st.dirset.coordinate_e2()}) {
      const DirectionEntry& e = st.entry(i, d);
      for (int q = 0; q < 4; ++q) {
        triplets.emplace_back(i, e.nbr[q], e.a[q]);
        diag -= e.a[q];
      }
    }
    triplets.emplace_back(i, i, diag);
  }
  matrix_.resize(n, n);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();

  krylov_ = std::make_unique<
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>>>();
  krylov_->setTolerance(1e-14);
  krylov_->setMaxIterations(40 * n);
  krylov_->compute(matrix_);
}

void PoissonSolver::shift_mean_zero(ScalarField& u) const {
  const double area = grid_.integrate(std::vector<double>(u.size(), 1.0));
  const double mean = grid_.integrate(u) / area;
  for (double& v : u.values) v -= mean;
}

ScalarField PoissonSolver::solve(const ScalarField& rhs) const {
  const int n = grid_.num_points();
  if (static_cast<int>(rhs.size()) != n) {
    throw_error(ErrorCode::DegenerateConfiguration, "rhs length mismatch");
  }
  stats_ = Stats{};

  // Compatibility projection (quadrature mean zero).
  ScalarField f = rhs;
  shift_mean_zero(f);

  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = f[i];

  Eigen::VectorXd x = krylov_->solve(b);
  double residual = (matrix_ * x - b).cwiseAbs().maxCoeff();
  const double residual_gate = 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff());
  if (krylov_->info() != Eigen::Success || !x.allFinite() ||
      residual > residual_gate) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> direct;
    direct.compute(matrix_);
    if (direct.info() != Eigen::Success) {
      throw_error(ErrorCode::LinearSolveFailure,
                  "Poisson system factorization failed");
    }
    x = direct.solve(b);
    residual = (matrix_ * x - b).cwiseAbs().maxCoeff();
    if (direct.info() != Eigen::Success || !x.allFinite() ||
        residual > residual_gate) {
      throw_error(ErrorCode::LinearSolveFailure,
                  "Poisson residual " + std::to_string(residual) +
                      " exceeds tolerance");
    }
  }
  stats_.residual_inf = residual;

  ScalarField u(n);
  for (int i = 0; i < n; ++i) u[i] = x[i];
  shift_mean_zero(u);

  // Lipschitz verification; the paper's expectation is that this passes.
  double grad_max = 0.0;
  for (int i = 0; i < n; ++i) {
    grad_max = std::max(grad_max, gradient_coords(st_, u, i).norm());
  }
  if (grad_max < params_.R) return u;

  stats_.used_fallback = true;
  return solve_fallback(f);
}

ScalarField PoissonSolver::solve_fallback(const ScalarField& f) const {
  const int n = grid_.num_points();
  ScalarField u(n, 0.0);
  ScalarField neg(n, 0.0);
  std::vector<double> g(n, 0.0);

  const double row_bound = st_.max_lap_row_sum +
                           1.0 / min_candidate_distance_ + params_.eps_h;
  double dt = 1.0 / row_bound;
  double f_inf = 0.0;
  for (double v : f.values) f_inf = std::max(f_inf, std::abs(v));
  const double tol = 1e-8 * std::max(1.0, f_inf);
  double prev_residual = std::numeric_limits<double>::infinity();
  const int max_sweeps = 2000000;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) neg[i] = -u[i];
    double residual = 0.0;
    for (int i = 0; i < n; ++i) {
      const double elliptic = -laplacian(st_, u, i) + f[i];
      const double constraint = lipschitz_constraint(st_, neg, i, params_.R);
      g[i] = std::max(elliptic, constraint) + params_.eps_h * u[i];
      residual = std::max(residual, std::abs(g[i]));
    }
    if (residual <= tol) {
      stats_.fallback_sweeps = sweep;
      shift_mean_zero(u);
      return u;
    }
    if (residual > prev_residual * (1.0 + 1e-12)) {
      dt *= 0.5;
      if (dt < 1e-16) break;
    }
    prev_residual = residual;
    for (int i = 0; i < n; ++i) u[i] -= dt * g[i];
  }
  throw_error(ErrorCode::FallbackDidNotConverge,
              "max-form Poisson iteration did not reach tolerance");
}

ScalarField solve_poisson(const Grid& grid, const StencilTable& st,
                          const ScalarField& rhs, const OperatorParams& params) {
  PoissonSolver solver(grid, st, params);
  return solver.solve(rhs);
}

}  // namespace spheremesh
