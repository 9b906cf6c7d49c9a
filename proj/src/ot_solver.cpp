#include "spheremesh/ot_solver.hpp"

#include <cmath>
#include <limits>

#include "spheremesh/parallel.hpp"

namespace spheremesh {

namespace {

constexpr double kMassTolerance = 1e-6;

void normalize_potential(const Grid& grid, const SolverConfig& cfg,
                         ScalarField& u) {
  if (cfg.normalization == Normalization::FixedPoint) {
    const double shift = u[cfg.fixed_point_node];
    for (double& v : u.values) v -= shift;
  } else {
    const double area = grid.integrate(std::vector<double>(u.size(), 1.0));
    const double mean = grid.integrate(u) / area;
    for (double& v : u.values) v -= mean;
  }
}

}  // namespace

OtResult solve_ot(const Grid& grid, const StencilTable& st,
                  const DensityField& f0, const DensityField& f1,
                  const CostModel& cost, const OperatorParams& params,
                  const SolverConfig& cfg) {
  const int n = grid.num_points();
  const double imbalance = mass_balance_check(grid, f0, f1);
  if (imbalance > kMassTolerance) {
    throw_error(ErrorCode::MassImbalance,
                "densities differ in mass by " + std::to_string(imbalance));
  }
  for (int i = 0; i < n; ++i) {
    if (f0[i] <= 0.0 || f1[i] <= 0.0) {
      throw_error(ErrorCode::NonpositiveDensity,
                  "densities must be strictly positive");
    }
  }

  // Parabolic step control: conservative default, hard stability cap.
  const double row = st.max_lap_row_sum;
  const double dt_default =
      0.5 * grid.h() * grid.h() / (1.0 + params.eps_g * row);
  const double dt_cap = 0.5 / (row * (1.0 + params.eps_g));
  double dt = (cfg.dt > 0.0) ? cfg.dt : dt_default;

  OtResult result;
  result.u = ScalarField(n, 0.0);
  result.residual_history.reserve(1024);

  std::vector<double> g(n, 0.0);
  std::vector<int> hints(n, -1);
  ScalarField& u = result.u;

  double best_residual = std::numeric_limits<double>::infinity();
  ScalarField best_u = u;
  double prev_residual = std::numeric_limits<double>::infinity();
  int calm_sweeps = 0;

  for (long sweep = 0; sweep < cfg.max_iters; ++sweep) {
    parallel_for_blocks(n, [&](int begin, int end) {
      for (int i = begin; i < end; ++i) {
        const double fi =
            ot_operator(grid, st, u, i, f0, f1, cost, params, &hints[i]);
        const double ei = lipschitz_constraint(st, u, i, params.R);
        g[i] = std::max(fi, ei);
      }
    });
    double residual = 0.0;
    for (int i = 0; i < n; ++i) residual = std::max(residual, std::abs(g[i]));
    result.residual_history.push_back(residual);
    result.sweeps = sweep + 1;
    if (residual < best_residual) {
      best_residual = residual;
      best_u = u;
    }
    if (residual <= cfg.tol) {
      result.converged = true;
      break;
    }
    if (residual > prev_residual * (1.0 + 1e-12)) {
      dt *= 0.5;
      calm_sweeps = 0;
      if (dt < 1e-15) break;  // stalled; report the best iterate
    } else if (++calm_sweeps >= 25 && cfg.dt <= 0.0) {
      dt = std::min(dt * 1.4, dt_cap);
      calm_sweeps = 0;
    }
    prev_residual = residual;
    for (int i = 0; i < n; ++i) u[i] += dt * g[i];
  }

  if (!result.converged) u = best_u;
  result.residual = result.converged ? result.residual_history.back()
                                     : best_residual;
  result.final_dt = dt;
  normalize_potential(grid, cfg, u);
  return result;
}

SpherePoint extract_point(const SpherePoint& x, const TangentVector& p,
                          const CostModel& cost) {
  const double pn = p.norm();
  if (pn == 0.0 && cost.kind() == CostKind::SquaredGeodesic) return x;
  const double d = cost.map_distance(pn);
  const Vec3 dir = cost.map_direction_sign() * (p.v / pn);
  return exp_map(TangentVector(x, d * dir));
}

MapField extract_map(const Grid& grid, const StencilTable& st,
                     const ScalarField& u, const CostModel& cost) {
  MapField map;
  map.images.reserve(grid.num_points());
  for (int i = 0; i < grid.num_points(); ++i) {
    map.images.push_back(
        extract_point(grid.points()[i], gradient(grid, st, u, i), cost));
  }
  return map;
}

}  // namespace spheremesh
