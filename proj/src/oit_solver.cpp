#include "spheremesh/oit_solver.hpp"

#include <cmath>

namespace spheremesh {

GeodesicData fisher_rao_theta(const Grid& grid, const DensityField& rho0,
                              const DensityField& rho1) {
  const int n = grid.num_points();
  if (static_cast<int>(rho0.size()) != n || static_cast<int>(rho1.size()) != n) {
    throw_error(ErrorCode::DegenerateConfiguration, "density length mismatch");
  }
  GeodesicData gd;
  gd.w0 = ScalarField(n);
  gd.w1 = ScalarField(n);
  std::vector<double> prod(n);
  for (int i = 0; i < n; ++i) {
    if (rho0[i] <= 0.0 || rho1[i] <= 0.0) {
      throw_error(ErrorCode::NonpositiveDensity,
                  "Fisher-Rao angle requires strictly positive densities");
    }
    gd.w0[i] = std::sqrt(rho0[i]);
    gd.w1[i] = std::sqrt(rho1[i]);
    prod[i] = gd.w0[i] * gd.w1[i];
  }
  // vol(M) evaluated with the same quadrature keeps <w, w>/vol = 1 exact for
  // identical unit fields.
  const double vol = grid.integrate(std::vector<double>(n, 1.0));
  const double cos_theta =
      std::clamp(grid.integrate(prod) / vol, -1.0, 1.0);
  gd.theta = std::acos(cos_theta);
  return gd;
}

ScalarField geodesic_log_derivative(const GeodesicData& gd, double t) {
  const int n = static_cast<int>(gd.w0.size());
  ScalarField nu(n, 0.0);
  if (gd.theta < 1e-10) return nu;  // stationary geodesic
  const double st = std::sin(gd.theta);
  const double a = std::sin((1.0 - t) * gd.theta) / st;
  const double b = std::sin(t * gd.theta) / st;
  const double a_dot = -gd.theta * std::cos((1.0 - t) * gd.theta) / st;
  const double b_dot = gd.theta * std::cos(t * gd.theta) / st;
  for (int i = 0; i < n; ++i) {
    const double g = a * gd.w0[i] + b * gd.w1[i];
    if (g <= 0.0) {
      throw_error(ErrorCode::GeodesicDegenerate,
                  "square-root density vanished along the geodesic");
    }
    nu[i] = 2.0 * (a_dot * gd.w0[i] + b_dot * gd.w1[i]) / g;
  }
  return nu;
}

OitState OitState::identity(const Grid& grid) {
  OitState s;
  s.forward = MapField::identity_on(grid.points());
  s.inverse = MapField::identity_on(grid.points());
  return s;
}

OitStepStats oit_step(OitState& state, const GeodesicData& gd, const Grid& grid,
                      const StencilTable& st, const PoissonSolver& poisson,
                      double dt, const OitConfig& cfg, OitWorkspace& ws) {
  const int n = grid.num_points();
  if (ws.hint_inverse.empty()) {
    ws.hint_inverse.assign(n, -1);
    ws.hint_forward.assign(n, -1);
    ws.hint_back.assign(n, -1);
    ws.hint_comp.assign(n, -1);
    ws.grad.assign(n, Vec3::Zero());
    ws.rhs = ScalarField(n, 0.0);
  }

  OitStepStats stats;
  const ScalarField nu = geodesic_log_derivative(gd, state.t);

  // Mass conservation along the geodesic: integral of nu_t mu_t vanishes.
  {
    const double a = (gd.theta < 1e-10)
                         ? 1.0 - state.t
                         : std::sin((1.0 - state.t) * gd.theta) / std::sin(gd.theta);
    const double b = (gd.theta < 1e-10)
                         ? state.t
                         : std::sin(state.t * gd.theta) / std::sin(gd.theta);
    std::vector<double> nu_mu(n);
    for (int i = 0; i < n; ++i) {
      const double g = a * gd.w0[i] + b * gd.w1[i];
      nu_mu[i] = nu[i] * g * g;
    }
    stats.mass_conservation = std::abs(grid.integrate(nu_mu));
  }

  // (1) nu_t at the inverse-map samples, (2)+(3) mean-zero projected Poisson
  // solve, (4) nodal gradients.
  for (int i = 0; i < n; ++i) {
    ws.rhs[i] = grid.interp_scalar(nu.values, state.inverse.images[i],
                                   &ws.hint_inverse[i]);
  }
  const ScalarField f = poisson.solve(ws.rhs);
  stats.poisson_residual = poisson.last_stats().residual_inf;
  for (int i = 0; i < n; ++i) ws.grad[i] = gradient(grid, st, f, i).v;

  // (5) forward update: T += dt * grad f evaluated at T, reprojected.
  MapField forward_next;
  forward_next.images.reserve(n);
  for (int i = 0; i < n; ++i) {
    const SpherePoint& ti = state.forward.images[i];
    const TangentVector v = grid.interp_vector(ws.grad, ti, &ws.hint_forward[i]);
    forward_next.images.push_back(project_to_sphere(ti.vec() + dt * v.v));
  }

  // (6) inverse update: compose S with the backward Euler displacement at x_i.
  MapField inverse_next;
  inverse_next.images.reserve(n);
  for (int i = 0; i < n; ++i) {
    const SpherePoint y =
        project_to_sphere(grid.points()[i].vec() - dt * ws.grad[i]);
    inverse_next.images.push_back(
        grid.interp_map(state.inverse, y, &ws.hint_back[i]));
  }

  state.forward = std::move(forward_next);
  state.inverse = std::move(inverse_next);
  state.t += dt;
  state.step += 1;
  stats.t = state.t;

  if (cfg.check_composition) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const SpherePoint roundtrip = grid.interp_map(
          state.inverse, state.forward.images[i], &ws.hint_comp[i]);
      worst = std::max(worst,
                       geodesic_distance(roundtrip, grid.points()[i]));
    }
    stats.composition_error = worst;
    const double threshold =
        cfg.composition_tolerance_factor * (grid.h() + std::abs(dt));
    if (worst > threshold) {
      throw_error(ErrorCode::TangledIntermediateMap,
                  "composition error " + std::to_string(worst) +
                      " exceeds threshold " + std::to_string(threshold) +
                      " at step " + std::to_string(state.step));
    }
  }
  return stats;
}

OitResult solve_oit(const Grid& grid, const StencilTable& st,
                    const DensityField& rho0, const DensityField& rho1,
                    const OitConfig& cfg) {
  if (cfg.steps < 1) {
    throw_error(ErrorCode::DegenerateConfiguration, "OIT needs steps >= 1");
  }
  const double imbalance = mass_balance_check(grid, rho0, rho1);
  if (imbalance > 1e-6) {
    throw_error(ErrorCode::MassImbalance,
                "densities differ in mass by " + std::to_string(imbalance));
  }

  OitResult result;
  const GeodesicData gd = fisher_rao_theta(grid, rho0, rho1);
  result.theta = gd.theta;

  double t_end = 1.0;
  if (!std::isnan(cfg.sigma)) {
    if (cfg.sigma < 0.0) {
      throw_error(ErrorCode::DegenerateRange, "sigma must be >= 0");
    }
    t_end = std::isinf(cfg.sigma) ? 0.0 : 1.0 / (1.0 + cfg.sigma);
  }
  result.t_end = t_end;

  OitState state = OitState::identity(grid);
  if (t_end == 0.0 || gd.theta < 1e-10) {
    result.forward = state.forward;
    result.inverse = state.inverse;
    return result;
  }

  PoissonSolver poisson(grid, st, default_params(grid, st));
  OitWorkspace ws;
  const double dt = t_end / cfg.steps;
  result.history.reserve(cfg.steps);
  for (int step = 0; step < cfg.steps; ++step) {
    result.history.push_back(
        oit_step(state, gd, grid, st, poisson, dt, cfg, ws));
  }
  result.forward = std::move(state.forward);
  result.inverse = std::move(state.inverse);
  return result;
}

}  // namespace spheremesh
