#pragma once

#include <limits>

#include "spheremesh/poisson.hpp"

namespace spheremesh {

/// Fisher-Rao geodesic data between two densities: the angle theta and the
/// square-root densities w_i = sqrt(rho_i) (rho normalized to mass 4*pi).
struct GeodesicData {
  double theta = 0.0;
  ScalarField w0, w1;
};

/// theta = arccos(<w0, w1> / vol) with both the inner product and vol
/// evaluated by the grid quadrature, clamped into [-1, 1]. Equal densities
/// give theta = 0 up to quadrature error (exactly 0 for the uniform pair).
GeodesicData fisher_rao_theta(const Grid& grid, const DensityField& rho0,
                              const DensityField& rho1);

/// nu_t = mu_dot(t)/mu(t) along the explicit geodesic, computed analytically
/// as 2 g_dot/g with g = sin((1-t)theta)/sin(theta) w0 + sin(t theta)/sin(theta) w1.
/// Returns the zero field for theta below 1e-10.
ScalarField geodesic_log_derivative(const GeodesicData& gd, double t);

struct OitState {
  double t = 0.0;
  int step = 0;
  MapField forward;  // T_n
  MapField inverse;  // S_n

  static OitState identity(const Grid& grid);
};

struct OitStepStats {
  double t = 0.0;
  double mass_conservation = 0.0;   // |integral of nu_t mu_t|
  double composition_error = 0.0;   // max_i d(S(T(x_i)), x_i)
  double poisson_residual = 0.0;
};

struct OitConfig {
  int steps = 100;
  /// Inexact penalty; NaN requests the exact problem (t_end = 1), otherwise
  /// t_end = 1/(1+sigma). sigma = inf yields the identity maps exactly.
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double composition_tolerance_factor = 25.0;  // threshold = factor * (h + dt)
  bool check_composition = true;
};

struct OitResult {
  MapField forward;   // T: moves mesh nodes (pullback of vol is rho1)
  MapField inverse;   // S: pushes rho0 forward to rho1 (the matching map)
  double theta = 0.0;
  double t_end = 1.0;
  std::vector<OitStepStats> history;
};

/// Scratch state (interpolation hints) reused across steps.
struct OitWorkspace {
  std::vector<int> hint_inverse;
  std::vector<int> hint_forward;
  std::vector<int> hint_back;
  std::vector<int> hint_comp;
  std::vector<Vec3> grad;
  ScalarField rhs;
};

/// One Euler step of the OIT iteration: interpolate nu_t at S_n(x_i), solve
/// the Poisson problem, move T along +dt grad f (interpolated at T_n(x_i))
/// and compose S with the backward displacement. Throws
/// TangledIntermediateMap when the composition diagnostic exceeds its
/// threshold.
OitStepStats oit_step(OitState& state, const GeodesicData& gd, const Grid& grid,
                      const StencilTable& st, const PoissonSolver& poisson,
                      double dt, const OitConfig& cfg, OitWorkspace& ws);

OitResult solve_oit(const Grid& grid, const StencilTable& st,
                    const DensityField& rho0, const DensityField& rho1,
                    const OitConfig& cfg = {});

}  // namespace spheremesh
