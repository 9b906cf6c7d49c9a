#pragma once

#include "spheremesh/operators.hpp"

namespace spheremesh {

enum class Normalization { FixedPoint, MeanZero };

struct SolverConfig {
  double dt = 0.0;  // <= 0: use the stability-based default
  double tol = 1e-6;
  long max_iters = 400000;
  Normalization normalization = Normalization::MeanZero;
  int fixed_point_node = 0;
};

struct OtResult {
  ScalarField u;
  bool converged = false;
  double residual = 0.0;
  long sweeps = 0;
  double final_dt = 0.0;
  std::vector<double> residual_history;  // one entry per sweep
};

/// Parabolic iteration u += dt G^h on the max-combined scheme until
/// max_i |G^h| <= tol. The time step starts from the conservative parabolic
/// default, halves when the residual rises, and may regrow up to the
/// stability cap after a sustained decrease. Throws MassImbalance when the
/// densities disagree in total mass; a run that exhausts max_iters returns
/// converged = false with the best iterate (no throw).
OtResult solve_ot(const Grid& grid, const StencilTable& st,
                  const DensityField& f0, const DensityField& f1,
                  const CostModel& cost, const OperatorParams& params,
                  const SolverConfig& cfg = {});

/// The mapped point T(x, p) defined by grad_x c(x, T(x, p)) = -p: at distance
/// d solving |f'(d)| = |p| along +/- p per the cost's sign convention. For the
/// squared geodesic cost this is exp_x(p).
SpherePoint extract_point(const SpherePoint& x, const TangentVector& p,
                          const CostModel& cost);

/// Per-node transport map T(x_i) = extract_point(x_i, grad^h u(x_i)).
MapField extract_map(const Grid& grid, const StencilTable& st,
                     const ScalarField& u, const CostModel& cost);

}  // namespace spheremesh
