#include "spheremesh/operators.hpp"

#include <cmath>
#include <limits>

namespace spheremesh {

double g2(double p_norm) {
  const double t = std::abs(p_norm);
  if (t < 1e-4) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}

// ---------------------------------------------------------------------------
// cost model

CostModel CostModel::squared_geodesic() {
  return CostModel(CostKind::SquaredGeodesic);
}

CostModel CostModel::logarithmic() { return CostModel(CostKind::Logarithmic); }

double CostModel::f(double d) const {
  if (kind_ == CostKind::SquaredGeodesic) return 0.5 * d * d;
  return -2.0 * std::log(1.0 - std::cos(d));
}

double CostModel::f_prime(double d) const {
  if (kind_ == CostKind::SquaredGeodesic) return d;
  return -2.0 * std::sin(d) / (1.0 - std::cos(d));  // = -2 cot(d/2)
}

double CostModel::map_distance(double p_norm) const {
  if (kind_ == CostKind::SquaredGeodesic) {
    if (p_norm < 0.0 || p_norm >= kPi) {
      throw_error(ErrorCode::NoRadialSolution,
                  "|p| = " + std::to_string(p_norm) +
                      " outside [0, pi) for the squared geodesic cost");
    }
    return p_norm;
  }
  // |f'| = 2 cot(d/2) maps (0, pi) onto (0, inf), strictly decreasing.
  if (!(p_norm > 0.0) || !std::isfinite(p_norm)) {
    throw_error(ErrorCode::NoRadialSolution,
                "logarithmic cost profile is unbounded at 0; |p| must be "
                "positive and finite");
  }
  double lo = 1e-12, hi = kPi - 1e-12;
  auto profile = [this](double d) { return std::abs(f_prime(d)); };
  if (p_norm >= profile(lo) || p_norm <= profile(hi)) {
    throw_error(ErrorCode::NoRadialSolution,
                "|p| outside the radial-derivative range");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (profile(mid) > p_norm) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

double CostModel::hess_radial(double d) const {
  if (kind_ == CostKind::SquaredGeodesic) return 1.0;
  return 2.0 / (1.0 - std::cos(d));  // f''(d) = 1/sin^2(d/2)
}

double CostModel::hess_tangential(double d) const {
  if (kind_ == CostKind::SquaredGeodesic) {
    if (d < 1e-4) return 1.0 - d * d / 3.0;  // d cot d
    return d * std::cos(d) / std::sin(d);
  }
  if (d < 1e-12) {
    throw_error(ErrorCode::NoRadialSolution,
                "logarithmic cost Hessian undefined at d = 0");
  }
  return f_prime(d) * std::cos(d) / std::sin(d);
}

double CostModel::mixed_det(double d) const {
  if (kind_ == CostKind::SquaredGeodesic) {
    return 1.0 / g2(d);  // |f'' f'| / sin d = d / sin d
  }
  const double s = 1.0 - std::cos(d);
  if (s < 1e-14) {
    throw_error(ErrorCode::NoRadialSolution,
                "logarithmic mixed determinant blows up at d = 0");
  }
  return 4.0 / (s * s);
}

// ---------------------------------------------------------------------------
// derivative operators

double second_difference(const StencilTable& st, const ScalarField& u, int i,
                         int d) {
  const DirectionEntry& e = st.entry(i, d);
  double sum = 0.0;
  for (int q = 0; q < 4; ++q) sum += e.a[q] * (u[e.nbr[q]] - u[i]);
  return sum;
}

double laplacian(const StencilTable& st, const ScalarField& u, int i) {
  return second_difference(st, u, i, st.dirset.coordinate_e1()) +
         second_difference(st, u, i, st.dirset.coordinate_e2());
}

Vec2 gradient_coords(const StencilTable& st, const ScalarField& u, int i) {
  Vec2 g(0.0, 0.0);
  const DirectionEntry& e1 = st.entry(i, st.dirset.coordinate_e1());
  const DirectionEntry& e2 = st.entry(i, st.dirset.coordinate_e2());
  for (int q = 0; q < 4; ++q) {
    g.x() += e1.b[q] * (u[e1.nbr[q]] - u[i]);
    g.y() += e2.b[q] * (u[e2.nbr[q]] - u[i]);
  }
  return g;
}

TangentVector gradient(const Grid& grid, const StencilTable& st,
                       const ScalarField& u, int i) {
  const Vec2 g = gradient_coords(st, u, i);
  return TangentVector(grid.points()[i], grid.frames()[i].from_coords(g));
}

double measure_laplacian_consistency(const Grid& grid, const StencilTable& st) {
  ScalarField z(grid.num_points());
  for (int i = 0; i < grid.num_points(); ++i) z[i] = grid.points()[i].z();
  double err = 0.0;
  for (int i = 0; i < grid.num_points(); ++i) {
    err = std::max(err, std::abs(laplacian(st, z, i) + 2.0 * z[i]));
  }
  return err;
}

OperatorParams default_params(const Grid& grid, const StencilTable& st) {
  OperatorParams p;
  p.eps_g = st.dirset.dtheta;
  p.eps_h = std::max(measure_laplacian_consistency(grid, st), 1e-12);
  p.R = kPi + 1.0;
  return p;
}

// ---------------------------------------------------------------------------
// Monge-Ampere operator

double ot_operator(const Grid& grid, const StencilTable& st,
                   const ScalarField& u, int i, const DensityField& f0,
                   const DensityField& f1, const CostModel& cost,
                   const OperatorParams& params, int* hint) {
  if (f0[i] <= 0.0) {
    throw_error(ErrorCode::NonpositiveDensity,
                "source density nonpositive at node " + std::to_string(i));
  }
  const Vec2 p = gradient_coords(st, u, i);
  const double pn = p.norm();
  if (pn >= kPi) {
    throw_error(ErrorCode::GradientOutOfRange,
                "|grad u| = " + std::to_string(pn) + " >= pi at node " +
                    std::to_string(i));
  }
  const double lap = laplacian(st, u, i);

  // Mapped point T(x_i, p) and the density factor H there.
  double d = 0.0;
  double h_factor;
  Vec2 p_hat(1.0, 0.0);
  if (pn == 0.0 && cost.kind() == CostKind::SquaredGeodesic) {
    h_factor = f0[i] / f1[i];  // T(x, 0) = x, mixed_det(0) = 1
  } else {
    d = cost.map_distance(pn);
    p_hat = p / pn;
    const Vec3 dir =
        cost.map_direction_sign() * grid.frames()[i].from_coords(p_hat);
    const SpherePoint y = exp_map(TangentVector(grid.points()[i], d * dir));
    const double f1y = grid.interp_scalar(f1.values, y, hint);
    if (f1y <= 0.0) {
      throw_error(ErrorCode::NonpositiveDensity,
                  "target density nonpositive at the mapped point");
    }
    h_factor = cost.mixed_det(d) * f0[i] / f1y;
  }

  const double hess_rad = cost.hess_radial(d);
  const double hess_tan = cost.hess_tangential(d);
  const double eps_lap = params.eps_g * lap;

  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= st.dirset.pair_count; ++j) {
    const auto [d1, d2] = st.dirset.pair(j);
    double prod = 1.0;
    for (int dir_idx : {d1, d2}) {
      const double dnn = second_difference(st, u, i, dir_idx);
      const double cos_a = st.dirset.directions[dir_idx].dot(p_hat);
      const double cos2 = cos_a * cos_a;
      const double g1 = hess_rad * cos2 + hess_tan * (1.0 - cos2);
      prod *= std::max(dnn + g1 + eps_lap, 0.0);
    }
    best = std::min(best, prod);
  }
  return best - h_factor + params.eps_g * f0[i] * lap;
}

double lipschitz_constraint(const StencilTable& st, const ScalarField& u,
                            int i, double R) {
  double worst = 0.0;
  for (const Candidate& c : st.nodes[i].candidates) {
    worst = std::max(worst, (u[c.node] - u[i]) / c.r);
  }
  return worst - R;
}

double scheme_g(const Grid& grid, const StencilTable& st, const ScalarField& u,
                int i, const DensityField& f0, const DensityField& f1,
                const CostModel& cost, const OperatorParams& params,
                int* hint) {
  return std::max(ot_operator(grid, st, u, i, f0, f1, cost, params, hint),
                  lipschitz_constraint(st, u, i, params.R));
}

}  // namespace spheremesh
