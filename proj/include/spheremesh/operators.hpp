#pragma once

#include "spheremesh/density.hpp"
#include "spheremesh/grid.hpp"
#include "spheremesh/stencil.hpp"

namespace spheremesh {

enum class CostKind { SquaredGeodesic, Logarithmic };

/// sin(|p|)/|p|, the Jacobian determinant of the exponential map on S²;
/// even, equals 1 at 0 (series branch below 1e-4).
double g2(double p_norm);

/// Radially symmetric transport cost c(x, y) = f(d(x, y)) together with the
/// derived quantities the discrete operator needs: the radial profile, the
/// map-extraction distance solving |f'(d)| = |p|, the Hessian of c(., y) in
/// geodesic normal coordinates, and the mixed determinant |det D²_xy c|.
class CostModel {
 public:
  static CostModel squared_geodesic();  // f(d) = d²/2
  static CostModel logarithmic();       // f(d) = -2 log(1 - cos d)

  CostKind kind() const { return kind_; }

  double f(double d) const;
  double f_prime(double d) const;

  /// Distance of the mapped point: the d in (0, pi) with |f'(d)| = p_norm,
  /// found by bisection on the monotone profile. Throws NoRadialSolution
  /// when p_norm is outside the attainable range (for the logarithmic cost
  /// this includes p_norm = 0).
  double map_distance(double p_norm) const;

  /// +1 when the mapped point lies along +p (f' > 0), -1 along -p.
  double map_direction_sign() const { return direction_sign_; }

  /// Hessian of x -> c(x, y) at distance d from y: the coefficient on the
  /// radial direction (toward y) and on the tangential one.
  double hess_radial(double d) const;
  double hess_tangential(double d) const;

  /// |det D²_xy c| at separation d (= |f''(d) f'(d)| / sin d).
  double mixed_det(double d) const;

 private:
  explicit CostModel(CostKind kind) : kind_(kind) {
    direction_sign_ = (kind == CostKind::SquaredGeodesic) ? 1.0 : -1.0;
  }
  CostKind kind_;
  double direction_sign_;
};

struct OperatorParams {
  double eps_g = 0.0;   // monotonization strength (default: dtheta)
  double eps_h = 0.0;   // properness shift for the Poisson operator
  double R = kPi + 1.0; // Lipschitz bound, strictly above the diameter pi
};

/// eps_g = dtheta, eps_h = measured consistency error of the discrete
/// Laplacian on the z eigenfunction, R = pi + 1.
OperatorParams default_params(const Grid& grid, const StencilTable& st);

/// max_i |Delta^h z + 2 z| over the grid (z restricted from ambient space).
double measure_laplacian_consistency(const Grid& grid, const StencilTable& st);

/// Second directional difference at node i along direction index d.
double second_difference(const StencilTable& st, const ScalarField& u, int i,
                         int d);

/// Trace-of-Hessian Laplacian: the two coordinate-direction second
/// differences in the node frame.
double laplacian(const StencilTable& st, const ScalarField& u, int i);

/// Gradient coordinates (D_(1,0) u, D_(0,1) u) in the node frame.
Vec2 gradient_coords(const StencilTable& st, const ScalarField& u, int i);

/// Gradient as an ambient tangent vector at node i.
TangentVector gradient(const Grid& grid, const StencilTable& st,
                       const ScalarField& u, int i);

/// Monge-Ampere operator of the Optimal Transport PDE at node i:
///   min over orthogonal pairs of prod_j max{D_nn u + g1 + eps_g Lap u, 0}
///   - H(x, grad u) + eps_g f0(x) Lap u
/// with H = |det D²_xy c| f0(x) / f1(T(x, grad u)), f1 evaluated off-grid by
/// interpolation. Throws GradientOutOfRange when |grad u| >= pi.
double ot_operator(const Grid& grid, const StencilTable& st,
                   const ScalarField& u, int i, const DensityField& f0,
                   const DensityField& f1, const CostModel& cost,
                   const OperatorParams& params, int* hint = nullptr);

/// Monotone discretization of |grad u| - R: the maximum rising difference
/// quotient (u(x_j) - u(x_i)) / d(x_i, x_j) over the candidate neighborhood,
/// minus R. The quotients act as one-sided gradient-norm proxies; taking the
/// rising side keeps the max-combined scheme monotone.
double lipschitz_constraint(const StencilTable& st, const ScalarField& u,
                            int i, double R);

/// G^h = max{F^h, E^h}.
double scheme_g(const Grid& grid, const StencilTable& st, const ScalarField& u,
                int i, const DensityField& f0, const DensityField& f1,
                const CostModel& cost, const OperatorParams& params,
                int* hint = nullptr);

}  // namespace spheremesh
