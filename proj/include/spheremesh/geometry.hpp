#pragma once

#include <Eigen/Dense>

#include "spheremesh/errors.hpp"

namespace spheremesh {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

/// Point on the unit sphere S². The stored coordinates are renormalized on
/// construction, so ||vec()|| = 1 to machine precision.
class SpherePoint {
 public:
  SpherePoint() = default;

  explicit SpherePoint(const Vec3& v) {
    const double n = v.norm();
    if (std::abs(n - 1.0) > 1e-6) {
      throw_error(ErrorCode::InvalidUnitVector,
                  "vector norm " + std::to_string(n) + " is not 1");
    }
    v_ = v / n;
  }

  SpherePoint(double x, double y, double z) : SpherePoint(Vec3(x, y, z)) {}

  const Vec3& vec() const noexcept { return v_; }
  double x() const noexcept { return v_.x(); }
  double y() const noexcept { return v_.y(); }
  double z() const noexcept { return v_.z(); }

 private:
  Vec3 v_{0.0, 0.0, 1.0};
};

/// Ambient-space tangent vector attached to a base point. The constructor
/// removes any normal component so that v · base = 0 holds exactly.
struct TangentVector {
  SpherePoint base;
  Vec3 v{0.0, 0.0, 0.0};

  TangentVector() = default;
  TangentVector(const SpherePoint& base_point, const Vec3& ambient)
      : base(base_point),
        v(ambient - ambient.dot(base_point.vec()) * base_point.vec()) {}

  double norm() const { return v.norm(); }
};

/// Right-handed orthonormal tangent basis {e1, e2, base} at a point.
struct TangentFrame {
  SpherePoint base;
  Vec3 e1{1.0, 0.0, 0.0};
  Vec3 e2{0.0, 1.0, 0.0};

  /// Deterministic frame: e1 is the normalized projection of the ambient
  /// axis least aligned with the base point (lowest index on ties).
  static TangentFrame at(const SpherePoint& base);

  Vec3 from_coords(const Vec2& c) const { return c.x() * e1 + c.y() * e2; }
  Vec2 to_coords(const Vec3& ambient) const {
    return Vec2(ambient.dot(e1), ambient.dot(e2));
  }
};

/// Arc length between two points, stable near 0 and pi.
double geodesic_distance(const SpherePoint& a, const SpherePoint& b);

/// Follows the geodesic from p.base along p.v for arc length ||p.v||.
/// Requires ||p.v|| < pi.
SpherePoint exp_map(const TangentVector& p);

/// Inverse of exp_map: the tangent vector at `base` pointing to `target`
/// with length d(base, target). Requires the points not be antipodal.
TangentVector log_map(const SpherePoint& base, const SpherePoint& target);

/// Geodesic normal coordinates of x about `center` in `frame`:
/// ||result|| = d(center, x).
Vec2 project_to_tangent(const SpherePoint& center, const SpherePoint& x,
                        const TangentFrame& frame);

/// Radial projection q -> q/||q||. Throws DegenerateVector for ||q|| <= 1e-12.
SpherePoint project_to_sphere(const Vec3& q);

/// Unsigned area of the spherical triangle abc (L'Huilier).
double spherical_triangle_area(const SpherePoint& a, const SpherePoint& b,
                               const SpherePoint& c);

/// Signed solid angle of triangle abc; positive when (a, b, c) winds
/// counterclockwise seen from outside the sphere (van Oosterom-Strackee).
double signed_spherical_area(const SpherePoint& a, const SpherePoint& b,
                             const SpherePoint& c);

}  // namespace spheremesh
