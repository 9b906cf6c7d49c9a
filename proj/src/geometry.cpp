#include "spheremesh/geometry.hpp"

#include <cmath>

namespace spheremesh {

namespace {

constexpr double kAntipodalCutoff = 1e-9;

double sinc(double t) {
  // sin(t)/t with the removable singularity filled in.
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

}  // namespace

TangentFrame TangentFrame::at(const SpherePoint& base) {
  const Vec3& n = base.vec();
  int axis = 0;
  double best = std::abs(n.x());
  if (std::abs(n.y()) < best) {
    axis = 1;
    best = std::abs(n.y());
  }
  if (std::abs(n.z()) < best) axis = 2;

  Vec3 a = Vec3::Unit(axis);
  Vec3 e1 = a - a.dot(n) * n;
  e1.normalize();
  Vec3 e2 = n.cross(e1);

  TangentFrame f;
  f.base = base;
  f.e1 = e1;
  f.e2 = e2;
  return f;
}

double geodesic_distance(const SpherePoint& a, const SpherePoint& b) {
  const Vec3 cross = a.vec().cross(b.vec());
  return std::atan2(cross.norm(), a.vec().dot(b.vec()));
}

SpherePoint exp_map(const TangentVector& p) {
  const double t = p.v.norm();
  if (t >= kPi) {
    throw_error(ErrorCode::MagnitudeExceedsInjectivityRadius,
                "tangent vector length " + std::to_string(t) + " >= pi");
  }
  if (t == 0.0) return p.base;
  const Vec3 q = std::cos(t) * p.base.vec() + sinc(t) * p.v;
  return SpherePoint(q);
}

TangentVector log_map(const SpherePoint& base, const SpherePoint& target) {
  const double d = geodesic_distance(base, target);
  if (d >= kPi - kAntipodalCutoff) {
    throw_error(ErrorCode::AntipodalPoints,
                "log map undefined at distance " + std::to_string(d));
  }
  TangentVector result;
  result.base = base;
  if (d < 1e-14) {
    result.v.setZero();
    return result;
  }
  Vec3 w = target.vec() - target.vec().dot(base.vec()) * base.vec();
  const double wn = w.norm();  // = sin(d) > 0 away from the cutoff
  result.v = w * (d / wn);
  return result;
}

Vec2 project_to_tangent(const SpherePoint& center, const SpherePoint& x,
                        const TangentFrame& frame) {
  const TangentVector v = log_map(center, x);
  return frame.to_coords(v.v);
}

SpherePoint project_to_sphere(const Vec3& q) {
  const double n = q.norm();
  if (n <= 1e-12) {
    throw_error(ErrorCode::DegenerateVector,
                "cannot project vector of norm " + std::to_string(n));
  }
  SpherePoint p;
  p = SpherePoint(q / n);
  return p;
}

double spherical_triangle_area(const SpherePoint& a, const SpherePoint& b,
                               const SpherePoint& c) {
  const double la = geodesic_distance(b, c);
  const double lb = geodesic_distance(c, a);
  const double lc = geodesic_distance(a, b);
  const double s = 0.5 * (la + lb + lc);
  const double t = std::tan(0.5 * s) * std::tan(0.5 * (s - la)) *
                   std::tan(0.5 * (s - lb)) * std::tan(0.5 * (s - lc));
  if (t <= 0.0) return 0.0;  // degenerate triangle
  return 4.0 * std::atan(std::sqrt(t));
}

double signed_spherical_area(const SpherePoint& a, const SpherePoint& b,
                             const SpherePoint& c) {
  const double det = a.vec().dot(b.vec().cross(c.vec()));
  const double denom =
      1.0 + a.vec().dot(b.vec()) + b.vec().dot(c.vec()) + c.vec().dot(a.vec());
  return 2.0 * std::atan2(det, denom);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidUnitVector: return "InvalidUnitVector";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::MagnitudeExceedsInjectivityRadius:
      return "MagnitudeExceedsInjectivityRadius";
    case ErrorCode::AntipodalPoints: return "AntipodalPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::TriangleNotFound: return "TriangleNotFound";
    case ErrorCode::EmptyNeighborhood: return "EmptyNeighborhood";
    case ErrorCode::QuadrantEmpty: return "QuadrantEmpty";
    case ErrorCode::SingularMomentSystem: return "SingularMomentSystem";
    case ErrorCode::GradientOutOfRange: return "GradientOutOfRange";
    case ErrorCode::NonpositiveDensity: return "NonpositiveDensity";
    case ErrorCode::MassImbalance: return "MassImbalance";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::FallbackDidNotConverge: return "FallbackDidNotConverge";
    case ErrorCode::GeodesicDegenerate: return "GeodesicDegenerate";
    case ErrorCode::TangledIntermediateMap: return "TangledIntermediateMap";
    case ErrorCode::UnreliableJacobian: return "UnreliableJacobian";
    case ErrorCode::NoRadialSolution: return "NoRadialSolution";
    case ErrorCode::UnknownDensityName: return "UnknownDensityName";
    case ErrorCode::UnsupportedRasterFormat: return "UnsupportedRasterFormat";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace spheremesh
