#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "spheremesh/geometry.hpp"

namespace spheremesh {

using Triangle = std::array<int, 3>;

/// Per-node real values aligned with a Grid.
struct ScalarField {
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(std::size_t n, double fill = 0.0) : values(n, fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Per-node image points on the sphere (samples of a map S² -> S²).
struct MapField {
  std::vector<SpherePoint> images;

  static MapField identity_on(const std::vector<SpherePoint>& points) {
    MapField m;
    m.images = points;
    return m;
  }
  std::size_t size() const { return images.size(); }
};

struct TriLocation {
  int tri = -1;
  std::array<double, 3> bary{0.0, 0.0, 0.0};
};

/// Immutable spherical point set with triangulation, spacing parameter h,
/// per-node tangent frames and vertex-lumped quadrature weights.
class Grid {
 public:
  /// Assembles the derived structures (adjacency, h, frames, weights) and
  /// validates closedness (Euler formula) and orientation.
  static Grid build(std::vector<SpherePoint> points,
                    std::vector<Triangle> triangles);

  const std::vector<SpherePoint>& points() const { return points_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<TangentFrame>& frames() const { return frames_; }
  const std::vector<double>& voronoi_weights() const { return weights_; }
  const std::vector<std::vector<int>>& vertex_triangles() const {
    return vertex_triangles_;
  }

  int num_points() const { return static_cast<int>(points_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  double h() const { return h_; }

  /// Triangles adjacent to triangle t; entry k is across the edge opposite
  /// vertex k of t.
  const std::array<int, 3>& triangle_neighbors(int t) const {
    return tri_neighbors_[t];
  }

  /// Finds the triangle containing x by an adjacency walk (starting from
  /// `hint` when valid), with a brute-force fallback. Returned barycentric
  /// weights are the planar weights of the gnomonic projection of x into
  /// the triangle plane; they are nonnegative (up to roundoff) and sum to 1.
  TriLocation locate(const SpherePoint& x, int hint = -1) const;

  double interp_scalar(const ScalarField& f, const SpherePoint& x,
                       int* hint = nullptr) const;
  double interp_scalar(const std::vector<double>& values, const SpherePoint& x,
                       int* hint = nullptr) const;
  TangentVector interp_vector(const std::vector<Vec3>& w, const SpherePoint& x,
                              int* hint = nullptr) const;
  SpherePoint interp_map(const MapField& m, const SpherePoint& x,
                         int* hint = nullptr) const;

  double integrate(const ScalarField& f) const;
  double integrate(const std::vector<double>& values) const;

  /// Overwrites h. Used by the file loader to preserve round-trip exactness.
  void set_h(double h) { h_ = h; }

 private:
  std::vector<SpherePoint> points_;
  std::vector<Triangle> triangles_;
  std::vector<TangentFrame> frames_;
  std::vector<double> weights_;
  std::vector<std::vector<int>> vertex_triangles_;
  std::vector<std::array<int, 3>> tri_neighbors_;
  double h_ = 0.0;

  bool bary_in_triangle(const SpherePoint& x, int t,
                        std::array<double, 3>& bary) const;
};

/// Vertices of an m x m subdivided cube radially projected to S², shared
/// edge/corner duplicates merged (N = 6m² + 2), each projected quad split
/// along its shorter diagonal.
Grid gen_cube_sphere(int m);

/// Maximum circumradius over the spherical triangles: an approximation of
/// sup_x min_y d(x, y), the grid spacing parameter.
double compute_h(const std::vector<SpherePoint>& points,
                 const std::vector<Triangle>& triangles);

/// Spherical Delaunay triangulation as the convex hull of the unit vectors.
/// Suitable for point sets in general position; structured grids use their
/// own connectivity.
std::vector<Triangle> triangulate(const std::vector<SpherePoint>& points);

// --- file formats (grid_io.cpp) ---

/// Plain-text format: header "spheregrid v1 N T h", N point lines, T index
/// triples. Values written with 17 significant digits (exact round-trip).
void save_grid(const Grid& grid, const std::string& path);
Grid load_grid(const std::string& path);

void save_map(const MapField& map, const std::string& path);
MapField load_map(const std::string& path);

/// Wavefront OBJ (v/f lines) for external viewers.
void save_obj(const std::vector<SpherePoint>& points,
              const std::vector<Triangle>& triangles, const std::string& path);

}  // namespace spheremesh
