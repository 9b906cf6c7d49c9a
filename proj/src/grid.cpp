#include "spheremesh/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace spheremesh {

namespace {

double tri_det(const SpherePoint& a, const SpherePoint& b,
               const SpherePoint& c) {
  return a.vec().dot(b.vec().cross(c.vec()));
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

Grid Grid::build(std::vector<SpherePoint> points,
                 std::vector<Triangle> triangles) {
  Grid g;
  g.points_ = std::move(points);
  g.triangles_ = std::move(triangles);

  const int n = g.num_points();
  const int t = g.num_triangles();
  if (n < 4 || t < 4) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "grid needs at least 4 points and 4 triangles");
  }

  // Enforce positive (outward) orientation.
  for (auto& tri : g.triangles_) {
    if (tri_det(g.points_[tri[0]], g.points_[tri[1]], g.points_[tri[2]]) < 0.0) {
      std::swap(tri[1], tri[2]);
    }
  }

  // Edge-based adjacency; a closed triangulation has every edge shared by
  // exactly two triangles.
  std::map<std::pair<int, int>, std::pair<int, int>> edge_tris;
  auto edge_key = [](int a, int b) {
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  for (int ti = 0; ti < t; ++ti) {
    const Triangle& tri = g.triangles_[ti];
    for (int k = 0; k < 3; ++k) {
      auto key = edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]);
      auto it = edge_tris.find(key);
      if (it == edge_tris.end()) {
        edge_tris[key] = {ti, -1};
      } else if (it->second.second == -1) {
        it->second.second = ti;
      } else {
        throw_error(ErrorCode::DegenerateConfiguration,
                    "edge shared by more than two triangles");
      }
    }
  }
  const int e = static_cast<int>(edge_tris.size());
  for (const auto& [key, tris] : edge_tris) {
    (void)key;
    if (tris.second == -1) {
      throw_error(ErrorCode::DegenerateConfiguration,
                  "triangulation is not closed (boundary edge found)");
    }
  }
  if (n - e + t != 2) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "Euler formula violated: V-E+F = " + std::to_string(n - e + t));
  }

  g.tri_neighbors_.assign(t, {-1, -1, -1});
  for (int ti = 0; ti < t; ++ti) {
    const Triangle& tri = g.triangles_[ti];
    for (int k = 0; k < 3; ++k) {
      auto key = edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]);
      const auto& pair = edge_tris[key];
      g.tri_neighbors_[ti][k] = (pair.first == ti) ? pair.second : pair.first;
    }
  }

  g.vertex_triangles_.assign(n, {});
  for (int ti = 0; ti < t; ++ti) {
    for (int k = 0; k < 3; ++k) g.vertex_triangles_[g.triangles_[ti][k]].push_back(ti);
  }
  for (int i = 0; i < n; ++i) {
    if (g.vertex_triangles_[i].size() < 3) {
      throw_error(ErrorCode::DegenerateConfiguration,
                  "node " + std::to_string(i) + " has fewer than 3 triangles");
    }
  }

  g.frames_.reserve(n);
  for (int i = 0; i < n; ++i) g.frames_.push_back(TangentFrame::at(g.points_[i]));

  g.weights_.assign(n, 0.0);
  for (int ti = 0; ti < t; ++ti) {
    const Triangle& tri = g.triangles_[ti];
    const double area = spherical_triangle_area(
        g.points_[tri[0]], g.points_[tri[1]], g.points_[tri[2]]);
    for (int k = 0; k < 3; ++k) g.weights_[tri[k]] += area / 3.0;
  }

  g.h_ = compute_h(g.points_, g.triangles_);
  return g;
}

double compute_h(const std::vector<SpherePoint>& points,
                 const std::vector<Triangle>& triangles) {
  double h = 0.0;
  for (const Triangle& tri : triangles) {
    const Vec3& a = points[tri[0]].vec();
    const Vec3& b = points[tri[1]].vec();
    const Vec3& c = points[tri[2]].vec();
    Vec3 n = (b - a).cross(c - a);
    const double nn = n.norm();
    if (nn < 1e-30) continue;
    n /= nn;
    if (n.dot(a + b + c) < 0.0) n = -n;
    // circumcenter of the spherical triangle; circumradius = distance to a
    const double r = std::atan2(n.cross(a).norm(), n.dot(a));
    h = std::max(h, r);
  }
  return h;
}

// ---------------------------------------------------------------------------
// cube sphere

Grid gen_cube_sphere(int m) {
  if (m < 2) {
    throw_error(ErrorCode::DegenerateConfiguration, "cube subdivision m >= 2");
  }
  std::vector<SpherePoint> points;
  std::map<std::array<int, 3>, int> index_of;

  // Integer lattice coordinates in [-m, m]^3 on the cube surface give exact
  // deduplication of shared edges and corners.
  auto point_index = [&](const std::array<int, 3>& key) {
    auto it = index_of.find(key);
    if (it != index_of.end()) return it->second;
    const int idx = static_cast<int>(points.size());
    points.push_back(project_to_sphere(
        Vec3(static_cast<double>(key[0]), static_cast<double>(key[1]),
             static_cast<double>(key[2]))));
    index_of[key] = idx;
    return idx;
  };

  auto face_key = [&](int axis, int sign, int i, int j) {
    const int u = 2 * i - m;
    const int v = 2 * j - m;
    std::array<int, 3> key{};
    key[axis] = sign * m;
    key[(axis + 1) % 3] = u;
    key[(axis + 2) % 3] = v;
    return key;
  };

  std::vector<Triangle> tris;
  tris.reserve(static_cast<std::size_t>(12) * m * m);
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = -1; sign <= 1; sign += 2) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const int p00 = point_index(face_key(axis, sign, i, j));
          const int p10 = point_index(face_key(axis, sign, i + 1, j));
          const int p11 = point_index(face_key(axis, sign, i + 1, j + 1));
          const int p01 = point_index(face_key(axis, sign, i, j + 1));
          const double d0 =
              (points[p00].vec() - points[p11].vec()).squaredNorm();
          const double d1 =
              (points[p10].vec() - points[p01].vec()).squaredNorm();
          if (d0 <= d1) {
            tris.push_back({p00, p10, p11});
            tris.push_back({p00, p11, p01});
          } else {
            tris.push_back({p00, p10, p01});
            tris.push_back({p10, p11, p01});
          }
        }
      }
    }
  }
  return Grid::build(std::move(points), std::move(tris));
}

// ---------------------------------------------------------------------------
// convex hull triangulation

namespace {

struct HullFace {
  int a, b, c;
  Vec3 normal;  // unnormalized outward (b-a) x (c-a)
  bool alive = true;
};

double face_dist(const HullFace& f, const std::vector<SpherePoint>& pts,
                 const Vec3& p) {
  return f.normal.dot(p - pts[f.a].vec()) / f.normal.norm();
}

}  // namespace

std::vector<Triangle> triangulate(const std::vector<SpherePoint>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 4) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "triangulation needs at least 4 points");
  }

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    if (points[i].vec().x() < points[i0].vec().x()) i0 = i;
  }
  int i1 = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (points[i].vec() - points[i0].vec()).squaredNorm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  if (i1 < 0 || best < 1e-20) {
    throw_error(ErrorCode::DegenerateConfiguration, "all points coincide");
  }
  int i2 = -1;
  best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = (points[i1].vec() - points[i0].vec())
                         .cross(points[i].vec() - points[i0].vec())
                         .squaredNorm();
    if (a > best) {
      best = a;
      i2 = i;
    }
  }
  if (i2 < 0 || best < 1e-20) {
    throw_error(ErrorCode::DegenerateConfiguration, "points are collinear");
  }
  int i3 = -1;
  best = 0.0;
  const Vec3 plane_n = (points[i1].vec() - points[i0].vec())
                           .cross(points[i2].vec() - points[i0].vec());
  for (int i = 0; i < n; ++i) {
    const double v = std::abs(plane_n.dot(points[i].vec() - points[i0].vec()));
    if (v > best) {
      best = v;
      i3 = i;
    }
  }
  if (i3 < 0 || best < 1e-14) {
    throw_error(ErrorCode::DegenerateConfiguration, "points are coplanar");
  }
  if (plane_n.dot(points[i3].vec() - points[i0].vec()) > 0.0) std::swap(i1, i2);

  const Vec3 interior = 0.25 * (points[i0].vec() + points[i1].vec() +
                                points[i2].vec() + points[i3].vec());

  std::vector<HullFace> faces;
  auto add_face = [&](int a, int b, int c) {
    HullFace f;
    f.a = a;
    f.b = b;
    f.c = c;
    f.normal = (points[b].vec() - points[a].vec())
                   .cross(points[c].vec() - points[a].vec());
    if (f.normal.dot(points[a].vec() - interior) < 0.0) {
      std::swap(f.b, f.c);
      f.normal = -f.normal;
    }
    faces.push_back(f);
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  std::vector<char> in_hull(n, 0);
  in_hull[i0] = in_hull[i1] = in_hull[i2] = in_hull[i3] = 1;

  for (int p = 0; p < n; ++p) {
    if (in_hull[p]) continue;
    const Vec3& q = points[p].vec();

    std::vector<int> visible;
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
      if (!faces[fi].alive) continue;
      if (face_dist(faces[fi], points, q) > 1e-12) visible.push_back(fi);
    }
    if (visible.empty()) {
      // Point on (or numerically inside) the current hull: accept faces it is
      // coplanar with as visible so the point still joins the surface.
      for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
        if (!faces[fi].alive) continue;
        if (face_dist(faces[fi], points, q) > -1e-12) visible.push_back(fi);
      }
    }
    if (visible.empty()) {
      throw_error(ErrorCode::DegenerateConfiguration,
                  "point " + std::to_string(p) +
                      " lies inside the hull (duplicate input?)");
    }

    // Horizon edges: directed edges of visible faces whose reverse is not in
    // the visible set.
    std::map<std::pair<int, int>, int> edge_count;
    for (int fi : visible) {
      const HullFace& f = faces[fi];
      const int vs[3] = {f.a, f.b, f.c};
      for (int k = 0; k < 3; ++k) {
        edge_count[{vs[k], vs[(k + 1) % 3]}] += 1;
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [edge, cnt] : edge_count) {
      (void)cnt;
      if (edge_count.find({edge.second, edge.first}) == edge_count.end()) {
        horizon.push_back(edge);
      }
    }
    if (horizon.empty()) {
      throw_error(ErrorCode::DegenerateConfiguration,
                  "empty horizon while inserting point " + std::to_string(p));
    }
    for (int fi : visible) faces[fi].alive = false;
    for (const auto& [ea, eb] : horizon) add_face(p, ea, eb);
    in_hull[p] = 1;
  }

  std::vector<Triangle> result;
  std::vector<char> used(n, 0);
  for (const HullFace& f : faces) {
    if (!f.alive) continue;
    result.push_back({f.a, f.b, f.c});
    used[f.a] = used[f.b] = used[f.c] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (!used[i]) {
      throw_error(ErrorCode::DegenerateConfiguration,
                  "point " + std::to_string(i) + " absent from the hull");
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// interpolation

bool Grid::bary_in_triangle(const SpherePoint& x, int t,
                            std::array<double, 3>& bary) const {
  const Triangle& tri = triangles_[t];
  const Vec3& a = points_[tri[0]].vec();
  const Vec3& b = points_[tri[1]].vec();
  const Vec3& c = points_[tri[2]].vec();
  const Vec3 n = (b - a).cross(c - a);
  const double nx = n.dot(x.vec());
  if (nx <= 1e-12) return false;  // far hemisphere or grazing
  const double t_scale = n.dot(a) / nx;
  const Vec3 p = t_scale * x.vec();

  // Planar barycentrics of the gnomonic image p.
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  const Vec3 w = p - a;
  const double uu = u.dot(u), uv = u.dot(v), vv = v.dot(v);
  const double wu = w.dot(u), wv = w.dot(v);
  const double det = uu * vv - uv * uv;
  if (det <= 0.0) return false;
  const double l2 = (wu * vv - wv * uv) / det;
  const double l3 = (wv * uu - wu * uv) / det;
  bary = {1.0 - l2 - l3, l2, l3};
  return true;
}

TriLocation Grid::locate(const SpherePoint& x, int hint) const {
  const int t = num_triangles();
  int current = (hint >= 0 && hint < t) ? hint : 0;
  std::array<double, 3> bary{};
  const double tol = -1e-12;

  int steps = 0;
  const int max_steps = 2 * t + 8;
  while (steps++ < max_steps) {
    if (bary_in_triangle(x, current, bary)) {
      int worst = 0;
      for (int k = 1; k < 3; ++k) {
        if (bary[k] < bary[worst]) worst = k;
      }
      if (bary[worst] >= tol) {
        for (double& v : bary) v = std::max(v, 0.0);
        const double s = bary[0] + bary[1] + bary[2];
        for (double& v : bary) v /= s;
        return {current, bary};
      }
      current = tri_neighbors_[current][worst];
    } else {
      // Walk toward x by centroid alignment among the neighbors.
      int next = -1;
      double best = -2.0;
      for (int k = 0; k < 3; ++k) {
        const int nb = tri_neighbors_[current][k];
        const Triangle& tri = triangles_[nb];
        const Vec3 centroid = points_[tri[0]].vec() + points_[tri[1]].vec() +
                              points_[tri[2]].vec();
        const double align = centroid.normalized().dot(x.vec());
        if (align > best) {
          best = align;
          next = nb;
        }
      }
      current = next;
    }
  }

  // Brute force: the triangle maximizing the minimum barycentric weight.
  int best_tri = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_bary{};
  for (int ti = 0; ti < t; ++ti) {
    if (!bary_in_triangle(x, ti, bary)) continue;
    const double mn = std::min({bary[0], bary[1], bary[2]});
    if (mn > best_min) {
      best_min = mn;
      best_tri = ti;
      best_bary = bary;
    }
  }
  if (best_tri < 0 || best_min < -1e-6) {
    throw_error(ErrorCode::TriangleNotFound,
                "no triangle contains the query point");
  }
  for (double& v : best_bary) v = std::max(v, 0.0);
  const double s = best_bary[0] + best_bary[1] + best_bary[2];
  for (double& v : best_bary) v /= s;
  return {best_tri, best_bary};
}

double Grid::interp_scalar(const ScalarField& f, const SpherePoint& x,
                           int* hint) const {
  return interp_scalar(f.values, x, hint);
}

double Grid::interp_scalar(const std::vector<double>& values,
                           const SpherePoint& x, int* hint) const {
  const TriLocation loc = locate(x, hint ? *hint : -1);
  if (hint) *hint = loc.tri;
  const Triangle& tri = triangles_[loc.tri];
  return loc.bary[0] * values[tri[0]] + loc.bary[1] * values[tri[1]] +
         loc.bary[2] * values[tri[2]];
}

TangentVector Grid::interp_vector(const std::vector<Vec3>& w,
                                  const SpherePoint& x, int* hint) const {
  const TriLocation loc = locate(x, hint ? *hint : -1);
  if (hint) *hint = loc.tri;
  const Triangle& tri = triangles_[loc.tri];
  const Vec3 v = loc.bary[0] * w[tri[0]] + loc.bary[1] * w[tri[1]] +
                 loc.bary[2] * w[tri[2]];
  return TangentVector(x, v);  // constructor projects onto the tangent plane
}

SpherePoint Grid::interp_map(const MapField& m, const SpherePoint& x,
                             int* hint) const {
  const TriLocation loc = locate(x, hint ? *hint : -1);
  if (hint) *hint = loc.tri;
  const Triangle& tri = triangles_[loc.tri];
  const Vec3 q = loc.bary[0] * m.images[tri[0]].vec() +
                 loc.bary[1] * m.images[tri[1]].vec() +
                 loc.bary[2] * m.images[tri[2]].vec();
  return project_to_sphere(q);
}

double Grid::integrate(const ScalarField& f) const { return integrate(f.values); }

double Grid::integrate(const std::vector<double>& values) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += weights_[i] * values[i];
  return sum;
}

}  // namespace spheremesh
