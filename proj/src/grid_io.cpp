#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spheremesh/grid.hpp"

namespace spheremesh {

namespace {

void write_g17(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

}  // namespace

void save_grid(const Grid& grid, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "spheregrid v1 " << grid.num_points() << ' ' << grid.num_triangles()
      << ' ';
  write_g17(out, grid.h());
  out << '\n';
  for (const SpherePoint& p : grid.points()) {
    write_g17(out, p.x());
    out << ' ';
    write_g17(out, p.y());
    out << ' ';
    write_g17(out, p.z());
    out << '\n';
  }
  for (const Triangle& t : grid.triangles()) {
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  if (!out) throw_error(ErrorCode::IoError, "write failed for " + path);
}

Grid load_grid(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string magic, version;
  int n = 0, t = 0;
  double h = 0.0;
  in >> magic >> version >> n >> t >> h;
  if (!in || magic != "spheregrid" || version != "v1" || n < 4 || t < 4) {
    throw_error(ErrorCode::IoError, "not a spheregrid v1 file: " + path);
  }
  std::vector<SpherePoint> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) {
    double x, y, z;
    in >> x >> y >> z;
    if (!in) throw_error(ErrorCode::IoError, "truncated point list in " + path);
    points.emplace_back(Vec3(x, y, z));
  }
  std::vector<Triangle> tris;
  tris.reserve(t);
  for (int i = 0; i < t; ++i) {
    Triangle tri{};
    in >> tri[0] >> tri[1] >> tri[2];
    if (!in) throw_error(ErrorCode::IoError, "truncated triangle list in " + path);
    for (int v : tri) {
      if (v < 0 || v >= n) {
        throw_error(ErrorCode::IoError, "triangle index out of range in " + path);
      }
    }
    tris.push_back(tri);
  }
  Grid g = Grid::build(std::move(points), std::move(tris));
  g.set_h(h);
  return g;
}

void save_map(const MapField& map, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "spheremap v1 " << map.size() << '\n';
  for (const SpherePoint& p : map.images) {
    write_g17(out, p.x());
    out << ' ';
    write_g17(out, p.y());
    out << ' ';
    write_g17(out, p.z());
    out << '\n';
  }
  if (!out) throw_error(ErrorCode::IoError, "write failed for " + path);
}

MapField load_map(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string magic, version;
  std::size_t n = 0;
  in >> magic >> version >> n;
  if (!in || magic != "spheremap" || version != "v1") {
    throw_error(ErrorCode::IoError, "not a spheremap v1 file: " + path);
  }
  MapField m;
  m.images.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x, y, z;
    in >> x >> y >> z;
    if (!in) throw_error(ErrorCode::IoError, "truncated map file " + path);
    m.images.emplace_back(Vec3(x, y, z));
  }
  return m;
}

void save_obj(const std::vector<SpherePoint>& points,
              const std::vector<Triangle>& triangles, const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const SpherePoint& p : points) {
    out << "v ";
    write_g17(out, p.x());
    out << ' ';
    write_g17(out, p.y());
    out << ' ';
    write_g17(out, p.z());
    out << '\n';
  }
  for (const Triangle& t : triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) throw_error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace spheremesh
