#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "spheremesh/grid.hpp"
#include "support/test_helpers.hpp"

using namespace spheremesh;
namespace ts = spheremesh::test_support;

namespace {

Grid octahedron_grid() {
  std::vector<SpherePoint> pts = {
      SpherePoint(1, 0, 0),  SpherePoint(-1, 0, 0), SpherePoint(0, 1, 0),
      SpherePoint(0, -1, 0), SpherePoint(0, 0, 1),  SpherePoint(0, 0, -1)};
  std::vector<Triangle> tris = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return Grid::build(std::move(pts), std::move(tris));
}

}  // namespace

TEST_CASE("cube sphere point counts match 6m^2+2") {
  const Grid g2 = gen_cube_sphere(2);
  CHECK(g2.num_points() == 26);
  const Grid g29 = gen_cube_sphere(29);
  CHECK(g29.num_points() == 5048);
  for (const SpherePoint& p : g29.points()) {
    CHECK(std::abs(p.vec().norm() - 1.0) <= 1e-12);
  }
  // every triangle positively oriented
  for (const Triangle& t : g29.triangles()) {
    CHECK(g29.points()[t[0]].vec().dot(
              g29.points()[t[1]].vec().cross(g29.points()[t[2]].vec())) > 0.0);
  }
}

TEST_CASE("h is the octahedron circumradius on the 6-point grid") {
  const Grid g = octahedron_grid();
  CHECK(g.h() == doctest::Approx(std::acos(1.0 / std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("h scales like N^{-1/2} across refinements") {
  double prev_h = 0.0;
  for (int m : {10, 20, 29, 40}) {
    const Grid g = gen_cube_sphere(m);
    const double scale = g.h() * std::sqrt(static_cast<double>(g.num_points()));
    CHECK(scale >= 1.0);
    CHECK(scale <= 6.0);
    if (m == 20) prev_h = g.h();
    if (m == 40) {
      const double ratio = prev_h / g.h();
      CHECK(ratio >= 1.8);
      CHECK(ratio <= 2.2);
    }
  }
  const double ratio10 = gen_cube_sphere(10).h() / gen_cube_sphere(20).h();
  CHECK(ratio10 >= 1.8);
  CHECK(ratio10 <= 2.2);
}

TEST_CASE("triangulate builds the hull of simple and random point sets") {
  std::vector<SpherePoint> tetra = {
      project_to_sphere(Vec3(1, 1, 1)), project_to_sphere(Vec3(1, -1, -1)),
      project_to_sphere(Vec3(-1, 1, -1)), project_to_sphere(Vec3(-1, -1, 1))};
  CHECK(triangulate(tetra).size() == 4);

  // cube-sphere points re-triangulated from scratch stay a closed surface
  const Grid cs = gen_cube_sphere(2);
  const Grid rebuilt = Grid::build(cs.points(), triangulate(cs.points()));
  CHECK(rebuilt.num_points() == 26);

  auto rng = ts::make_rng(71);
  std::vector<SpherePoint> cloud;
  for (int i = 0; i < 500; ++i) cloud.push_back(ts::random_point(rng));
  const Grid random_grid = Grid::build(cloud, triangulate(cloud));
  for (int i = 0; i < random_grid.num_points(); ++i) {
    CHECK(random_grid.vertex_triangles()[i].size() >= 3);
  }
}

TEST_CASE("triangulate rejects degenerate configurations") {
  std::vector<SpherePoint> three = {SpherePoint(1, 0, 0), SpherePoint(0, 1, 0),
                                    SpherePoint(0, 0, 1)};
  CHECK_THROWS_AS(triangulate(three), SphereMeshError);

  std::vector<SpherePoint> ring;
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * kPi * k / 8.0;
    ring.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  try {
    triangulate(ring);  // coplanar
    CHECK(false);
  } catch (const SphereMeshError& e) {
    CHECK(e.code() == ErrorCode::DegenerateConfiguration);
  }
}

TEST_CASE("scalar interpolation is exact at nodes and for constants") {
  const Grid g = gen_cube_sphere(6);
  ScalarField f(g.num_points());
  auto rng = ts::make_rng(5);
  for (auto& v : f.values) {
    v = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
  }
  for (int i = 0; i < g.num_points(); i += 7) {
    CHECK(g.interp_scalar(f, g.points()[i]) == doctest::Approx(f[i]).epsilon(1e-13));
  }

  ScalarField c(g.num_points(), 3.25);
  for (int k = 0; k < 100; ++k) {
    const SpherePoint x = ts::random_point(rng);
    CHECK(g.interp_scalar(c, x) == doctest::Approx(3.25).epsilon(1e-14));
  }
}

TEST_CASE("scalar interpolation reproduces smooth fields at O(h^2)") {
  auto rng = ts::make_rng(93);
  std::vector<SpherePoint> samples;
  for (int k = 0; k < 400; ++k) samples.push_back(ts::random_point(rng));

  double prev_err = 0.0;
  double prev_h = 0.0;
  for (int m : {8, 16, 32}) {
    const Grid g = gen_cube_sphere(m);
    ScalarField f(g.num_points());
    for (int i = 0; i < g.num_points(); ++i) f[i] = g.points()[i].z();
    double err = 0.0;
    int hint = -1;
    for (const SpherePoint& x : samples) {
      err = std::max(err, std::abs(g.interp_scalar(f, x, &hint) - x.z()));
    }
    if (prev_err > 0.0) {
      const double order =
          std::log(prev_err / err) / std::log(prev_h / g.h());
      CHECK(order >= 1.6);  // linear reproduction => quadratic convergence
    }
    prev_err = err;
    prev_h = g.h();
  }
}

TEST_CASE("vector interpolation projects onto the tangent plane") {
  const Grid g = gen_cube_sphere(12);
  std::vector<Vec3> zero(g.num_points(), Vec3::Zero());
  auto rng = ts::make_rng(15);
  for (int k = 0; k < 50; ++k) {
    const SpherePoint x = ts::random_point(rng);
    CHECK(g.interp_vector(zero, x).norm() == 0.0);
  }

  // gradient of z sampled at nodes, interpolated off-node
  double prev_err = 0.0;
  for (int m : {8, 16, 32}) {
    const Grid gm = gen_cube_sphere(m);
    std::vector<Vec3> w(gm.num_points());
    for (int i = 0; i < gm.num_points(); ++i) {
      const Vec3& p = gm.points()[i].vec();
      w[i] = Vec3(0, 0, 1) - p.z() * p;
    }
    double err = 0.0;
    int hint = -1;
    for (int k = 0; k < 300; ++k) {
      const SpherePoint x = ts::random_point(rng);
      const TangentVector v = gm.interp_vector(w, x, &hint);
      const Vec3 expected = Vec3(0, 0, 1) - x.z() * x.vec();
      err = std::max(err, (v.v - expected).norm());
      CHECK(std::abs(v.v.dot(x.vec())) <= 1e-12);
    }
    if (prev_err > 0.0) CHECK(err <= 0.75 * prev_err);
    prev_err = err;
  }
}

TEST_CASE("map interpolation: identity, constants, rotations") {
  const Grid g = gen_cube_sphere(16);
  const MapField ident = MapField::identity_on(g.points());
  auto rng = ts::make_rng(19);
  int hint = -1;
  for (int k = 0; k < 200; ++k) {
    const SpherePoint x = ts::random_point(rng);
    CHECK(geodesic_distance(g.interp_map(ident, x, &hint), x) <= 1e-10);
  }

  MapField constant;
  constant.images.assign(g.num_points(), SpherePoint(0.0, 1.0, 0.0));
  CHECK(geodesic_distance(g.interp_map(constant, ts::random_point(rng)),
                          SpherePoint(0.0, 1.0, 0.0)) == 0.0);

  // Rotations commute with the gnomonic barycentric reconstruction, so the
  // interpolated rotation map is exact up to roundoff (well inside the C h^2
  // consistency bound).
  Eigen::Matrix3d rot =
      Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  for (int m : {8, 16}) {
    const Grid gm = gen_cube_sphere(m);
    MapField rotated;
    rotated.images.reserve(gm.num_points());
    for (const SpherePoint& p : gm.points()) {
      rotated.images.push_back(SpherePoint(Vec3(rot * p.vec())));
    }
    double err = 0.0;
    int h2 = -1;
    for (int k = 0; k < 300; ++k) {
      const SpherePoint x = ts::random_point(rng);
      const SpherePoint expected(Vec3(rot * x.vec()));
      err = std::max(err, geodesic_distance(gm.interp_map(rotated, x, &h2), expected));
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("quadrature: partition of the sphere and analytic integrals") {
  const Grid g = gen_cube_sphere(29);
  ScalarField one(g.num_points(), 1.0);
  CHECK(g.integrate(one) == doctest::Approx(4.0 * kPi).epsilon(1e-9));

  ScalarField z(g.num_points());
  ScalarField z2(g.num_points());
  for (int i = 0; i < g.num_points(); ++i) {
    z[i] = g.points()[i].z();
    z2[i] = z[i] * z[i];
  }
  CHECK(std::abs(g.integrate(z)) <= 5e-3);
  CHECK(g.integrate(z2) == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.02));

  double wmin = 1e9;
  for (double w : g.voronoi_weights()) wmin = std::min(wmin, w);
  CHECK(wmin > 0.0);
}

TEST_CASE("grid file round-trips exactly") {
  const Grid g = gen_cube_sphere(5);
  const std::string path = "roundtrip_test.grid";
  save_grid(g, path);
  const Grid loaded = load_grid(path);
  std::filesystem::remove(path);

  REQUIRE(loaded.num_points() == g.num_points());
  REQUIRE(loaded.num_triangles() == g.num_triangles());
  CHECK(loaded.h() == g.h());
  for (int i = 0; i < g.num_points(); ++i) {
    CHECK(loaded.points()[i].vec() == g.points()[i].vec());
  }
  for (int t = 0; t < g.num_triangles(); ++t) {
    CHECK(loaded.triangles()[t] == g.triangles()[t]);
  }
}

TEST_CASE("locate falls back gracefully from any hint") {
  const Grid g = gen_cube_sphere(10);
  auto rng = ts::make_rng(29);
  for (int k = 0; k < 200; ++k) {
    const SpherePoint x = ts::random_point(rng);
    const TriLocation a = g.locate(x, -1);
    const TriLocation b = g.locate(x, k % g.num_triangles());
    CHECK(a.tri >= 0);
    CHECK(b.tri >= 0);
    // both answers must actually contain x (weights nonnegative)
    for (double w : a.bary) CHECK(w >= 0.0);
    for (double w : b.bary) CHECK(w >= 0.0);
  }
}
