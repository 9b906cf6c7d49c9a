#include "spheremesh/stencil.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "spheremesh/parallel.hpp"

namespace spheremesh {

DirectionSet make_direction_set(double h) {
  if (h <= 0.0 || h >= 1.0) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "grid spacing h = " + std::to_string(h) +
                    " outside (0, 1); grid too coarse for stencils");
  }
  const int k = static_cast<int>(std::floor(kPi / (2.0 * std::sqrt(h))));
  if (k < 1) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "no admissible directions at h = " + std::to_string(h));
  }
  DirectionSet ds;
  ds.pair_count = k;
  ds.dtheta = kPi / (2.0 * k);
  ds.directions.reserve(2 * k);
  for (int j = 0; j < 2 * k; ++j) {
    const double ang = j * ds.dtheta;
    ds.directions.emplace_back(std::cos(ang), std::sin(ang));
  }
  return ds;
}

std::vector<Candidate> candidate_neighborhood(const Grid& grid, int i) {
  const double radius = std::sqrt(grid.h());
  const double min_dot = std::cos(radius);
  const SpherePoint& center = grid.points()[i];
  const TangentFrame& frame = grid.frames()[i];

  std::vector<Candidate> result;
  const int n = grid.num_points();
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    if (grid.points()[j].vec().dot(center.vec()) < min_dot) continue;
    Candidate c;
    c.node = j;
    c.z = project_to_tangent(center, grid.points()[j], frame);
    c.r = c.z.norm();
    if (c.r > radius) continue;  // dot test is inclusive at the boundary
    result.push_back(c);
  }
  if (result.empty()) {
    throw_error(ErrorCode::EmptyNeighborhood,
                "no grid node within sqrt(h) of node " + std::to_string(i));
  }
  return result;
}

std::array<int, 4> select_quadrant_neighbors(
    const std::vector<Candidate>& candidates, const Vec2& nu, double dtheta,
    double sqrt_h, double h, int* used_relaxed) {
  const Vec2 nu_perp(-nu.y(), nu.x());
  const double strict_rmin = sqrt_h - 2.0 * h;
  const double relaxed_rmin = std::min(0.5 * sqrt_h, strict_rmin);

  std::array<int, 4> chosen{-1, -1, -1, -1};
  if (used_relaxed) *used_relaxed = 0;

  for (int pass = 0; pass < 2; ++pass) {
    const double rmin = (pass == 0) ? strict_rmin : relaxed_rmin;
    std::array<double, 4> best_abs_sin;
    best_abs_sin.fill(std::numeric_limits<double>::infinity());
    std::array<int, 4> best{-1, -1, -1, -1};

    for (int ci = 0; ci < static_cast<int>(candidates.size()); ++ci) {
      const Candidate& c = candidates[ci];
      if (c.r < rmin || c.r <= 0.0) continue;
      const double cos_t = c.z.dot(nu) / c.r;
      const double sin_t = c.z.dot(nu_perp) / c.r;
      const double abs_sin = std::abs(sin_t);
      if (abs_sin < dtheta) continue;
      // Q1: cos>=0, sin>=0; Q2: cos<0, sin>=0; Q3: cos<0, sin<0; Q4: cos>=0, sin<0
      int q;
      if (sin_t >= 0.0) {
        q = (cos_t >= 0.0) ? 0 : 1;
      } else {
        q = (cos_t >= 0.0) ? 3 : 2;
      }
      const bool better =
          abs_sin < best_abs_sin[q] ||
          (abs_sin == best_abs_sin[q] && best[q] >= 0 &&
           c.node < candidates[best[q]].node);
      if (better) {
        best_abs_sin[q] = abs_sin;
        best[q] = ci;
      }
    }

    if (pass == 0) {
      chosen = best;
      bool complete = true;
      for (int q = 0; q < 4; ++q) complete = complete && chosen[q] >= 0;
      if (complete) return chosen;
    } else {
      for (int q = 0; q < 4; ++q) {
        if (chosen[q] < 0 && best[q] >= 0) {
          chosen[q] = best[q];
          if (used_relaxed) ++(*used_relaxed);
        }
      }
    }
  }

  for (int q = 0; q < 4; ++q) {
    if (chosen[q] < 0) {
      throw_error(ErrorCode::QuadrantEmpty,
                  "quadrant " + std::to_string(q + 1) +
                      " has no admissible stencil point");
    }
  }
  return chosen;
}

void derivative_coeffs(const std::array<Vec2, 4>& z, const Vec2& nu,
                       std::array<double, 4>& a, std::array<double, 4>& b) {
  const Vec2 nu_perp(-nu.y(), nu.x());
  Eigen::Matrix4d m;
  for (int j = 0; j < 4; ++j) {
    const double xi = z[j].dot(nu);
    const double eta = z[j].dot(nu_perp);
    m(0, j) = xi;
    m(1, j) = eta;
    m(2, j) = xi * xi;
    m(3, j) = xi * eta;
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  if (!lu.isInvertible()) {
    throw_error(ErrorCode::SingularMomentSystem,
                "stencil points are degenerate (moment matrix singular)");
  }
  const Eigen::Vector4d rhs_a(0.0, 0.0, 2.0, 0.0);
  const Eigen::Vector4d rhs_b(1.0, 0.0, 0.0, 0.0);
  const Eigen::Vector4d sol_a = lu.solve(rhs_a);
  const Eigen::Vector4d sol_b = lu.solve(rhs_b);
  if (!sol_a.allFinite() || !sol_b.allFinite() ||
      (m * sol_a - rhs_a).cwiseAbs().maxCoeff() > 1e-9 ||
      (m * sol_b - rhs_b).cwiseAbs().maxCoeff() > 1e-9) {
    throw_error(ErrorCode::SingularMomentSystem,
                "moment system is too ill-conditioned");
  }
  for (int j = 0; j < 4; ++j) {
    if (sol_a[j] < -1e-9) {
      throw_error(ErrorCode::SingularMomentSystem,
                  "negative second-difference coefficient a_" +
                      std::to_string(j + 1) + " = " + std::to_string(sol_a[j]));
    }
    a[j] = std::max(sol_a[j], 0.0);
    b[j] = sol_b[j];
  }
}

StencilTable build_stencil_table(const Grid& grid) {
  StencilTable table;
  table.dirset = make_direction_set(grid.h());
  table.sqrt_h = std::sqrt(grid.h());
  const int n = grid.num_points();
  const int ndirs = table.dirset.num_directions();
  table.nodes.resize(n);

  parallel_for_blocks(n, [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      NodeStencil& ns = table.nodes[i];
      ns.candidates = candidate_neighborhood(grid, i);
      ns.dirs.resize(ndirs);
      for (int d = 0; d < ndirs; ++d) {
        const Vec2& nu = table.dirset.directions[d];
        int relaxed = 0;
        const std::array<int, 4> sel = select_quadrant_neighbors(
            ns.candidates, nu, table.dirset.dtheta, table.sqrt_h, grid.h(),
            &relaxed);
        ns.relaxed_selections += relaxed;
        std::array<Vec2, 4> z;
        DirectionEntry& entry = ns.dirs[d];
        for (int q = 0; q < 4; ++q) {
          z[q] = ns.candidates[sel[q]].z;
          entry.nbr[q] = ns.candidates[sel[q]].node;
        }
        derivative_coeffs(z, nu, entry.a, entry.b);
      }
    }
  });

  double max_row = 0.0;
  for (int i = 0; i < n; ++i) {
    const NodeStencil& ns = table.nodes[i];
    const DirectionEntry& e1 = ns.dirs[table.dirset.coordinate_e1()];
    const DirectionEntry& e2 = ns.dirs[table.dirset.coordinate_e2()];
    double row = 0.0;
    for (int q = 0; q < 4; ++q) row += e1.a[q] + e2.a[q];
    max_row = std::max(max_row, row);
  }
  table.max_lap_row_sum = max_row;
  return table;
}

}  // namespace spheremesh
