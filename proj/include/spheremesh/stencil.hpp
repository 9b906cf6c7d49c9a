#pragma once

#include <array>
#include <vector>

#include "spheremesh/grid.hpp"

namespace spheremesh {

/// Discrete direction set: angles j*dtheta for j = 0..2K-1 where
/// K = floor(pi / (2 sqrt(h))) and dtheta = pi / (2K). Orthogonal pairs are
/// (j, j+K); the coordinate directions (1,0), (0,1) sit at j = 0 and j = K.
struct DirectionSet {
  double dtheta = 0.0;
  int pair_count = 0;  // K
  std::vector<Vec2> directions;

  int coordinate_e1() const { return 0; }
  int coordinate_e2() const { return pair_count; }
  int num_directions() const { return static_cast<int>(directions.size()); }
  /// Direction indices of orthogonal pair j (1-based, j = 1..K).
  std::pair<int, int> pair(int j) const {
    return {j, (j + pair_count) % num_directions()};
  }
};

DirectionSet make_direction_set(double h);

struct Candidate {
  int node = -1;
  Vec2 z{0.0, 0.0};  // geodesic normal coordinates about the stencil center
  double r = 0.0;    // = geodesic distance to the center
};

/// Neighbor quadruple and derivative coefficients for one direction:
/// D_nn u = sum_j a_j (u(x_j) - u(x_i)), D_n u = sum_j b_j (u(x_j) - u(x_i)).
struct DirectionEntry {
  std::array<int, 4> nbr{-1, -1, -1, -1};  // grid node indices, one per quadrant
  std::array<double, 4> a{};
  std::array<double, 4> b{};
};

struct NodeStencil {
  std::vector<DirectionEntry> dirs;  // aligned with DirectionSet::directions
  std::vector<Candidate> candidates;
  int relaxed_selections = 0;  // quadrants that needed the relaxed radius
};

struct StencilTable {
  DirectionSet dirset;
  std::vector<NodeStencil> nodes;
  double sqrt_h = 0.0;
  double max_lap_row_sum = 0.0;  // max_i sum of a over both coordinate dirs

  const DirectionEntry& entry(int node, int dir) const {
    return nodes[node].dirs[dir];
  }
};

/// All grid nodes within geodesic distance sqrt(h) of node i (excluding i),
/// with their tangent-plane coordinates. Throws EmptyNeighborhood when no
/// node qualifies.
std::vector<Candidate> candidate_neighborhood(const Grid& grid, int i);

/// Picks one admissible candidate per quadrant of the rotated frame
/// (nu, nu_perp): the argmin of |sin theta| subject to |sin theta| >= dtheta
/// and r >= sqrt(h) - 2h (relaxed to r >= sqrt(h)/2 for a quadrant that would
/// otherwise be empty). Ties break to the smallest node index. Returns
/// indices into `candidates`; sets *used_relaxed when the relaxed radius was
/// needed. Throws QuadrantEmpty if a quadrant has no admissible point.
std::array<int, 4> select_quadrant_neighbors(
    const std::vector<Candidate>& candidates, const Vec2& nu, double dtheta,
    double sqrt_h, double h, int* used_relaxed = nullptr);

/// Second- and first-derivative coefficients from the Taylor moment systems
///   sum a_j z_j = 0,  sum a_j (z_j.nu)^2 = 2,  sum a_j (z_j.nu)(z_j.nu_perp) = 0
///   sum b_j z_j = nu, sum b_j (z_j.nu)^2 = 0,  sum b_j (z_j.nu)(z_j.nu_perp) = 0.
/// The a_j must come out nonnegative (monotonicity); a configuration that
/// yields a materially negative a_j or a singular system throws
/// SingularMomentSystem.
void derivative_coeffs(const std::array<Vec2, 4>& z, const Vec2& nu,
                       std::array<double, 4>& a, std::array<double, 4>& b);

StencilTable build_stencil_table(const Grid& grid);

}  // namespace spheremesh
