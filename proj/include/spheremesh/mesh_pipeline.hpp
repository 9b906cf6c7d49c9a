#pragma once

#include <string>

#include "spheremesh/density.hpp"
#include "spheremesh/grid.hpp"

namespace spheremesh {

/// Source grid with its nodes moved to the map images; connectivity is
/// inherited from the source.
struct MovedMesh {
  const Grid* source = nullptr;
  MapField images;
};

struct TanglingReport {
  int inverted_count = 0;
  double inverted_fraction = 0.0;
  double min_area_ratio = 0.0;
  std::vector<int> worst_triangles;  // lowest signed area ratios first
};

MovedMesh apply_map(const Grid& grid, const MapField& map);

/// A triangle counts as inverted when its ambient orientation determinant
/// changes sign between the source and the moved mesh (degenerate moved
/// triangles, area < 1e-14, count as inverted).
TanglingReport tangling_report(const Grid& src, const MovedMesh& moved);

std::string tangling_report_text(const TanglingReport& report);
std::string tangling_report_csv_header();
std::string tangling_report_csv_row(const TanglingReport& report);

struct PushforwardResult {
  std::vector<double> values;         // rho0 / J at each node
  std::vector<double> jacobian;       // incident-area ratio J(i)
  std::vector<double> moved_weights;  // vertex-lumped areas of the moved mesh
  bool reliable = true;               // false when the moved mesh is tangled
};

/// Discrete Jacobian via incident-triangle-area ratios and the pushforward
/// density rho0 / J. With require_untangled (the default) a tangled moved
/// mesh throws UnreliableJacobian; otherwise the result is flagged.
PushforwardResult pushforward_density(const Grid& src, const MovedMesh& moved,
                                      const DensityField& rho0,
                                      bool require_untangled = true);

/// Relative L1 distance between the pushforward density and `target`
/// interpolated at the moved nodes, weighted by the moved-mesh areas.
double pushforward_l1_error(const Grid& src, const MovedMesh& moved,
                            const PushforwardResult& pushforward,
                            const DensityField& target);

}  // namespace spheremesh
