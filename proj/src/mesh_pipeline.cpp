#include "spheremesh/mesh_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace spheremesh {

MovedMesh apply_map(const Grid& grid, const MapField& map) {
  if (map.size() != static_cast<std::size_t>(grid.num_points())) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "map length does not match grid");
  }
  MovedMesh m;
  m.source = &grid;
  m.images = map;
  return m;
}

TanglingReport tangling_report(const Grid& src, const MovedMesh& moved) {
  if (moved.source != &src) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "moved mesh does not belong to this grid");
  }
  const int t = src.num_triangles();
  TanglingReport report;
  report.min_area_ratio = std::numeric_limits<double>::infinity();

  std::vector<std::pair<double, int>> ratios;
  ratios.reserve(t);
  for (int ti = 0; ti < t; ++ti) {
    const Triangle& tri = src.triangles()[ti];
    const double src_area = signed_spherical_area(
        src.points()[tri[0]], src.points()[tri[1]], src.points()[tri[2]]);
    const double moved_area = signed_spherical_area(moved.images.images[tri[0]],
                                                    moved.images.images[tri[1]],
                                                    moved.images.images[tri[2]]);
    // Source triangles are positively oriented by the grid invariant.
    const bool degenerate = std::abs(moved_area) < 1e-14;
    const bool inverted = degenerate || (moved_area * src_area < 0.0);
    if (inverted) ++report.inverted_count;
    const double ratio = moved_area / src_area;
    report.min_area_ratio = std::min(report.min_area_ratio, ratio);
    ratios.emplace_back(ratio, ti);
  }
  report.inverted_fraction = static_cast<double>(report.inverted_count) / t;

  const int worst = std::min<int>(10, t);
  std::partial_sort(ratios.begin(), ratios.begin() + worst, ratios.end());
  for (int k = 0; k < worst; ++k) report.worst_triangles.push_back(ratios[k].second);
  return report;
}

std::string tangling_report_text(const TanglingReport& report) {
  std::ostringstream out;
  out << "inverted_count=" << report.inverted_count << '\n'
      << "inverted_fraction=" << report.inverted_fraction << '\n'
      << "min_area_ratio=" << report.min_area_ratio << '\n'
      << "worst_triangles=";
  for (std::size_t k = 0; k < report.worst_triangles.size(); ++k) {
    if (k) out << ' ';
    out << report.worst_triangles[k];
  }
  out << '\n';
  return out.str();
}

std::string tangling_report_csv_header() {
  return "inverted_count,inverted_fraction,min_area_ratio";
}

std::string tangling_report_csv_row(const TanglingReport& report) {
  std::ostringstream out;
  out << report.inverted_count << ',' << report.inverted_fraction << ','
      << report.min_area_ratio;
  return out.str();
}

PushforwardResult pushforward_density(const Grid& src, const MovedMesh& moved,
                                      const DensityField& rho0,
                                      bool require_untangled) {
  const TanglingReport report = tangling_report(src, moved);
  if (report.inverted_count > 0 && require_untangled) {
    throw_error(ErrorCode::UnreliableJacobian,
                std::to_string(report.inverted_count) +
                    " inverted triangles; Jacobian estimate unreliable");
  }

  const int n = src.num_points();
  PushforwardResult result;
  result.reliable = report.inverted_count == 0;
  result.jacobian.assign(n, 0.0);
  result.values.assign(n, 0.0);
  result.moved_weights.assign(n, 0.0);

  std::vector<double> src_area(n, 0.0);
  for (int ti = 0; ti < src.num_triangles(); ++ti) {
    const Triangle& tri = src.triangles()[ti];
    const double a_src = spherical_triangle_area(
        src.points()[tri[0]], src.points()[tri[1]], src.points()[tri[2]]);
    const double a_moved = spherical_triangle_area(moved.images.images[tri[0]],
                                                   moved.images.images[tri[1]],
                                                   moved.images.images[tri[2]]);
    for (int k = 0; k < 3; ++k) {
      src_area[tri[k]] += a_src;
      result.moved_weights[tri[k]] += a_moved / 3.0;
    }
  }
  for (int i = 0; i < n; ++i) {
    result.jacobian[i] = 3.0 * result.moved_weights[i] / src_area[i];
    result.values[i] = rho0[i] / result.jacobian[i];
  }
  return result;
}

double pushforward_l1_error(const Grid& src, const MovedMesh& moved,
                            const PushforwardResult& pushforward,
                            const DensityField& target) {
  const int n = src.num_points();
  int hint = -1;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t =
        src.interp_scalar(target.values, moved.images.images[i], &hint);
    const double w = pushforward.moved_weights[i];
    num += w * std::abs(pushforward.values[i] - t);
    den += w * t;
  }
  return num / den;
}

}  // namespace spheremesh
