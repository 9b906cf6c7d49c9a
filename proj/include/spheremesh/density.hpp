#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spheremesh/grid.hpp"

namespace spheremesh {

/// Strictly positive per-node density w.r.t. the volume form, normalized so
/// that integrate(values) = 4*pi (uniform density is identically 1).
struct DensityField {
  std::vector<double> values;

  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  ScalarField as_scalar() const {
    ScalarField f;
    f.values = values;
    return f;
  }
};

inline constexpr double kDefaultDensityFloor = 1e-3;  // relative to the mean

/// Floors `values` at floor_rel * mean and rescales to total mass 4*pi,
/// iterating to the joint fixed point. Throws NonpositiveDensity when the
/// input has no positive mass.
DensityField normalize_density(const Grid& grid, std::vector<double> values,
                               double floor_rel = kDefaultDensityFloor);

/// Builtin analytic densities:
///  - "uniform": identically 1
///  - "equator": (1 - exp(-(arccos z - pi/2)^2 / 30)) / 3.53552, floored and
///    renormalized (the printed constant is documentary; normalization is
///    always re-enforced numerically)
DensityField builtin_density(const std::string& name, const Grid& grid,
                             double floor_rel = kDefaultDensityFloor);

/// |integrate(rho0) - integrate(rho1)|.
double mass_balance_check(const Grid& grid, const DensityField& rho0,
                          const DensityField& rho1);

// --- raster densities ---

/// 8-bit single-channel equirectangular image: row 0 is north, pixel (r, c)
/// covers latitude pi/2 - pi (r + 0.5) / H and longitude 2 pi (c + 0.5) / W - pi.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int row, int col) const { return pixels[row * width + col]; }
};

struct RasterOptions {
  bool invert = false;
  double floor_rel = kDefaultDensityFloor;
  double lo = 0.0;
  double hi = 1.0;
};

/// Nearest-pixel sampling (index truncation) of the raster at each node's
/// latitude/longitude, affinely mapped from [0, 255] to [lo, hi], optionally
/// inverted (v -> 255 - v), then floored and normalized.
DensityField from_raster(const Raster& img, const RasterOptions& opts,
                         const Grid& grid);

/// PGM readers/writers; binary (P5) and plain-text (P2), 8-bit only.
Raster load_pgm(const std::string& path);
void save_pgm(const Raster& img, const std::string& path);

}  // namespace spheremesh
