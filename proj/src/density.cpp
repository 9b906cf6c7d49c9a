#include "spheremesh/density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace spheremesh {

DensityField normalize_density(const Grid& grid, std::vector<double> values,
                               double floor_rel) {
  if (values.size() != static_cast<std::size_t>(grid.num_points())) {
    throw_error(ErrorCode::DegenerateConfiguration,
                "density length does not match grid");
  }
  const double total_area = grid.integrate(std::vector<double>(values.size(), 1.0));
  for (double& v : values) v = std::max(v, 0.0);

  for (int iter = 0; iter < 16; ++iter) {
    double mass = grid.integrate(values);
    if (!(mass > 0.0)) {
      throw_error(ErrorCode::NonpositiveDensity, "density has no positive mass");
    }
    const double mean = mass / total_area;
    const double floor_abs = floor_rel * mean;
    bool floored = false;
    for (double& v : values) {
      if (v < floor_abs) {
        v = floor_abs;
        floored = true;
      }
    }
    if (floored) mass = grid.integrate(values);
    const double scale = 4.0 * kPi / mass;
    if (std::abs(scale - 1.0) > 1e-15) {
      for (double& v : values) v *= scale;
    }
    if (!floored && std::abs(scale - 1.0) <= 1e-12) break;
  }

  DensityField rho;
  rho.values = std::move(values);
  return rho;
}

DensityField builtin_density(const std::string& name, const Grid& grid,
                             double floor_rel) {
  const int n = grid.num_points();
  if (name == "uniform") {
    DensityField rho;
    rho.values.assign(n, 1.0);
    return rho;
  }
  if (name == "equator") {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
      const double z = std::clamp(grid.points()[i].z(), -1.0, 1.0);
      const double q = std::acos(z) - kPi / 2.0;
      v[i] = (1.0 - std::exp(-q * q / 30.0)) / 3.53552;
    }
    return normalize_density(grid, std::move(v), floor_rel);
  }
  throw_error(ErrorCode::UnknownDensityName, "no builtin density '" + name + "'");
}

double mass_balance_check(const Grid& grid, const DensityField& rho0,
                          const DensityField& rho1) {
  return std::abs(grid.integrate(rho0.values) - grid.integrate(rho1.values));
}

// ---------------------------------------------------------------------------
// rasters

DensityField from_raster(const Raster& img, const RasterOptions& opts,
                         const Grid& grid) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() !=
          static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height)) {
    throw_error(ErrorCode::UnsupportedRasterFormat, "raster has no pixel data");
  }
  if (!(opts.hi > opts.lo)) {
    throw_error(ErrorCode::DegenerateRange, "raster range requires hi > lo");
  }
  const int n = grid.num_points();
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const Vec3& p = grid.points()[i].vec();
    const double lat = std::asin(std::clamp(p.z(), -1.0, 1.0));
    const double lon = std::atan2(p.y(), p.x());
    int row = static_cast<int>((kPi / 2.0 - lat) / kPi * img.height);
    row = std::clamp(row, 0, img.height - 1);
    int col = static_cast<int>((lon + kPi) / (2.0 * kPi) * img.width);
    col = std::clamp(col, 0, img.width - 1);
    double value = img.at(row, col);
    if (opts.invert) value = 255.0 - value;
    v[i] = opts.lo + (opts.hi - opts.lo) * value / 255.0;
  }
  return normalize_density(grid, std::move(v), opts.floor_rel);
}

Raster load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);

  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") {
    throw_error(ErrorCode::UnsupportedRasterFormat,
                "expected PGM (P5/P2), got '" + magic + "' in " + path);
  }
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw_error(ErrorCode::UnsupportedRasterFormat, "truncated header in " + path);
  };

  Raster img;
  img.width = std::stoi(next_token());
  img.height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255) {
    throw_error(ErrorCode::UnsupportedRasterFormat,
                "only 8-bit PGM is supported: " + path);
  }
  const std::size_t count =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw_error(ErrorCode::UnsupportedRasterFormat, "truncated pixels in " + path);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      int v;
      if (!(in >> v) || v < 0 || v > maxval) {
        throw_error(ErrorCode::UnsupportedRasterFormat, "bad pixel in " + path);
      }
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

void save_pgm(const Raster& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw_error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace spheremesh
