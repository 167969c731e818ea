#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hybridnet/geo.h"

namespace hybridnet {

// Regular lat/lon grid of values, laid out as an ESRI ASCII grid: the first
// stored row is the northernmost. Used for surface elevation (terrain plus
// clutter, meters) and for rain rate (mm/h).
class Raster {
 public:
  // values.size() must equal ncols * nrows. (xll, yll) is the south-west
  // corner of the south-west cell.
  Raster(double xll_lon, double yll_lat, double cell_deg, std::size_t ncols,
         std::size_t nrows, std::vector<double> values,
         double nodata = -9999.0);

  // Constant-valued grid covering [lat0, lat1] x [lon0, lon1].
  static Raster constant(double lat0, double lon0, double lat1, double lon1,
                         double cell_deg, double value);

  static Raster read_esri_ascii(std::istream& in,
                                const std::string& source = "<grid>");
  static Raster read_esri_ascii_file(const std::string& path);
  void write_esri_ascii(std::ostream& out) const;

  std::size_t ncols() const { return ncols_; }
  std::size_t nrows() const { return nrows_; }
  double cell_deg() const { return cell_; }
  double min_lon() const { return xll_; }
  double min_lat() const { return yll_; }
  double max_lon() const { return xll_ + cell_ * static_cast<double>(ncols_); }
  double max_lat() const { return yll_ + cell_ * static_cast<double>(nrows_); }

  bool contains(const GeoPoint& p) const;

  // Bilinear interpolation between cell centers, clamped to the outermost
  // centers near the border. Nodata cells read as 0. Throws InputError for
  // points outside the bounding box.
  double sample(const GeoPoint& p) const;
  // Same, but points outside are first clamped onto the bounding box.
  double sample_clamped(const GeoPoint& p) const;

  // Cell access, row 0 = northernmost.
  double& at(std::size_t col, std::size_t row_from_north);
  double at(std::size_t col, std::size_t row_from_north) const;

  // Center of a cell.
  GeoPoint cell_center(std::size_t col, std::size_t row_from_north) const;

 private:
  double value(std::size_t col, std::size_t row_from_north) const;

  double xll_;
  double yll_;
  double cell_;
  std::size_t ncols_;
  std::size_t nrows_;
  std::vector<double> values_;
  double nodata_;
};

using TerrainGrid = Raster;

}  // namespace hybridnet
