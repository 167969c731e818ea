#include "hybridnet/raster.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "hybridnet/csv.h"
#include "hybridnet/error.h"

namespace hybridnet {

Raster::Raster(double xll_lon, double yll_lat, double cell_deg,
               std::size_t ncols, std::size_t nrows, std::vector<double> values,
               double nodata)
    : xll_(xll_lon),
      yll_(yll_lat),
      cell_(cell_deg),
      ncols_(ncols),
      nrows_(nrows),
      values_(std::move(values)),
      nodata_(nodata) {
  if (!(cell_deg > 0.0)) throw InputError("raster cell size must be positive");
  if (ncols == 0 || nrows == 0) throw InputError("raster must be non-empty");
  if (values_.size() != ncols * nrows) {
    throw InputError("raster has " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(ncols * nrows));
  }
}

Raster Raster::constant(double lat0, double lon0, double lat1, double lon1,
                        double cell_deg, double value) {
  const auto ncols =
      static_cast<std::size_t>(std::ceil((lon1 - lon0) / cell_deg - 1e-9));
  const auto nrows =
      static_cast<std::size_t>(std::ceil((lat1 - lat0) / cell_deg - 1e-9));
  return Raster(lon0, lat0, cell_deg, std::max<std::size_t>(ncols, 1),
                std::max<std::size_t>(nrows, 1),
                std::vector<double>(std::max<std::size_t>(ncols, 1) *
                                        std::max<std::size_t>(nrows, 1),
                                    value));
}

Raster Raster::read_esri_ascii(std::istream& in, const std::string& source) {
  std::map<std::string, double> header;
  std::string key;
  // Header lines are "key value"; the first token that parses as a number
  // starts the data block.
  std::streampos data_start = in.tellg();
  while (in >> key) {
    std::string lower = key;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (!lower.empty() && !std::isalpha(static_cast<unsigned char>(lower[0]))) {
      break;
    }
    double v;
    if (!(in >> v)) throw InputError(source + ": bad header value for " + key);
    header[lower] = v;
    data_start = in.tellg();
  }
  in.clear();
  in.seekg(data_start);
  auto need = [&](const char* k) {
    auto it = header.find(k);
    if (it == header.end()) {
      throw InputError(source + ": missing header field " + std::string(k));
    }
    return it->second;
  };
  const double ncols = need("ncols");
  const double nrows = need("nrows");
  const double cell = need("cellsize");
  double xll, yll;
  if (header.count("xllcorner")) {
    xll = need("xllcorner");
    yll = need("yllcorner");
  } else {
    xll = need("xllcenter") - cell / 2.0;
    yll = need("yllcenter") - cell / 2.0;
  }
  const double nodata =
      header.count("nodata_value") ? header["nodata_value"] : -9999.0;
  if (ncols < 1 || nrows < 1) throw InputError(source + ": empty grid");
  const auto nc = static_cast<std::size_t>(ncols);
  const auto nr = static_cast<std::size_t>(nrows);
  std::vector<double> values;
  values.reserve(nc * nr);
  std::string tok;
  while (values.size() < nc * nr && in >> tok) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError(source + ": bad grid value '" + tok + "'");
    }
  }
  if (values.size() != nc * nr) {
    throw InputError(source + ": expected " + std::to_string(nc * nr) +
                     " values, found " + std::to_string(values.size()));
  }
  return Raster(xll, yll, cell, nc, nr, std::move(values), nodata);
}

Raster Raster::read_esri_ascii_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_esri_ascii(in, path);
}

void Raster::write_esri_ascii(std::ostream& out) const {
  out << "ncols " << ncols_ << "\n"
      << "nrows " << nrows_ << "\n"
      << "xllcorner " << format_double(xll_) << "\n"
      << "yllcorner " << format_double(yll_) << "\n"
      << "cellsize " << format_double(cell_) << "\n"
      << "NODATA_value " << format_double(nodata_) << "\n";
  for (std::size_t r = 0; r < nrows_; ++r) {
    for (std::size_t c = 0; c < ncols_; ++c) {
      if (c) out << ' ';
      out << format_double(values_[r * ncols_ + c]);
    }
    out << "\n";
  }
}

bool Raster::contains(const GeoPoint& p) const {
  return p.lon() >= min_lon() && p.lon() <= max_lon() &&
         p.lat() >= min_lat() && p.lat() <= max_lat();
}

double& Raster::at(std::size_t col, std::size_t row_from_north) {
  return values_.at(row_from_north * ncols_ + col);
}

double Raster::at(std::size_t col, std::size_t row_from_north) const {
  return values_.at(row_from_north * ncols_ + col);
}

GeoPoint Raster::cell_center(std::size_t col, std::size_t row_from_north) const {
  const double lon = xll_ + (static_cast<double>(col) + 0.5) * cell_;
  const double lat =
      yll_ + (static_cast<double>(nrows_ - 1 - row_from_north) + 0.5) * cell_;
  return GeoPoint(lat, lon);
}

double Raster::value(std::size_t col, std::size_t row_from_north) const {
  const double v = values_[row_from_north * ncols_ + col];
  return v == nodata_ ? 0.0 : v;
}

double Raster::sample(const GeoPoint& p) const {
  if (!contains(p)) {
    std::ostringstream msg;
    msg << "point (" << p.lat() << ", " << p.lon() << ") outside raster";
    throw InputError(msg.str());
  }
  const double fx = std::clamp((p.lon() - xll_) / cell_ - 0.5, 0.0,
                               static_cast<double>(ncols_ - 1));
  const double fy = std::clamp((p.lat() - yll_) / cell_ - 0.5, 0.0,
                               static_cast<double>(nrows_ - 1));
  const auto x0 = static_cast<std::size_t>(fx);
  const auto y0 = static_cast<std::size_t>(fy);
  const std::size_t x1 = std::min(x0 + 1, ncols_ - 1);
  const std::size_t y1 = std::min(y0 + 1, nrows_ - 1);
  const double tx = fx - static_cast<double>(x0);
  const double ty = fy - static_cast<double>(y0);
  // y counts from the south; storage counts rows from the north.
  const std::size_t r0 = nrows_ - 1 - y0;
  const std::size_t r1 = nrows_ - 1 - y1;
  const double south = value(x0, r0) * (1.0 - tx) + value(x1, r0) * tx;
  const double north = value(x0, r1) * (1.0 - tx) + value(x1, r1) * tx;
  return south * (1.0 - ty) + north * ty;
}

double Raster::sample_clamped(const GeoPoint& p) const {
  return sample(GeoPoint(std::clamp(p.lat(), min_lat(), max_lat()),
                         std::clamp(p.lon(), min_lon(), max_lon())));
}

}  // namespace hybridnet
