#include "hybridnet/geo.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hybridnet/error.h"

namespace hybridnet {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!(lat >= -90.0 && lat <= 90.0)) {
    throw InputError("latitude out of range: " + std::to_string(lat));
  }
  if (!(lon >= -180.0 && lon <= 180.0)) {
    throw InputError("longitude out of range: " + std::to_string(lon));
  }
}

const char* to_string(Medium m) {
  return m == Medium::kFiber ? "fiber" : "mw";
}

Medium parse_medium(std::string_view s) {
  if (s == "mw" || s == "microwave") return Medium::kMicrowave;
  if (s == "fiber") return Medium::kFiber;
  throw InputError("unknown medium: " + std::string(s));
}

void LatencyModel::validate() const {
  if (!(c_vacuum_km_s > 0.0)) throw InputError("c_vacuum must be positive");
  if (!(fiber_slowdown >= 1.0)) throw InputError("fiber_slowdown must be >= 1");
  if (!(mw_slowdown >= 1.0)) throw InputError("mw_slowdown must be >= 1");
}

double geodesic_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.lon() - a.lon()) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double t) {
  const double delta = geodesic_km(a, b) / kEarthRadiusKm;
  if (delta < 1e-12) return a;
  const double phi1 = a.lat() * kDegToRad, lam1 = a.lon() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad, lam2 = b.lon() * kDegToRad;
  const double wa = std::sin((1.0 - t) * delta) / std::sin(delta);
  const double wb = std::sin(t * delta) / std::sin(delta);
  const double x = wa * std::cos(phi1) * std::cos(lam1) +
                   wb * std::cos(phi2) * std::cos(lam2);
  const double y = wa * std::cos(phi1) * std::sin(lam1) +
                   wb * std::cos(phi2) * std::sin(lam2);
  const double z = wa * std::sin(phi1) + wb * std::sin(phi2);
  const double lat = std::atan2(z, std::hypot(x, y)) / kDegToRad;
  const double lon = std::atan2(y, x) / kDegToRad;
  return GeoPoint(std::clamp(lat, -90.0, 90.0), std::clamp(lon, -180.0, 180.0));
}

double latency_ms(double distance_km, Medium medium, const LatencyModel& model) {
  if (!(distance_km >= 0.0)) throw InputError("negative distance");
  return distance_km * model.slowdown(medium) / model.c_vacuum_km_s * 1000.0;
}

double c_latency_ms(const GeoPoint& a, const GeoPoint& b,
                    const LatencyModel& model) {
  return geodesic_km(a, b) / model.c_vacuum_km_s * 1000.0;
}

double stretch(double path_latency_ms, const GeoPoint& src, const GeoPoint& dst,
               const LatencyModel& model) {
  const double base = c_latency_ms(src, dst, model);
  if (!(base > 0.0)) throw InputError("stretch undefined for coincident points");
  return path_latency_ms / base;
}

}  // namespace hybridnet
