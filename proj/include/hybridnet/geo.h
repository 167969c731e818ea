#pragma once

#include <string_view>

namespace hybridnet {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kSpeedOfLightKmPerS = 299792.458;

// A point on the Earth's surface in decimal degrees. Construction validates
// the ranges lat in [-90, 90] and lon in [-180, 180].
class GeoPoint {
 public:
  GeoPoint(double lat, double lon);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_;
  double lon_;
};

enum class Medium { kMicrowave, kFiber };

const char* to_string(Medium m);
Medium parse_medium(std::string_view s);

// Propagation speeds. Latency in a medium is distance * slowdown / c.
struct LatencyModel {
  double c_vacuum_km_s = kSpeedOfLightKmPerS;
  double fiber_slowdown = 1.5;
  double mw_slowdown = 1.0;

  double slowdown(Medium m) const {
    return m == Medium::kFiber ? fiber_slowdown : mw_slowdown;
  }
  // Throws InputError unless both slowdowns are >= 1 and c is positive.
  void validate() const;
};

// Great-circle distance on a sphere of radius kEarthRadiusKm (haversine).
double geodesic_km(const GeoPoint& a, const GeoPoint& b);

// Point at fraction t in [0, 1] along the great circle from a to b.
GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double t);

// One-way latency over distance_km of the given medium.
double latency_ms(double distance_km, Medium medium,
                  const LatencyModel& model = {});

// c-latency between two points, i.e. geodesic distance at vacuum speed.
double c_latency_ms(const GeoPoint& a, const GeoPoint& b,
                    const LatencyModel& model = {});

// Ratio of an achieved one-way latency to the c-latency of (src, dst).
// Throws InputError when src and dst coincide.
double stretch(double path_latency_ms, const GeoPoint& src, const GeoPoint& dst,
               const LatencyModel& model = {});

}  // namespace hybridnet
