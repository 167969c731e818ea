#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hybridnet/designer.h"
#include "hybridnet/raster.h"

namespace hybridnet {

// Power-law specific attenuation k * R^alpha dB/km. Defaults are the 11 GHz
// horizontal-polarization coefficients.
struct AttenuationModel {
  double k_coeff = 0.01217;
  double alpha = 1.2571;
  double fail_threshold_db = 30.0;
  double sample_step_km = 1.0;  // rain sampling along a hop
  void validate() const;
};

double rain_attenuation_db(double hop_km, double rain_mm_h,
                           const AttenuationModel& m);

// Attenuation of one hop with the rain rate averaged over samples along the
// great circle. Throws InputError if any sample lies outside the field.
double hop_attenuation_db(const GeoPoint& a, const GeoPoint& b,
                          const Raster& rain, const AttenuationModel& m);

// A built microwave link as the sequence of its tower positions; each
// consecutive pair is a hop.
struct LinkHops {
  LinkKey link;
  std::string id;  // "<site_a>-<site_b>"
  std::vector<GeoPoint> towers;
};

std::vector<LinkHops> link_hops(const DesignInput& in, const NetworkDesign& design,
                                const HopGraph& hg, std::span<const MwLink> mw_links);

// Links with at least one hop above the failure threshold.
std::vector<LinkKey> failed_links(std::span<const LinkHops> links,
                                  const Raster& rain, const AttenuationModel& m);

// Same with one rain rate per link id applied to all of its hops; links
// without an entry see no rain.
std::vector<LinkKey> failed_links(std::span<const LinkHops> links,
                                  const std::map<std::string, double>& rain_by_link,
                                  const AttenuationModel& m);

struct IntervalResult {
  std::string timestamp;
  std::vector<LinkKey> failed;
  NetworkDesign design;  // rerouted over the surviving links
};

struct WeatherReport {
  std::vector<IntervalResult> intervals;
  // Per routed pair (order of the fair-weather routes): stretch quantiles
  // over intervals.
  std::vector<double> pair_median;
  std::vector<double> pair_p99;
};

// Reroutes every interval over fiber plus the links that did not fail.
WeatherReport reroute_and_stats(const DesignInput& in, const NetworkDesign& fair,
                                std::span<const std::string> timestamps,
                                std::span<const std::vector<LinkKey>> failures);

// Picks `per_day` timestamps per calendar day (first 10 characters) at
// random, keeping the input order. All are kept when a day has fewer.
std::vector<std::string> sample_intervals(std::span<const std::string> timestamps,
                                          std::size_t per_day, std::uint64_t seed);

}  // namespace hybridnet
