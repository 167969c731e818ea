#include "hybridnet/weather.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "hybridnet/error.h"
#include "hybridnet/rng.h"
#include "hybridnet/stats.h"

namespace hybridnet {

void AttenuationModel::validate() const {
  if (!(k_coeff >= 0.0)) throw InputError("attenuation k must be non-negative");
  if (!(alpha > 0.0)) throw InputError("attenuation alpha must be positive");
  if (!(fail_threshold_db > 0.0)) throw InputError("failure threshold must be positive");
  if (!(sample_step_km > 0.0)) throw InputError("rain sample step must be positive");
}

double rain_attenuation_db(double hop_km, double rain_mm_h,
                           const AttenuationModel& m) {
  if (!(hop_km >= 0.0) || !(rain_mm_h >= 0.0)) {
    throw InputError("hop length and rain rate must be non-negative");
  }
  return m.k_coeff * std::pow(rain_mm_h, m.alpha) * hop_km;
}

double hop_attenuation_db(const GeoPoint& a, const GeoPoint& b,
                          const Raster& rain, const AttenuationModel& m) {
  const double d = geodesic_km(a, b);
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(d / m.sample_step_km)));
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const GeoPoint p = interpolate(a, b, static_cast<double>(i) / static_cast<double>(n));
    if (!rain.contains(p)) throw InputError("hop outside rain field coverage");
    sum += std::max(0.0, rain.sample(p));
  }
  return rain_attenuation_db(d, sum / static_cast<double>(n + 1), m);
}

std::vector<LinkHops> link_hops(const DesignInput& in, const NetworkDesign& design,
                                const HopGraph& hg, std::span<const MwLink> mw_links) {
  std::vector<LinkHops> out;
  for (LinkKey k : design.built) {
    const MwLink* best = nullptr;
    for (const MwLink& l : mw_links) {
      const LinkKey lk{std::min(l.site_a, l.site_b), std::max(l.site_a, l.site_b)};
      if (lk == k && (!best || l.length_km < best->length_km)) best = &l;
    }
    if (!best) throw InputError("no tower series for a built link");
    LinkHops h{k, in.sites[k.a].id + "-" + in.sites[k.b].id, {}};
    for (std::size_t t : best->towers) h.towers.push_back(hg.towers.at(t).location);
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<LinkKey> failed_links(std::span<const LinkHops> links,
                                  const Raster& rain, const AttenuationModel& m) {
  m.validate();
  std::vector<LinkKey> out;
  for (const LinkHops& l : links) {
    for (std::size_t i = 0; i + 1 < l.towers.size(); ++i) {
      if (hop_attenuation_db(l.towers[i], l.towers[i + 1], rain, m) > m.fail_threshold_db) {
        out.push_back(l.link);
        break;
      }
    }
  }
  return out;
}

std::vector<LinkKey> failed_links(std::span<const LinkHops> links,
                                  const std::map<std::string, double>& rain_by_link,
                                  const AttenuationModel& m) {
  m.validate();
  std::vector<LinkKey> out;
  for (const LinkHops& l : links) {
    auto it = rain_by_link.find(l.id);
    if (it == rain_by_link.end()) continue;
    for (std::size_t i = 0; i + 1 < l.towers.size(); ++i) {
      const double d = geodesic_km(l.towers[i], l.towers[i + 1]);
      if (rain_attenuation_db(d, it->second, m) > m.fail_threshold_db) {
        out.push_back(l.link);
        break;
      }
    }
  }
  return out;
}

WeatherReport reroute_and_stats(const DesignInput& in, const NetworkDesign& fair,
                                std::span<const std::string> timestamps,
                                std::span<const std::vector<LinkKey>> failures) {
  if (timestamps.size() != failures.size()) {
    throw InputError("one failure set per timestamp required");
  }
  WeatherReport rep;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    const std::set<LinkKey> down(failures[i].begin(), failures[i].end());
    std::vector<LinkKey> up;
    for (LinkKey k : fair.built) {
      if (!down.count(k)) up.push_back(k);
    }
    IntervalResult r{timestamps[i], {down.begin(), down.end()}, evaluate_design(in, up)};
    rep.intervals.push_back(std::move(r));
  }
  const std::size_t pairs = fair.routes.size();
  if (rep.intervals.empty()) return rep;
  const std::vector<double> ones(rep.intervals.size(), 1.0);
  for (std::size_t p = 0; p < pairs; ++p) {
    std::vector<double> series;
    for (const IntervalResult& r : rep.intervals) series.push_back(r.design.routes[p].stretch);
    rep.pair_median.push_back(weighted_quantile(series, ones, 0.5));
    rep.pair_p99.push_back(weighted_quantile(series, ones, 0.99));
  }
  return rep;
}

std::vector<std::string> sample_intervals(std::span<const std::string> timestamps,
                                          std::size_t per_day, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_day;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    by_day[timestamps[i].substr(0, 10)].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (auto& [day, idx] : by_day) {
    const std::size_t take = std::min(per_day, idx.size());
    for (std::size_t j = 0; j < take; ++j) {
      std::swap(idx[j], idx[j + rng.below(idx.size() - j)]);
    }
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(keep.begin(), keep.end());
  std::vector<std::string> out;
  for (std::size_t i : keep) out.push_back(timestamps[i]);
  return out;
}

}  // namespace hybridnet
