#include "hybridnet/los.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

#include "hybridnet/csv.h"
#include "hybridnet/error.h"
#include "hybridnet/rng.h"

namespace hybridnet {

void LosParams::validate() const {
  if (!(f_ghz > 0.0)) throw InputError("f_ghz must be positive");
  if (!(k_factor > 0.0)) throw InputError("k_factor must be positive");
  if (!(max_range_km > 0.0)) throw InputError("max_range_km must be positive");
  if (!(usable_height_fraction > 0.0 && usable_height_fraction <= 1.0)) {
    throw InputError("usable_height_fraction must be in (0, 1]");
  }
  if (!(sample_step_m > 0.0)) throw InputError("sample_step_m must be positive");
  if (!(obstruction_margin_m >= 0.0)) {
    throw InputError("obstruction_margin_m must be non-negative");
  }
}

double fresnel_radius_m(double d_km, double f_ghz) {
  if (!(d_km >= 0.0)) throw InputError("negative hop length");
  if (!(f_ghz > 0.0)) throw InputError("frequency must be positive");
  return 8.7 * std::sqrt(d_km) / std::sqrt(f_ghz);
}

double fresnel_radius_at_m(double d1_km, double d2_km, double f_ghz) {
  if (!(d1_km >= 0.0 && d2_km >= 0.0)) throw InputError("negative distance");
  const double d = d1_km + d2_km;
  if (d == 0.0) return 0.0;
  // 4 d1 d2 / D equals D at the midpoint.
  return fresnel_radius_m(4.0 * d1_km * d2_km / d, f_ghz);
}

double earth_bulge_m(double d1_km, double d2_km, double k_factor) {
  if (!(d1_km >= 0.0 && d2_km >= 0.0)) throw InputError("negative distance");
  if (!(k_factor > 0.0)) throw InputError("k_factor must be positive");
  return d1_km * d2_km / (12.74 * k_factor);
}

double antenna_altitude_m(const Tower& t, const LosParams& p) {
  return t.ground_elevation_m + p.usable_height_fraction * t.height_m;
}

bool hop_feasible(const Tower& a_in, const Tower& b_in,
                  const TerrainGrid& terrain, const LosParams& p) {
  if (!terrain.contains(a_in.location) || !terrain.contains(b_in.location)) {
    throw InputError("tower outside terrain: " +
                     (terrain.contains(a_in.location) ? b_in.id : a_in.id));
  }
  // Evaluate in a canonical orientation so the answer is symmetric bit for bit.
  const bool swap =
      std::forward_as_tuple(b_in.id, b_in.location.lat(), b_in.location.lon()) <
      std::forward_as_tuple(a_in.id, a_in.location.lat(), a_in.location.lon());
  const Tower& a = swap ? b_in : a_in;
  const Tower& b = swap ? a_in : b_in;

  const double d_km = geodesic_km(a.location, b.location);
  if (d_km > p.max_range_km || d_km <= 0.0) return false;

  const double ha = antenna_altitude_m(a, p);
  const double hb = antenna_altitude_m(b, p);
  const auto n = static_cast<std::size_t>(std::ceil(d_km * 1000.0 / p.sample_step_m));
  for (std::size_t i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    const double d1 = t * d_km;
    const double d2 = d_km - d1;
    const double line = ha + t * (hb - ha);
    const double ground = terrain.sample_clamped(interpolate(a.location, b.location, t));
    const double needed = ground + earth_bulge_m(d1, d2, p.k_factor) +
                          fresnel_radius_at_m(d1, d2, p.f_ghz) +
                          p.obstruction_margin_m;
    if (line < needed) return false;
  }
  return true;
}

WeightedGraph HopGraph::graph() const {
  WeightedGraph g(towers.size());
  for (const Hop& h : hops) g.add_edge(h.a, h.b, h.length_km);
  return g;
}

std::size_t HopGraph::index_of(const std::string& tower_id) const {
  auto it = std::lower_bound(
      towers.begin(), towers.end(), tower_id,
      [](const Tower& t, const std::string& id) { return t.id < id; });
  if (it == towers.end() || it->id != tower_id) {
    throw InputError("unknown tower " + tower_id);
  }
  return static_cast<std::size_t>(it - towers.begin());
}

HopGraph build_hop_graph(std::vector<Tower> towers, const TerrainGrid& terrain,
                         const LosParams& p) {
  p.validate();
  if (towers.empty()) throw InputError("empty tower inventory");
  std::sort(towers.begin(), towers.end(),
            [](const Tower& x, const Tower& y) { return x.id < y.id; });
  for (std::size_t i = 0; i + 1 < towers.size(); ++i) {
    if (towers[i].id == towers[i + 1].id) {
      throw InputError("duplicate tower id " + towers[i].id);
    }
  }
  for (const Tower& t : towers) {
    if (!(t.height_m > 0.0)) throw InputError("tower height must be positive: " + t.id);
    if (!terrain.contains(t.location)) throw InputError("tower outside terrain: " + t.id);
  }

  // Sweep in latitude order; a degree of latitude is at least 110.5 km.
  std::vector<std::size_t> by_lat(towers.size());
  std::iota(by_lat.begin(), by_lat.end(), 0);
  std::sort(by_lat.begin(), by_lat.end(), [&](std::size_t x, std::size_t y) {
    return towers[x].location.lat() < towers[y].location.lat();
  });
  const double lat_window = p.max_range_km / 110.5;

  HopGraph hg;
  for (std::size_t i = 0; i < by_lat.size(); ++i) {
    const Tower& ti = towers[by_lat[i]];
    for (std::size_t j = i + 1; j < by_lat.size(); ++j) {
      const Tower& tj = towers[by_lat[j]];
      if (tj.location.lat() - ti.location.lat() > lat_window) break;
      const double d = geodesic_km(ti.location, tj.location);
      if (d > p.max_range_km) continue;
      if (hop_feasible(ti, tj, terrain, p)) {
        const auto [lo, hi] = std::minmax(by_lat[i], by_lat[j]);
        hg.hops.push_back({lo, hi, d});
      }
    }
  }
  std::sort(hg.hops.begin(), hg.hops.end(), [](const Hop& x, const Hop& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  hg.towers = std::move(towers);
  return hg;
}

std::vector<Tower> cull_towers(std::span<const Tower> towers,
                               double min_height_m, double grid_cell_deg,
                               std::size_t max_per_cell, std::uint64_t seed) {
  if (max_per_cell == 0) throw InputError("max_per_cell must be positive");
  if (!(grid_cell_deg > 0.0)) throw InputError("grid_cell_deg must be positive");
  std::map<std::pair<long, long>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < towers.size(); ++i) {
    const Tower& t = towers[i];
    if (t.height_m < min_height_m) continue;
    const auto key = std::make_pair(
        static_cast<long>(std::floor(t.location.lat() / grid_cell_deg)),
        static_cast<long>(std::floor(t.location.lon() / grid_cell_deg)));
    cells[key].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> keep;
  for (auto& [key, members] : cells) {
    if (members.size() > max_per_cell) {
      // Partial Fisher-Yates: the first max_per_cell slots are the sample.
      for (std::size_t i = 0; i < max_per_cell; ++i) {
        const std::size_t j = i + rng.below(members.size() - i);
        std::swap(members[i], members[j]);
      }
      members.resize(max_per_cell);
    }
    keep.insert(keep.end(), members.begin(), members.end());
  }
  std::sort(keep.begin(), keep.end());
  std::vector<Tower> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(towers[i]);
  return out;
}

std::vector<Tower> read_towers_csv(const std::string& path,
                                   const TerrainGrid* terrain) {
  const CsvTable t = CsvTable::read_file(path);
  if (t.rows() == 0) throw InputError(path + ": no towers");
  std::vector<Tower> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Tower tw{t.text(r, "id"), GeoPoint(t.number(r, "lat"), t.number(r, "lon")),
             t.number(r, "height_m"), 0.0};
    if (!(tw.height_m > 0.0)) {
      throw InputError(path + ": non-positive height for tower " + tw.id);
    }
    if (!seen.insert(tw.id).second) {
      throw InputError(path + ": duplicate tower id " + tw.id);
    }
    if (auto g = t.optional_number(r, "ground_elevation_m")) {
      tw.ground_elevation_m = *g;
    } else if (terrain) {
      tw.ground_elevation_m = terrain->sample(tw.location);
    } else {
      throw InputError(path + ": tower " + tw.id +
                       " has no ground elevation and no terrain was given");
    }
    out.push_back(std::move(tw));
  }
  return out;
}

void write_towers_csv(std::ostream& out, std::span<const Tower> towers) {
  out << "id,lat,lon,height_m,ground_elevation_m\n";
  for (const Tower& t : towers) {
    out << t.id << ',' << format_double(t.location.lat()) << ','
        << format_double(t.location.lon()) << ',' << format_double(t.height_m)
        << ',' << format_double(t.ground_elevation_m) << '\n';
  }
}

void write_hops_csv(std::ostream& out, const HopGraph& hg) {
  out << "tower_a,tower_b,length_km\n";
  for (const Hop& h : hg.hops) {
    out << hg.towers[h.a].id << ',' << hg.towers[h.b].id << ','
        << format_double(h.length_km) << '\n';
  }
}

AccessGraph attach_sites(const HopGraph& hg, std::span<const Site> sites,
                         double attach_radius_km) {
  AccessGraph ag;
  ag.site_count = sites.size();
  ag.graph = WeightedGraph(sites.size() + hg.towers.size());
  for (std::size_t s = 0; s < sites.size(); ++s) {
    for (std::size_t t = 0; t < hg.towers.size(); ++t) {
      const double d = geodesic_km(sites[s].location, hg.towers[t].location);
      if (d <= attach_radius_km) {
        // A tower standing on the site still counts as a (tiny) edge.
        ag.graph.add_edge(s, ag.tower_node(t), std::max(d, 1e-6));
      }
    }
  }
  for (const Hop& h : hg.hops) {
    ag.graph.add_edge(ag.tower_node(h.a), ag.tower_node(h.b), h.length_km);
  }
  return ag;
}

Exclusions other_sites_excluded(const AccessGraph& access, std::size_t a,
                                std::size_t b) {
  Exclusions ex;
  ex.nodes.assign(access.graph.node_count(), false);
  for (std::size_t s = 0; s < access.site_count; ++s) {
    if (s != a && s != b) ex.nodes[s] = true;
  }
  return ex;
}

std::vector<MwLink> site_mw_links(const AccessGraph& access) {
  std::vector<MwLink> out;
  for (std::size_t a = 0; a < access.site_count; ++a) {
    for (std::size_t b = a + 1; b < access.site_count; ++b) {
      const Exclusions ex = other_sites_excluded(access, a, b);
      auto path = shortest_path(access.graph, a, b, &ex);
      if (!path) continue;
      MwLink link{a, b, path->total_weight, {}};
      for (std::size_t i = 1; i + 1 < path->nodes.size(); ++i) {
        link.towers.push_back(access.tower_index(path->nodes[i]));
      }
      out.push_back(std::move(link));
    }
  }
  return out;
}

}  // namespace hybridnet
