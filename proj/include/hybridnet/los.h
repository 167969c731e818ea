#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hybridnet/geo.h"
#include "hybridnet/graph.h"
#include "hybridnet/raster.h"
#include "hybridnet/site.h"

namespace hybridnet {

struct Tower {
  std::string id;
  GeoPoint location;
  double height_m = 0.0;
  double ground_elevation_m = 0.0;
};

struct LosParams {
  double f_ghz = 11.0;
  double k_factor = 1.3;
  double max_range_km = 100.0;
  double usable_height_fraction = 1.0;
  double obstruction_margin_m = 0.0;
  double sample_step_m = 30.0;

  void validate() const;
};

// First Fresnel zone radius at the middle of a hop of length d_km:
// 8.7 m * sqrt(d / 1 km) * (f / 1 GHz)^-1/2.
double fresnel_radius_m(double d_km, double f_ghz);

// Fresnel radius at a point d1_km from one end and d2_km from the other.
// Equals fresnel_radius_m(d1 + d2, f) at the midpoint and 0 at either end.
double fresnel_radius_at_m(double d1_km, double d2_km, double f_ghz);

// Effective Earth bulge under refraction factor K at a point splitting the
// hop into d1_km and d2_km: d1 * d2 / (12.74 K) meters.
double earth_bulge_m(double d1_km, double d2_km, double k_factor);

// Antenna altitude above sea level for the given parameters.
double antenna_altitude_m(const Tower& t, const LosParams& p);

// True iff the hop is within range and the straight line between antennas
// clears terrain + bulge + Fresnel radius + margin at every sample along
// the great circle. Symmetric in (a, b). Throws InputError when a tower is
// outside the terrain. Coincident towers are not a hop.
bool hop_feasible(const Tower& a, const Tower& b, const TerrainGrid& terrain,
                  const LosParams& p);

struct Hop {
  std::size_t a;  // tower index, a < b
  std::size_t b;
  double length_km;
};

// Towers sorted by id (node i of graph() is towers[i]) and their feasible
// line-of-sight hops.
struct HopGraph {
  std::vector<Tower> towers;
  std::vector<Hop> hops;

  WeightedGraph graph() const;
  std::size_t index_of(const std::string& tower_id) const;
};

// Throws InputError on an empty inventory or duplicate ids.
HopGraph build_hop_graph(std::vector<Tower> towers, const TerrainGrid& terrain,
                         const LosParams& p);

// Height filter (keeps height_m >= min_height_m), then at most max_per_cell
// towers per grid_cell_deg square, sampled uniformly without replacement.
// Deterministic for a given seed; survivors keep their input order.
std::vector<Tower> cull_towers(std::span<const Tower> towers,
                               double min_height_m, double grid_cell_deg,
                               std::size_t max_per_cell, std::uint64_t seed);

// CSV id,lat,lon,height_m[,ground_elevation_m]. Missing ground elevations are
// sampled from terrain when given, otherwise an InputError is raised.
std::vector<Tower> read_towers_csv(const std::string& path,
                                   const TerrainGrid* terrain);
void write_towers_csv(std::ostream& out, std::span<const Tower> towers);
// tower_a,tower_b,length_km
void write_hops_csv(std::ostream& out, const HopGraph& hg);

// Sites and towers in one graph. Nodes [0, site_count) are sites; node
// site_count + i is hg.towers[i]. Each site links to every tower within
// attach_radius_km, weighted by geodesic length.
struct AccessGraph {
  WeightedGraph graph;
  std::size_t site_count = 0;

  NodeId tower_node(std::size_t tower) const { return site_count + tower; }
  bool is_site(NodeId n) const { return n < site_count; }
  std::size_t tower_index(NodeId n) const { return n - site_count; }
};

AccessGraph attach_sites(const HopGraph& hg, std::span<const Site> sites,
                         double attach_radius_km);

// The shortest direct microwave connection between two sites: a chain of
// towers that passes through no other site.
struct MwLink {
  std::size_t site_a;
  std::size_t site_b;
  double length_km;
  std::vector<std::size_t> towers;  // tower indices from site_a to site_b

  std::size_t tower_count() const { return towers.size(); }
};

// Best direct link for every site pair that has one.
std::vector<MwLink> site_mw_links(const AccessGraph& access);

// Exclusions that keep a path between site a and b from crossing any other
// site.
Exclusions other_sites_excluded(const AccessGraph& access, std::size_t a,
                                std::size_t b);

}  // namespace hybridnet
