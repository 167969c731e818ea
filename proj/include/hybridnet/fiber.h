#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hybridnet/geo.h"
#include "hybridnet/graph.h"
#include "hybridnet/site.h"
#include "hybridnet/stats.h"
#include "hybridnet/traffic.h"

namespace hybridnet {

struct Conduit {
  std::size_t a;  // endpoint indices
  std::size_t b;
  double fiber_km;
};

// Fiber conduit map. A conduit shorter than the geodesic between its ends is
// kept but reported by short_conduits(); some source maps draw geodesics.
class FiberGraph {
 public:
  FiberGraph(std::vector<Site> endpoints, std::vector<Conduit> conduits);

  // Endpoints CSV id,lat,lon,population and conduits CSV
  // endpoint_a,endpoint_b,fiber_km.
  static FiberGraph read_csv(const std::string& endpoints_path,
                             const std::string& conduits_path);
  void write_conduits_csv(std::ostream& out) const;

  const std::vector<Site>& endpoints() const { return endpoints_; }
  const std::vector<Conduit>& conduits() const { return conduits_; }
  std::vector<std::size_t> short_conduits() const;
  double total_fiber_km() const;

  // Edge i of the result is conduit i.
  WeightedGraph graph() const;
  // Same endpoints, only the listed conduits (in that order).
  FiberGraph subgraph(std::span<const std::size_t> keep) const;

 private:
  std::vector<Site> endpoints_;
  std::vector<Conduit> conduits_;
};

struct FiberStretch {
  StretchStats stats;
  std::vector<double> per_pair;  // unordered site pairs (i < j), NaN if cut
  std::size_t disconnected_pairs = 0;
};

// Stretch of shortest fiber paths between every unordered pair of `sites`
// (endpoint indices): fiber km times the slowdown over geodesic km. With
// `weights` (a matrix over `sites` in the same order) pairs are weighted by
// h_ij + h_ji, otherwise uniformly. Disconnected pairs are counted and left
// out of the statistics.
FiberStretch fiber_stretch_stats(const FiberGraph& g,
                                 std::span<const std::size_t> sites,
                                 const TrafficMatrix* weights,
                                 const LatencyModel& model = {});

struct PruneStep {
  FiberGraph graph;
  StretchStats stats;
  std::size_t link_count;
  std::size_t removed;  // conduit index in the original graph; npos at step 0
};

// Greedy pruning. Each round tries every conduit whose removal keeps all
// sites mutually connected and removes the one with the smallest resulting
// mean stretch (lowest original index on ties). Entry 0 is the input.
std::vector<PruneStep> prune_links(const FiberGraph& g,
                                   std::span<const std::size_t> sites,
                                   const TrafficMatrix* weights,
                                   const LatencyModel& model = {});

inline constexpr double kWavelengthGbps[] = {1.0, 10.0, 40.0, 100.0};
inline constexpr int kMaxWavelengths = 2;
inline constexpr double kUtilizationFloor = 0.20;
inline constexpr double kUtilizationCeiling = 0.90;

struct WavelengthChoice {
  double capacity_gbps = 0.0;
  int count = 0;
  double utilization = 0.0;
  bool below_floor = false;
  bool above_ceiling = false;
  bool unprovisionable = false;  // demand beyond 2 x 100 Gbps
};

// Smallest capacity x count option (by total capacity) whose utilization
// lies in [0.20, 0.90]; otherwise the smallest one that carries the demand,
// flagged. Unprovisionable demand is priced at the largest option.
WavelengthChoice choose_wavelengths(double demand_gbps);

struct LinkProvision {
  std::size_t conduit;
  double demand_gbps;  // larger of the two directions
  WavelengthChoice choice;
};

struct WavelengthPlan {
  std::vector<LinkProvision> links;
  std::size_t sites = 0;  // endpoints touched by a conduit
  std::size_t unprovisionable = 0;
};

// Routes h_st * aggregate over shortest fiber paths and sizes every conduit.
WavelengthPlan provision_wavelengths(const FiberGraph& g,
                                     std::span<const std::size_t> sites,
                                     const TrafficMatrix& traffic,
                                     double aggregate_gbps);

struct LeaseCostModel {
  double price_per_gbps_km_month = 0.25;
  double equipment_per_site = 10000.0;
  double colo_per_site_month = 2000.0;
  double term_months = 60.0;
  void validate() const;
};

inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

struct LeaseCost {
  double bandwidth_per_month_usd = 0.0;
  double bandwidth_usd = 0.0;
  double site_usd = 0.0;
  double total_usd = 0.0;
  double dollars_per_gb = 0.0;
};

// Monthly wavelength price of one link.
double wavelength_price_per_month(double capacity_gbps, int count,
                                  double fiber_km, const LeaseCostModel& m);

LeaseCost lease_cost(const WavelengthPlan& plan, const FiberGraph& g,
                     const LeaseCostModel& model, double aggregate_gbps);

}  // namespace hybridnet
