#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "hybridnet/designer.h"
#include "hybridnet/los.h"
#include "hybridnet/simnet.h"

namespace hybridnet {

// Absolute load on one site-site link of a design. Forward is a -> b.
struct LinkLoad {
  LinkKey link;
  Medium medium;
  double forward_gbps = 0.0;
  double reverse_gbps = 0.0;
  double peak_gbps() const { return forward_gbps > reverse_gbps ? forward_gbps : reverse_gbps; }
};

struct DemandRouting {
  std::vector<LinkLoad> mw;     // sorted by link
  std::vector<LinkLoad> fiber;  // sorted by link
  double injected_gbps = 0.0;   // sum of h_st * aggregate
};

// Places h_st * aggregate_gbps on every link of the routed s -> t path.
// Every built microwave link appears in `mw`, loaded or not.
DemandRouting route_demand(const NetworkDesign& design, const TrafficMatrix& h,
                           double aggregate_gbps);

// Smallest k >= 1 with k^2 * per_series_gbps >= demand_gbps.
int series_needed(double demand_gbps, double per_series_gbps = 1.0);

// Minimum lateral offset between parallel towers for the given angular
// separation.
double parallel_spacing_km(double hop_km, double separation_deg = 6.0);

struct LinkAugmentation {
  LinkKey link;
  double demand_gbps = 0.0;  // larger direction
  int series = 1;            // k
  // Tower series found in the inventory, primary first.
  std::vector<std::vector<std::size_t>> existing_series;
  int shortfall = 0;          // series that need new towers
  std::size_t hops_per_series = 0;  // of the primary series
  std::size_t new_towers = 0;
  std::size_t radio_hops = 0;  // tower-tower hops over all k series
};

struct AugmentationPlan {
  std::vector<LinkAugmentation> links;
  // Primary-series hops keyed by the number of new towers needed at each
  // end of the hop (0 = existing towers only).
  std::map<int, std::size_t> hops_by_category;
  std::size_t new_towers = 0;
  std::size_t existing_towers = 0;  // distinct inventory towers in use
};

// For each built microwave link with k > 1, looks for k - 1 further tower
// series between its sites that share no tower with the primary series or
// each other. Series that cannot be found are charged as new towers: one per
// tower of the primary series. `mw_links` supplies the primary series and
// must be indexed like the design's sites, as must `access`.
AugmentationPlan augment(const NetworkDesign& design, const DemandRouting& demand,
                         const AccessGraph& access,
                         std::span<const MwLink> mw_links,
                         double per_series_gbps = 1.0);

struct MwCostModel {
  double link_cost_1gbps = 150000.0;
  double link_cost_500mbps = 75000.0;
  double new_tower = 100000.0;
  double rent_per_tower_year = 37500.0;
  double term_years = 5.0;
  double per_series_capacity_gbps = 1.0;
  void validate() const;
};

struct MwCost {
  double capex_usd = 0.0;
  double rent_usd = 0.0;
  double total_usd = 0.0;
  double dollars_per_gb = 0.0;
};

// capex = radio hops (all series) * link price + new towers * tower price;
// rent over the term for every tower in use, existing or new.
MwCost mw_cost(const AugmentationPlan& plan, const MwCostModel& model,
               double aggregate_gbps);

// Packet-level topology of a design: every link that carries demand, with
// capacity equal to its larger directional load times `headroom`. Fiber
// lengths are converted back from latency-equivalent km.
SimTopology design_topology(const DesignInput& in, const DemandRouting& demand,
                            double headroom = 1.0, const LatencyModel& model = {});

}  // namespace hybridnet
