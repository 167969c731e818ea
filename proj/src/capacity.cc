#include "hybridnet/capacity.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "hybridnet/error.h"
#include "hybridnet/fiber.h"

namespace hybridnet {

DemandRouting route_demand(const NetworkDesign& design, const TrafficMatrix& h,
                           double aggregate_gbps) {
  if (!(aggregate_gbps >= 0.0)) throw InputError("aggregate rate must be non-negative");
  std::map<std::pair<Medium, LinkKey>, LinkLoad> acc;
  for (LinkKey k : design.built) acc[{Medium::kMicrowave, k}] = {k, Medium::kMicrowave};
  DemandRouting out;
  for (const RoutedPath& r : design.routes) {
    const double g = h(r.src, r.dst) * aggregate_gbps;
    out.injected_gbps += g;
    for (std::size_t i = 0; i < r.links.size(); ++i) {
      const LinkUse& u = r.links[i];
      LinkLoad& l = acc[{u.medium, u.link}];
      l.link = u.link;
      l.medium = u.medium;
      (r.sites[i] == u.link.a ? l.forward_gbps : l.reverse_gbps) += g;
    }
  }
  for (auto& [key, load] : acc) {
    (key.first == Medium::kMicrowave ? out.mw : out.fiber).push_back(load);
  }
  return out;
}

int series_needed(double demand_gbps, double per_series_gbps) {
  if (!(demand_gbps >= 0.0)) throw InputError("demand must be non-negative");
  if (!(per_series_gbps > 0.0)) throw InputError("series capacity must be positive");
  int k = std::max(1, static_cast<int>(std::ceil(std::sqrt(demand_gbps / per_series_gbps))));
  while (static_cast<double>(k) * k * per_series_gbps < demand_gbps) ++k;
  while (k > 1 && static_cast<double>(k - 1) * (k - 1) * per_series_gbps >= demand_gbps) --k;
  return k;
}

double parallel_spacing_km(double hop_km, double separation_deg) {
  if (!(hop_km > 0.0)) throw InputError("hop length must be positive");
  return hop_km * std::tan(separation_deg * std::numbers::pi / 180.0);
}

AugmentationPlan augment(const NetworkDesign& design, const DemandRouting& demand,
                         const AccessGraph& access,
                         std::span<const MwLink> mw_links,
                         double per_series_gbps) {
  std::map<LinkKey, const MwLink*> primary;
  for (const MwLink& l : mw_links) {
    const LinkKey k{std::min(l.site_a, l.site_b), std::max(l.site_a, l.site_b)};
    auto it = primary.find(k);
    if (it == primary.end() || l.length_km < it->second->length_km) primary[k] = &l;
  }
  std::map<LinkKey, double> peak;
  for (const LinkLoad& l : demand.mw) peak[l.link] = l.peak_gbps();

  AugmentationPlan plan;
  std::set<std::size_t> in_use;
  for (LinkKey k : design.built) {
    auto p = primary.find(k);
    if (p == primary.end()) throw InputError("no tower series for a built link");
    const MwLink& base = *p->second;
    LinkAugmentation a;
    a.link = k;
    a.demand_gbps = peak.count(k) ? peak[k] : 0.0;
    a.series = series_needed(a.demand_gbps, per_series_gbps);
    a.existing_series.push_back(base.towers);
    a.hops_per_series = base.towers.empty() ? 0 : base.towers.size() - 1;
    a.radio_hops = a.hops_per_series;
    if (a.series > 1) {
      Exclusions ex = other_sites_excluded(access, base.site_a, base.site_b);
      ex.nodes.resize(access.graph.node_count(), false);
      for (std::size_t t : base.towers) ex.nodes[access.tower_node(t)] = true;
      const auto more = tower_disjoint_paths(access.graph, base.site_a, base.site_b,
                                             static_cast<std::size_t>(a.series - 1), &ex);
      for (const Path& path : more) {
        std::vector<std::size_t> towers;
        for (NodeId n : path.nodes) {
          if (!access.is_site(n)) towers.push_back(access.tower_index(n));
        }
        a.radio_hops += towers.empty() ? 0 : towers.size() - 1;
        a.existing_series.push_back(std::move(towers));
      }
      a.shortfall = a.series - static_cast<int>(a.existing_series.size());
      a.new_towers = static_cast<std::size_t>(a.shortfall) * base.towers.size();
      a.radio_hops += static_cast<std::size_t>(a.shortfall) * a.hops_per_series;
    }
    for (const auto& s : a.existing_series) in_use.insert(s.begin(), s.end());
    plan.hops_by_category[a.shortfall] += a.hops_per_series;
    plan.new_towers += a.new_towers;
    plan.links.push_back(std::move(a));
  }
  plan.existing_towers = in_use.size();
  return plan;
}

void MwCostModel::validate() const {
  if (!(link_cost_1gbps >= 0.0) || !(link_cost_500mbps >= 0.0) || !(new_tower >= 0.0) ||
      !(rent_per_tower_year >= 0.0) || !(term_years >= 0.0)) {
    throw InputError("microwave cost parameters must be non-negative");
  }
  if (!(per_series_capacity_gbps > 0.0)) throw InputError("series capacity must be positive");
}

MwCost mw_cost(const AugmentationPlan& plan, const MwCostModel& model,
               double aggregate_gbps) {
  model.validate();
  MwCost c;
  std::size_t hops = 0;
  for (const LinkAugmentation& a : plan.links) hops += a.radio_hops;
  c.capex_usd = static_cast<double>(hops) * model.link_cost_1gbps +
                static_cast<double>(plan.new_towers) * model.new_tower;
  c.rent_usd = static_cast<double>(plan.existing_towers + plan.new_towers) *
               model.rent_per_tower_year * model.term_years;
  c.total_usd = c.capex_usd + c.rent_usd;
  const double gigabytes = aggregate_gbps / 8.0 * model.term_years * kSecondsPerYear;
  c.dollars_per_gb = gigabytes > 0.0 ? c.total_usd / gigabytes : 0.0;
  return c;
}

SimTopology design_topology(const DesignInput& in, const DemandRouting& demand,
                            double headroom, const LatencyModel& model) {
  if (!(headroom > 0.0)) throw InputError("headroom must be positive");
  SimTopology topo;
  for (const Site& s : in.sites) topo.nodes.push_back(s.id);
  auto add = [&](const LinkLoad& l) {
    if (!(l.peak_gbps() > 0.0)) return;
    const double km = l.medium == Medium::kMicrowave
                          ? *in.mw_km[l.link.a][l.link.b]
                          : *in.fiber_km[l.link.a][l.link.b] / model.fiber_slowdown;
    topo.links.push_back({l.link.a, l.link.b, km, l.medium, l.peak_gbps() * headroom});
  };
  for (const LinkLoad& l : demand.fiber) add(l);
  for (const LinkLoad& l : demand.mw) add(l);
  return topo;
}

}  // namespace hybridnet
