#include "hybridnet/fiber.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "hybridnet/csv.h"
#include "hybridnet/error.h"

namespace hybridnet {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pair weights for unordered site pairs i < j, in row-major order.
std::vector<double> unordered_weights(std::size_t n, const TrafficMatrix* w) {
  if (w && w->size() != n) throw InputError("weight matrix size differs from site count");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(w ? w->pair_weight(i, j) : 1.0);
  }
  return out;
}

FiberStretch stretch_with(const FiberGraph& g, const WeightedGraph& wg,
                          std::span<const std::size_t> sites,
                          const std::vector<double>& pair_w, bool weighted,
                          const LatencyModel& model, const Exclusions* ex) {
  const auto& ends = g.endpoints();
  FiberStretch out;
  std::vector<double> vals, ws;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto dist = distances_from(wg, sites[i], ex);
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const double km = dist[sites[j]];
      const double d = geodesic_km(ends[sites[i]].location, ends[sites[j]].location);
      if (km == kUnreachable) {
        out.per_pair.push_back(kNaN);
        ++out.disconnected_pairs;
        continue;
      }
      if (!(d > 0.0)) throw InputError("sites " + ends[sites[i]].id + " and " +
                                       ends[sites[j]].id + " coincide");
      const double s = km / d * model.fiber_slowdown;
      out.per_pair.push_back(s);
      const double w = pair_w[out.per_pair.size() - 1];
      if (w > 0.0) {
        vals.push_back(s);
        ws.push_back(w);
      }
    }
  }
  if (!vals.empty()) {
    out.stats = summarize(vals, ws, weighted ? Weighting::kGravity : Weighting::kUniform);
  }
  return out;
}

// True when every pair connected in `before` is still connected in `after`.
bool keeps_connectivity(const FiberStretch& before, const FiberStretch& after) {
  for (std::size_t k = 0; k < before.per_pair.size(); ++k) {
    if (!std::isnan(before.per_pair[k]) && std::isnan(after.per_pair[k])) return false;
  }
  return true;
}

}  // namespace

FiberGraph::FiberGraph(std::vector<Site> endpoints, std::vector<Conduit> conduits)
    : endpoints_(std::move(endpoints)), conduits_(std::move(conduits)) {
  for (const Conduit& c : conduits_) {
    if (c.a >= endpoints_.size() || c.b >= endpoints_.size()) {
      throw InputError("conduit endpoint out of range");
    }
    if (c.a == c.b) throw InputError("conduit from " + endpoints_[c.a].id + " to itself");
    if (!(c.fiber_km > 0.0)) throw InputError("conduit length must be positive");
  }
}

FiberGraph FiberGraph::read_csv(const std::string& endpoints_path,
                                const std::string& conduits_path) {
  std::vector<Site> ends = read_sites_csv(endpoints_path);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ends.size(); ++i) index[ends[i].id] = i;
  const CsvTable t = CsvTable::read_file(conduits_path);
  std::vector<Conduit> cs;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto a = index.find(t.text(r, "endpoint_a"));
    auto b = index.find(t.text(r, "endpoint_b"));
    if (a == index.end() || b == index.end()) {
      throw InputError(conduits_path + ": unknown endpoint in row " + std::to_string(r + 1));
    }
    cs.push_back({a->second, b->second, t.number(r, "fiber_km")});
  }
  return FiberGraph(std::move(ends), std::move(cs));
}

void FiberGraph::write_conduits_csv(std::ostream& out) const {
  out << "endpoint_a,endpoint_b,fiber_km\n";
  for (const Conduit& c : conduits_) {
    out << endpoints_[c.a].id << ',' << endpoints_[c.b].id << ','
        << format_double(c.fiber_km) << '\n';
  }
}

std::vector<std::size_t> FiberGraph::short_conduits() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < conduits_.size(); ++i) {
    const Conduit& c = conduits_[i];
    if (c.fiber_km < geodesic_km(endpoints_[c.a].location, endpoints_[c.b].location)) {
      out.push_back(i);
    }
  }
  return out;
}

double FiberGraph::total_fiber_km() const {
  double s = 0.0;
  for (const Conduit& c : conduits_) s += c.fiber_km;
  return s;
}

WeightedGraph FiberGraph::graph() const {
  WeightedGraph g(endpoints_.size());
  for (const Conduit& c : conduits_) g.add_edge(c.a, c.b, c.fiber_km);
  return g;
}

FiberGraph FiberGraph::subgraph(std::span<const std::size_t> keep) const {
  std::vector<Conduit> cs;
  for (std::size_t k : keep) cs.push_back(conduits_.at(k));
  return FiberGraph(endpoints_, std::move(cs));
}

FiberStretch fiber_stretch_stats(const FiberGraph& g,
                                 std::span<const std::size_t> sites,
                                 const TrafficMatrix* weights,
                                 const LatencyModel& model) {
  model.validate();
  for (std::size_t s : sites) {
    if (s >= g.endpoints().size()) throw InputError("site index out of range");
  }
  const auto pw = unordered_weights(sites.size(), weights);
  FiberStretch out = stretch_with(g, g.graph(), sites, pw, weights != nullptr, model, nullptr);
  if (out.stats.pairs == 0) throw InfeasibleError("no connected site pair with weight");
  return out;
}

std::vector<PruneStep> prune_links(const FiberGraph& g,
                                   std::span<const std::size_t> sites,
                                   const TrafficMatrix* weights,
                                   const LatencyModel& model) {
  const auto pw = unordered_weights(sites.size(), weights);
  const bool weighted = weights != nullptr;
  const WeightedGraph wg = g.graph();
  Exclusions ex;
  ex.edges.assign(g.conduits().size(), false);

  FiberStretch current = fiber_stretch_stats(g, sites, weights, model);
  std::vector<std::size_t> kept(g.conduits().size());
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = i;

  std::vector<PruneStep> steps;
  steps.push_back({g, current.stats, kept.size(), static_cast<std::size_t>(-1)});
  while (true) {
    std::size_t best = kept.size();
    FiberStretch best_stretch;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      ex.edges[kept[k]] = true;
      FiberStretch trial = stretch_with(g, wg, sites, pw, weighted, model, &ex);
      ex.edges[kept[k]] = false;
      if (!keeps_connectivity(current, trial) || trial.stats.pairs == 0) continue;
      if (best == kept.size() || trial.stats.mean < best_stretch.stats.mean) {
        best = k;
        best_stretch = std::move(trial);
      }
    }
    if (best == kept.size()) break;
    const std::size_t removed = kept[best];
    ex.edges[removed] = true;
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(best));
    current = std::move(best_stretch);
    steps.push_back({g.subgraph(kept), current.stats, kept.size(), removed});
  }
  return steps;
}

WavelengthChoice choose_wavelengths(double demand_gbps) {
  if (!(demand_gbps >= 0.0)) throw InputError("negative link demand");
  struct Option { double cap; int count; };
  std::vector<Option> options;
  for (double c : kWavelengthGbps) {
    for (int n = 1; n <= kMaxWavelengths; ++n) options.push_back({c, n});
  }
  std::stable_sort(options.begin(), options.end(), [](const Option& x, const Option& y) {
    return x.cap * x.count < y.cap * y.count;
  });
  auto make = [&](const Option& o) {
    WavelengthChoice w;
    w.capacity_gbps = o.cap;
    w.count = o.count;
    w.utilization = demand_gbps / (o.cap * o.count);
    w.below_floor = w.utilization < kUtilizationFloor;
    w.above_ceiling = w.utilization > kUtilizationCeiling;
    return w;
  };
  for (const Option& o : options) {
    const double u = demand_gbps / (o.cap * o.count);
    if (u >= kUtilizationFloor && u <= kUtilizationCeiling) return make(o);
  }
  for (const Option& o : options) {
    if (demand_gbps <= o.cap * o.count) return make(o);
  }
  WavelengthChoice w = make(options.back());
  w.unprovisionable = true;
  return w;
}

WavelengthPlan provision_wavelengths(const FiberGraph& g,
                                     std::span<const std::size_t> sites,
                                     const TrafficMatrix& traffic,
                                     double aggregate_gbps) {
  if (!(aggregate_gbps > 0.0)) throw InputError("aggregate rate must be positive");
  if (traffic.size() != sites.size()) throw InputError("traffic matrix size differs from site count");
  const WeightedGraph wg = g.graph();
  const std::size_t m = g.conduits().size();
  std::vector<double> fwd(m, 0.0), rev(m, 0.0);
  for (std::size_t s = 0; s < sites.size(); ++s) {
    for (std::size_t t = 0; t < sites.size(); ++t) {
      const double h = traffic(s, t);
      if (s == t || h <= 0.0) continue;
      auto p = shortest_path(wg, sites[s], sites[t]);
      if (!p) {
        throw InfeasibleError("no fiber path between " + g.endpoints()[sites[s]].id +
                              " and " + g.endpoints()[sites[t]].id);
      }
      for (std::size_t k = 0; k < p->edges.size(); ++k) {
        const EdgeId e = p->edges[k];
        (p->nodes[k] == g.conduits()[e].a ? fwd : rev)[e] += h * aggregate_gbps;
      }
    }
  }
  WavelengthPlan plan;
  std::set<std::size_t> touched;
  for (std::size_t e = 0; e < m; ++e) {
    const double demand = std::max(fwd[e], rev[e]);
    LinkProvision lp{e, demand, choose_wavelengths(demand)};
    if (lp.choice.unprovisionable) ++plan.unprovisionable;
    plan.links.push_back(lp);
    touched.insert(g.conduits()[e].a);
    touched.insert(g.conduits()[e].b);
  }
  plan.sites = touched.size();
  return plan;
}

void LeaseCostModel::validate() const {
  if (!(price_per_gbps_km_month >= 0.0) || !(equipment_per_site >= 0.0) ||
      !(colo_per_site_month >= 0.0) || !(term_months >= 0.0)) {
    throw InputError("lease cost parameters must be non-negative");
  }
}

double wavelength_price_per_month(double capacity_gbps, int count,
                                  double fiber_km, const LeaseCostModel& m) {
  return capacity_gbps * count * fiber_km * m.price_per_gbps_km_month;
}

LeaseCost lease_cost(const WavelengthPlan& plan, const FiberGraph& g,
                     const LeaseCostModel& model, double aggregate_gbps) {
  model.validate();
  LeaseCost c;
  for (const LinkProvision& lp : plan.links) {
    c.bandwidth_per_month_usd +=
        wavelength_price_per_month(lp.choice.capacity_gbps, lp.choice.count,
                                   g.conduits().at(lp.conduit).fiber_km, model);
  }
  c.bandwidth_usd = c.bandwidth_per_month_usd * model.term_months;
  c.site_usd = static_cast<double>(plan.sites) *
               (model.equipment_per_site + model.colo_per_site_month * model.term_months);
  c.total_usd = c.bandwidth_usd + c.site_usd;
  const double seconds = model.term_months / 12.0 * kSecondsPerYear;
  const double gigabytes = aggregate_gbps / 8.0 * seconds;
  c.dollars_per_gb = gigabytes > 0.0 ? c.total_usd / gigabytes : 0.0;
  return c;
}

}  // namespace hybridnet
