// Command-line front end.
//
//   hybridnet <command> --config run.json [--out DIR] [--seed N]
//             [--budget B] [--aggregate-gbps G] [--set key.path=value ...]
//
// Paths in the config are relative to the config file. Every command writes
// effective_config.json into its output directory.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridnet/capacity.h"
#include "hybridnet/csv.h"
#include "hybridnet/designer.h"
#include "hybridnet/error.h"
#include "hybridnet/fiber.h"
#include "hybridnet/json_io.h"
#include "hybridnet/los.h"
#include "hybridnet/raster.h"
#include "hybridnet/simnet.h"
#include "hybridnet/site.h"
#include "hybridnet/traffic.h"
#include "hybridnet/weather.h"

using namespace hybridnet;
namespace fs = std::filesystem;

namespace {

Json default_config() {
  const LosParams los;
  const MwCostModel mw;
  const LeaseCostModel lease;
  const AttenuationModel att;
  const SimConfig sim;
  const HeuristicOptions heur;
  const LatencyModel lat;
  Json c;
  c["seed"] = 1;
  c["inputs"] = {{"sites", nullptr},           {"towers", nullptr},         {"terrain", nullptr},
                 {"fiber_endpoints", nullptr}, {"fiber_conduits", nullptr}, {"traffic", nullptr},
                 {"rain_index", nullptr},      {"rain_links", nullptr},     {"instance", nullptr},
                 {"topology", nullptr},        {"design", nullptr}};
  c["latency"] = {{"fiber_slowdown", lat.fiber_slowdown}, {"mw_slowdown", lat.mw_slowdown}};
  c["los"] = {{"f_ghz", los.f_ghz},
              {"k_factor", los.k_factor},
              {"max_range_km", los.max_range_km},
              {"usable_height_fraction", los.usable_height_fraction},
              {"obstruction_margin_m", los.obstruction_margin_m},
              {"sample_step_m", los.sample_step_m}};
  c["cull"] = {{"enabled", true}, {"min_height_m", 100.0}, {"grid_cell_deg", 0.5}, {"max_per_cell", 50}};
  c["attach_radius_km"] = 10.0;
  c["budget"] = 0.0;
  c["budgets"] = Json::array();
  c["aggregate_gbps"] = 100.0;
  c["heuristic"] = {{"inflation", heur.inflation},
                    {"exact_limit", heur.exact_limit},
                    {"max_swaps", heur.max_swaps},
                    {"per_cost_candidates", heur.per_cost_candidates}};
  c["mw_cost"] = {{"link_cost_1gbps", mw.link_cost_1gbps},
                  {"link_cost_500mbps", mw.link_cost_500mbps},
                  {"new_tower", mw.new_tower},
                  {"rent_per_tower_year", mw.rent_per_tower_year},
                  {"term_years", mw.term_years},
                  {"per_series_capacity_gbps", mw.per_series_capacity_gbps}};
  c["lease_cost"] = {{"price_per_gbps_km_month", lease.price_per_gbps_km_month},
                     {"equipment_per_site", lease.equipment_per_site},
                     {"colo_per_site_month", lease.colo_per_site_month},
                     {"term_months", lease.term_months}};
  c["attenuation"] = {{"k_coeff", att.k_coeff},
                      {"alpha", att.alpha},
                      {"fail_threshold_db", att.fail_threshold_db},
                      {"sample_step_km", att.sample_step_km}};
  c["weather"] = {{"intervals_per_day", 1}};
  c["simulate"] = {{"routing", "shortest_path"},
                   {"headroom", 1.0},
                   {"tolerance", 0.01},
                   {"loads", {0.7}},
                   {"gammas", {0.0}},
                   {"detail_load", 0.7},
                   {"packet_bytes", sim.packet_bytes},
                   {"sim_seconds", sim.sim_seconds},
                   {"queue_capacity_packets", sim.queue_capacity_packets},
                   {"warmup_fraction", sim.warmup_fraction}};
  return c;
}

// Merges `patch` into `base`, refusing keys the defaults do not know.
void merge(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw InputError("unknown config key " + path);
    Json& slot = base[key];
    if (slot.is_object() && value.is_object()) merge(slot, value, path);
    else slot = value;
  }
}

void apply_set(Json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InputError("--set expects key.path=value, got " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;  // bare strings
  }
  Json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = Json{{*it, patch}};
  merge(cfg, patch, "");
}

template <class T>
T get(const Json& cfg, const std::string& dotted) {
  const Json* node = &cfg;
  std::stringstream ss(dotted);
  for (std::string p; std::getline(ss, p, '.');) {
    if (!node->contains(p)) throw InputError("missing config key " + dotted);
    node = &node->at(p);
  }
  try {
    return node->get<T>();
  } catch (const Json::exception& e) {
    throw InputError("config key " + dotted + ": " + e.what());
  }
}

struct Context {
  Json cfg;
  fs::path base;
  fs::path out;
  std::uint64_t seed = 1;

  std::optional<fs::path> input(const std::string& key) const {
    const Json& v = cfg.at("inputs").at(key);
    if (v.is_null()) return std::nullopt;
    fs::path p = v.get<std::string>();
    return p.is_absolute() ? p : base / p;
  }
  fs::path require(const std::string& key) const {
    auto p = input(key);
    if (!p) throw InputError("config inputs." + key + " is required for this command");
    if (!fs::exists(*p)) throw InputError("input file not found: " + p->string());
    return *p;
  }
  LatencyModel latency() const {
    LatencyModel m;
    m.fiber_slowdown = get<double>(cfg, "latency.fiber_slowdown");
    m.mw_slowdown = get<double>(cfg, "latency.mw_slowdown");
    return m;
  }
  double budget() const { return get<double>(cfg, "budget"); }
  double aggregate() const { return get<double>(cfg, "aggregate_gbps"); }
};

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.out / name);
  if (!f) throw InputError("cannot write " + (ctx.out / name).string());
  return f;
}

LosParams los_params(const Json& c) {
  LosParams p;
  p.f_ghz = get<double>(c, "los.f_ghz");
  p.k_factor = get<double>(c, "los.k_factor");
  p.max_range_km = get<double>(c, "los.max_range_km");
  p.usable_height_fraction = get<double>(c, "los.usable_height_fraction");
  p.obstruction_margin_m = get<double>(c, "los.obstruction_margin_m");
  p.sample_step_m = get<double>(c, "los.sample_step_m");
  p.validate();
  return p;
}

MwCostModel mw_cost_model(const Json& c) {
  MwCostModel m;
  m.link_cost_1gbps = get<double>(c, "mw_cost.link_cost_1gbps");
  m.link_cost_500mbps = get<double>(c, "mw_cost.link_cost_500mbps");
  m.new_tower = get<double>(c, "mw_cost.new_tower");
  m.rent_per_tower_year = get<double>(c, "mw_cost.rent_per_tower_year");
  m.term_years = get<double>(c, "mw_cost.term_years");
  m.per_series_capacity_gbps = get<double>(c, "mw_cost.per_series_capacity_gbps");
  m.validate();
  return m;
}

LeaseCostModel lease_model(const Json& c) {
  LeaseCostModel m;
  m.price_per_gbps_km_month = get<double>(c, "lease_cost.price_per_gbps_km_month");
  m.equipment_per_site = get<double>(c, "lease_cost.equipment_per_site");
  m.colo_per_site_month = get<double>(c, "lease_cost.colo_per_site_month");
  m.term_months = get<double>(c, "lease_cost.term_months");
  m.validate();
  return m;
}

AttenuationModel attenuation_model(const Json& c) {
  AttenuationModel m;
  m.k_coeff = get<double>(c, "attenuation.k_coeff");
  m.alpha = get<double>(c, "attenuation.alpha");
  m.fail_threshold_db = get<double>(c, "attenuation.fail_threshold_db");
  m.sample_step_km = get<double>(c, "attenuation.sample_step_km");
  m.validate();
  return m;
}

HeuristicOptions heuristic_options(const Json& c) {
  HeuristicOptions o;
  o.inflation = get<double>(c, "heuristic.inflation");
  o.exact_limit = get<std::size_t>(c, "heuristic.exact_limit");
  o.max_swaps = get<std::size_t>(c, "heuristic.max_swaps");
  o.per_cost_candidates = get<bool>(c, "heuristic.per_cost_candidates");
  return o;
}

std::vector<Site> load_sites(const Context& ctx) {
  auto sites = read_sites_csv(ctx.require("sites").string());
  if (sites.size() < 2) throw InputError("at least two sites are needed");
  return sites;
}

TrafficMatrix load_traffic(const Context& ctx, std::span<const Site> sites) {
  if (auto p = ctx.input("traffic")) {
    const auto ids = ids_of(sites);
    return TrafficMatrix::read_csv(ctx.require("traffic").string(), ids);
  }
  return gravity_matrix(sites);
}

struct TowerPipeline {
  std::size_t towers_in = 0;
  HopGraph hops;
};

TowerPipeline load_hops(const Context& ctx) {
  const Raster terrain = Raster::read_esri_ascii_file(ctx.require("terrain").string());
  auto towers = read_towers_csv(ctx.require("towers").string(), &terrain);
  if (towers.empty()) throw InputError("tower file lists no towers");
  TowerPipeline tp;
  tp.towers_in = towers.size();
  if (get<bool>(ctx.cfg, "cull.enabled")) {
    towers = cull_towers(towers, get<double>(ctx.cfg, "cull.min_height_m"),
                         get<double>(ctx.cfg, "cull.grid_cell_deg"),
                         get<std::size_t>(ctx.cfg, "cull.max_per_cell"), ctx.seed);
    if (towers.empty()) throw InputError("no towers survive culling");
  }
  tp.hops = build_hop_graph(std::move(towers), terrain, los_params(ctx.cfg));
  return tp;
}

FiberGraph load_fiber(const Context& ctx) {
  return FiberGraph::read_csv(ctx.require("fiber_endpoints").string(),
                              ctx.require("fiber_conduits").string());
}

// Endpoint index of every site, matched by id.
std::vector<std::size_t> site_endpoints(const FiberGraph& g, std::span<const Site> sites) {
  std::vector<std::size_t> out;
  for (const Site& s : sites) {
    std::size_t found = g.endpoints().size();
    for (std::size_t i = 0; i < g.endpoints().size(); ++i)
      if (g.endpoints()[i].id == s.id) found = i;
    if (found == g.endpoints().size()) throw InputError("site " + s.id + " is not a fiber endpoint");
    out.push_back(found);
  }
  return out;
}

struct Pipeline {
  DesignInput in;
  std::optional<HopGraph> hops;
  std::optional<AccessGraph> access;
  std::vector<MwLink> mw_links;
};

Pipeline build_instance(const Context& ctx) {
  Pipeline p;
  if (auto inst = ctx.input("instance")) {
    p.in = design_input_from_json(read_json_file(ctx.require("instance").string()));
    p.in.budget = ctx.budget();
    p.in.validate(ctx.latency().fiber_slowdown);
    return p;
  }
  const auto sites = load_sites(ctx);
  const TrafficMatrix h = load_traffic(ctx, sites);
  p.hops = load_hops(ctx).hops;
  p.access = attach_sites(*p.hops, sites, get<double>(ctx.cfg, "attach_radius_km"));
  p.mw_links = site_mw_links(*p.access);
  const FiberGraph fg = load_fiber(ctx);
  const auto raw = all_pairs_site_paths(fg.graph(), site_endpoints(fg, sites));
  p.in = make_design_input(sites, h, p.mw_links, raw, ctx.budget(), ctx.latency());
  return p;
}

NetworkDesign solve(const Context& ctx, const DesignInput& in) {
  return solve_heuristic(in, heuristic_options(ctx.cfg));
}

std::string link_id(const DesignInput& in, LinkKey k) {
  return in.sites[k.a].id + "-" + in.sites[k.b].id;
}

std::string fd(double v) { return format_double(v); }

void write_pair_csv(std::ostream& out, const DesignInput& in, const NetworkDesign& d) {
  out << "src,dst,stretch,length_km,route\n";
  for (const RoutedPath& r : d.routes) {
    std::string route;
    for (std::size_t i = 0; i < r.sites.size(); ++i) {
      if (i) route += r.links[i - 1].medium == Medium::kMicrowave ? "~" : "=";
      route += in.sites[r.sites[i]].id;
    }
    out << in.sites[r.src].id << ',' << in.sites[r.dst].id << ',' << fd(r.stretch) << ','
        << fd(r.length_km) << ',' << route << '\n';
  }
}

// ---------------------------------------------------------------------------

int cmd_hopgraph(const Context& ctx) {
  const TowerPipeline tp = load_hops(ctx);
  {
    auto f = open_out(ctx, "towers_culled.csv");
    write_towers_csv(f, tp.hops.towers);
  }
  {
    auto f = open_out(ctx, "hops.csv");
    write_hops_csv(f, tp.hops);
  }
  const Json summary = {{"towers_in", tp.towers_in},
                        {"towers_kept", tp.hops.towers.size()},
                        {"hops", tp.hops.hops.size()}};
  write_json_file((ctx.out / "hopgraph_summary.json").string(), summary);
  std::cout << "towers " << tp.towers_in << " -> " << tp.hops.towers.size() << ", hops "
            << tp.hops.hops.size() << '\n';
  return 0;
}

int cmd_design(const Context& ctx) {
  const Pipeline p = build_instance(ctx);
  write_json_file((ctx.out / "instance.json").string(), to_json(p.in));

  std::vector<double> budgets = get<std::vector<double>>(ctx.cfg, "budgets");
  budgets.push_back(ctx.budget());
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  const auto ladder = solve_budget_ladder(p.in, budgets, heuristic_options(ctx.cfg));

  auto curve = open_out(ctx, "stretch_vs_budget.csv");
  curve << "budget,towers_used,links,mean_stretch,median_stretch,p95_stretch,objective\n";
  const NetworkDesign* chosen = nullptr;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const auto& d = ladder[i];
    curve << fd(budgets[i]) << ',' << fd(d.towers_used) << ',' << d.built.size() << ','
          << fd(d.stats.mean) << ',' << fd(d.stats.median) << ',' << fd(d.stats.p95) << ','
          << fd(d.objective) << '\n';
    if (budgets[i] == ctx.budget()) chosen = &d;
  }
  const NetworkDesign& d = *chosen;
  write_json_file((ctx.out / "design.json").string(), to_json(p.in, d));
  {
    auto f = open_out(ctx, "pair_stretch.csv");
    write_pair_csv(f, p.in, d);
  }
  std::vector<LinkHops> hops;
  if (p.hops) hops = link_hops(p.in, d, *p.hops, p.mw_links);
  write_json_file((ctx.out / "design.geojson").string(), design_geojson(p.in, d, hops));

  const auto reduced = eliminate_dominated(p.in);
  std::cout << p.in.size() << " sites, " << mw_options(p.in).size() << " microwave options ("
            << reduced.dominated.size() << " dominated); budget " << fd(ctx.budget()) << ": "
            << d.built.size() << " links, " << fd(d.towers_used) << " towers, mean stretch "
            << fd(d.stats.mean) << '\n';
  return 0;
}

int cmd_fiber(const Context& ctx) {
  const FiberGraph g = load_fiber(ctx);
  std::vector<Site> sites;
  if (ctx.input("sites")) {
    sites = load_sites(ctx);
  } else {
    for (const Site& s : g.endpoints())
      if (s.population > 0) sites.push_back(s);
  }
  const auto idx = site_endpoints(g, sites);
  const TrafficMatrix h = load_traffic(ctx, sites);
  const LatencyModel lat = ctx.latency();

  const auto uniform = fiber_stretch_stats(g, idx, nullptr, lat);
  const auto gravity = fiber_stretch_stats(g, idx, &h, lat);
  write_json_file((ctx.out / "fiber_stats.json").string(),
                  {{"uniform", to_json(uniform.stats)},
                   {"gravity", to_json(gravity.stats)},
                   {"disconnected_pairs", uniform.disconnected_pairs},
                   {"conduits", g.conduits().size()},
                   {"total_fiber_km", g.total_fiber_km()}});

  const auto steps = prune_links(g, idx, nullptr, lat);
  {
    auto f = open_out(ctx, "pruning.csv");
    f << "step,removed,links,total_fiber_km,mean_stretch,median_stretch,p95_stretch\n";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      std::string removed;
      if (steps[i].removed < g.conduits().size()) {
        const Conduit& c = g.conduits()[steps[i].removed];
        removed = g.endpoints()[c.a].id + "-" + g.endpoints()[c.b].id;
      }
      f << i << ',' << removed << ',' << steps[i].link_count << ',' << fd(steps[i].graph.total_fiber_km())
        << ',' << fd(steps[i].stats.mean) << ',' << fd(steps[i].stats.median) << ','
        << fd(steps[i].stats.p95) << '\n';
    }
  }

  const WavelengthPlan plan = provision_wavelengths(g, idx, h, ctx.aggregate());
  {
    auto f = open_out(ctx, "wavelengths.csv");
    f << "conduit,fiber_km,demand_gbps,wavelength_gbps,count,utilization,flag\n";
    for (const LinkProvision& l : plan.links) {
      const Conduit& c = g.conduits()[l.conduit];
      const char* flag = l.choice.unprovisionable ? "unprovisionable"
                         : l.choice.above_ceiling ? "above_ceiling"
                         : l.choice.below_floor   ? "below_floor"
                                                  : "";
      f << g.endpoints()[c.a].id << '-' << g.endpoints()[c.b].id << ',' << fd(c.fiber_km) << ','
        << fd(l.demand_gbps) << ',' << fd(l.choice.capacity_gbps) << ',' << l.choice.count << ','
        << fd(l.choice.utilization) << ',' << flag << '\n';
    }
  }
  const LeaseCost cost = lease_cost(plan, g, lease_model(ctx.cfg), ctx.aggregate());
  Json lj = to_json(cost);
  lj["unprovisionable_links"] = plan.unprovisionable;
  write_json_file((ctx.out / "lease.json").string(), lj);

  std::cout << "fiber median stretch " << fd(uniform.stats.median) << " (uniform), "
            << fd(gravity.stats.median) << " (gravity); pruning " << steps.size() - 1
            << " steps; lease $" << fd(cost.total_usd) << " ($" << fd(cost.dollars_per_gb) << "/GB)\n";
  return 0;
}

int cmd_augment(const Context& ctx) {
  const Pipeline p = build_instance(ctx);
  if (!p.access) throw InputError("augment needs the tower inputs, not a bare instance");
  const NetworkDesign d = solve(ctx, p.in);
  const auto demand = route_demand(d, p.in.traffic, ctx.aggregate());
  const MwCostModel model = mw_cost_model(ctx.cfg);
  const auto plan = augment(d, demand, *p.access, p.mw_links, model.per_series_capacity_gbps);
  const MwCost cost = mw_cost(plan, model, ctx.aggregate());
  write_json_file((ctx.out / "augment.json").string(), to_json(p.in, plan, cost));
  auto f = open_out(ctx, "augment_links.csv");
  f << "link,demand_gbps,series,existing_series,shortfall,hops_per_series,new_towers,radio_hops\n";
  for (const auto& a : plan.links)
    f << link_id(p.in, a.link) << ',' << fd(a.demand_gbps) << ',' << a.series << ','
      << a.existing_series.size() << ',' << a.shortfall << ',' << a.hops_per_series << ','
      << a.new_towers << ',' << a.radio_hops << '\n';
  std::cout << plan.links.size() << " microwave links, " << plan.new_towers << " new towers, $"
            << fd(cost.total_usd) << " total, $" << fd(cost.dollars_per_gb) << "/GB\n";
  return 0;
}

int cmd_weather(const Context& ctx) {
  const Pipeline p = build_instance(ctx);
  const NetworkDesign fair = solve(ctx, p.in);
  const AttenuationModel m = attenuation_model(ctx.cfg);
  const auto per_day = get<std::size_t>(ctx.cfg, "weather.intervals_per_day");

  std::vector<std::string> stamps;
  std::vector<std::vector<LinkKey>> failures;
  if (auto path = ctx.input("rain_links")) {
    // timestamp,link,rain_mm_h with link ids "<site_a>-<site_b>"
    const CsvTable t = CsvTable::read_file(ctx.require("rain_links").string());
    std::map<std::string, std::map<std::string, double>> by_time;
    for (std::size_t r = 0; r < t.rows(); ++r)
      by_time[t.text(r, "timestamp")][t.text(r, "link")] = t.number(r, "rain_mm_h");
    std::vector<std::string> all;
    for (const auto& [ts, _] : by_time) all.push_back(ts);
    std::vector<LinkHops> hops;
    if (p.hops) {
      hops = link_hops(p.in, fair, *p.hops, p.mw_links);
    } else {
      for (LinkKey k : fair.built)
        hops.push_back({k, link_id(p.in, k), {p.in.sites[k.a].location, p.in.sites[k.b].location}});
    }
    stamps = sample_intervals(all, per_day, ctx.seed);
    for (const auto& ts : stamps) failures.push_back(failed_links(hops, by_time[ts], m));
  } else {
    if (!p.hops) throw InputError("rain rasters need the tower inputs");
    const auto hops = link_hops(p.in, fair, *p.hops, p.mw_links);
    const fs::path index = ctx.require("rain_index");
    const CsvTable t = CsvTable::read_file(index.string());
    std::map<std::string, fs::path> files;
    std::vector<std::string> all;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      all.push_back(t.text(r, "timestamp"));
      files[all.back()] = index.parent_path() / t.text(r, "path");
    }
    stamps = sample_intervals(all, per_day, ctx.seed);
    for (const auto& ts : stamps)
      failures.push_back(failed_links(hops, Raster::read_esri_ascii_file(files[ts].string()), m));
  }

  const WeatherReport rep = reroute_and_stats(p.in, fair, stamps, failures);
  {
    auto f = open_out(ctx, "weather_intervals.csv");
    f << "timestamp,failed_links,mean_stretch,median_stretch,p95_stretch,failed\n";
    for (const auto& iv : rep.intervals) {
      std::string ids;
      for (LinkKey k : iv.failed) ids += (ids.empty() ? "" : ";") + link_id(p.in, k);
      f << iv.timestamp << ',' << iv.failed.size() << ',' << fd(iv.design.stats.mean) << ','
        << fd(iv.design.stats.median) << ',' << fd(iv.design.stats.p95) << ',' << ids << '\n';
    }
  }
  {
    auto f = open_out(ctx, "weather_pairs.csv");
    f << "src,dst,fair_stretch,median_stretch,p99_stretch\n";
    for (std::size_t i = 0; i < fair.routes.size(); ++i)
      f << p.in.sites[fair.routes[i].src].id << ',' << p.in.sites[fair.routes[i].dst].id << ','
        << fd(fair.routes[i].stretch) << ',' << fd(rep.pair_median[i]) << ',' << fd(rep.pair_p99[i])
        << '\n';
  }
  std::size_t impaired = 0;
  for (const auto& iv : rep.intervals) impaired += !iv.failed.empty();
  std::cout << rep.intervals.size() << " intervals, " << impaired << " with failed links\n";
  return 0;
}

int cmd_simulate(const Context& ctx) {
  SimTopology topo;
  std::vector<Site> sites;
  double aggregate = ctx.aggregate();
  if (auto tp = ctx.input("topology")) {
    topo = sim_topology_from_json(read_json_file(ctx.require("topology").string()));
    const auto all = load_sites(ctx);
    for (const auto& name : topo.nodes) {
      sites.push_back(all[find_site(all, name)]);
    }
  } else {
    const Pipeline p = build_instance(ctx);
    const NetworkDesign d = solve(ctx, p.in);
    const auto demand = route_demand(d, p.in.traffic, aggregate);
    topo = design_topology(p.in, demand, get<double>(ctx.cfg, "simulate.headroom"), ctx.latency());
    sites = p.in.sites;
  }
  write_json_file((ctx.out / "topology.json").string(), to_json(topo));

  SimConfig cfg;
  cfg.packet_bytes = get<double>(ctx.cfg, "simulate.packet_bytes");
  cfg.sim_seconds = get<double>(ctx.cfg, "simulate.sim_seconds");
  cfg.queue_capacity_packets = get<std::size_t>(ctx.cfg, "simulate.queue_capacity_packets");
  cfg.warmup_fraction = get<double>(ctx.cfg, "simulate.warmup_fraction");
  cfg.seed = ctx.seed;
  cfg.latency = ctx.latency();
  cfg.validate();
  const RoutingScheme scheme = parse_routing(get<std::string>(ctx.cfg, "simulate.routing"));
  const double tol = get<double>(ctx.cfg, "simulate.tolerance");

  const auto gammas = get<std::vector<double>>(ctx.cfg, "simulate.gammas");
  const auto loads = get<std::vector<double>>(ctx.cfg, "simulate.loads");
  const auto rows = perturbation_experiment(topo, sites, gammas, loads, aggregate, scheme, cfg);
  {
    auto f = open_out(ctx, "perturbation.csv");
    write_perturbation_csv(f, rows);
  }

  const double detail = get<double>(ctx.cfg, "simulate.detail_load");
  const TrafficMatrix h = gravity_matrix(sites);
  const auto demand = demand_gbps(h, detail * aggregate);
  const auto table = build_routing(topo, demand, scheme, tol, cfg.latency);
  const FlowStats stats = run(topo, demand, table, cfg);
  {
    auto f = open_out(ctx, "flows.csv");
    write_flow_csv(f, topo, stats);
  }
  {
    auto f = open_out(ctx, "link_util.csv");
    write_link_util_csv(f, topo, stats);
  }
  std::cout << topo.links.size() << " links; at load " << fd(detail) << ": mean delay "
            << fd(stats.mean_delay_ms) << " ms, loss " << fd(stats.loss_rate)
            << ", max utilization (routing) " << fd(table.max_utilization) << '\n';
  return 0;
}

int cmd_export_geojson(const Context& ctx, const std::string& design_path) {
  const Pipeline p = build_instance(ctx);
  fs::path dp = design_path;
  if (dp.empty()) {
    if (auto c = ctx.input("design")) dp = *c;
    else dp = ctx.out / "design.json";
  }
  if (!fs::exists(dp)) throw InputError("design file not found: " + dp.string());
  const auto built = built_links_from_json(p.in, read_json_file(dp.string()));
  if (total_cost(p.in, built) > p.in.budget) {
    std::cerr << "note: design uses more towers than the configured budget\n";
  }
  const NetworkDesign d = evaluate_design(p.in, built);
  std::vector<LinkHops> hops;
  if (p.hops) hops = link_hops(p.in, d, *p.hops, p.mw_links);
  write_json_file((ctx.out / "design.geojson").string(), design_geojson(p.in, d, hops));
  std::cout << "wrote " << (ctx.out / "design.geojson").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid fiber/microwave network design toolkit.\n"
               "Exit status: 0 success, 1 input or parse error, 2 infeasible instance "
               "(e.g. disconnected sites)."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out", design_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget, aggregate;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--budget", budget, "tower budget (overrides the config)");
  app.add_option("--aggregate-gbps", aggregate, "aggregate demand in Gbps (overrides the config)");
  app.add_option("--set", sets, "override any config key, e.g. --set los.k_factor=1.33");

  const std::map<std::string, std::string> commands{
      {"hopgraph", "feasible tower-tower hops"},
      {"design", "budgeted topology design and stretch-vs-budget curve"},
      {"fiber", "fiber stretch, link pruning and wavelength leasing cost"},
      {"augment", "parallel-series augmentation and microwave cost"},
      {"weather", "rain failures and rerouting"},
      {"simulate", "packet-level simulation of the designed network"},
      {"export-geojson", "GeoJSON of a design file"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) subs[name] = app.add_subcommand(name, help);
  subs["export-geojson"]->add_option("--design", design_path, "design JSON (default <out>/design.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    Context ctx;
    ctx.cfg = default_config();
    if (!config_path.empty()) {
      const fs::path cp = fs::absolute(config_path);
      merge(ctx.cfg, read_json_file(cp.string()), "");
      ctx.base = cp.parent_path();
    } else {
      ctx.base = fs::current_path();
    }
    for (const auto& s : sets) apply_set(ctx.cfg, s);
    if (seed) ctx.cfg["seed"] = *seed;
    if (budget) ctx.cfg["budget"] = *budget;
    if (aggregate) ctx.cfg["aggregate_gbps"] = *aggregate;
    ctx.seed = get<std::uint64_t>(ctx.cfg, "seed");
    if (ctx.budget() < 0) throw InputError("budget must be non-negative");
    if (!(ctx.aggregate() >= 0)) throw InputError("aggregate_gbps must be non-negative");

    ctx.out = out_dir;
    fs::create_directories(ctx.out);
    write_json_file((ctx.out / "effective_config.json").string(), ctx.cfg);

    std::string which;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) which = name;
    if (which == "hopgraph") return cmd_hopgraph(ctx);
    if (which == "design") return cmd_design(ctx);
    if (which == "fiber") return cmd_fiber(ctx);
    if (which == "augment") return cmd_augment(ctx);
    if (which == "weather") return cmd_weather(ctx);
    if (which == "simulate") return cmd_simulate(ctx);
    return cmd_export_geojson(ctx, design_path);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
