#include "hybridnet/json_io.h"

#include <fstream>
#include <set>

#include "hybridnet/error.h"

namespace hybridnet {
namespace {

Json opt_matrix(const OptMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(v ? Json(*v) : Json(nullptr));
    rows.push_back(r);
  }
  return rows;
}

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad field ") + key + ": " + e.what());
  }
}

OptMatrix read_opt_matrix(const Json& j, const char* key, std::size_t n) {
  const Json& rows = j.at(key);
  if (!rows.is_array() || rows.size() != n) throw InputError(std::string(key) + " must be n x n");
  OptMatrix m(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) {
      throw InputError(std::string(key) + " must be n x n");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!rows[i][k].is_null()) m[i][k] = rows[i][k].get<double>();
    }
  }
  return m;
}

Json point(const GeoPoint& p) { return Json::array({p.lon(), p.lat()}); }

}  // namespace

Json to_json(const DesignInput& in) {
  Json j;
  Json sites = Json::array();
  for (const Site& s : in.sites) {
    sites.push_back({{"id", s.id}, {"lat", s.location.lat()}, {"lon", s.location.lon()},
                     {"population", s.population}});
  }
  j["sites"] = sites;
  const std::size_t n = in.size();
  std::vector<double> h(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) h[s * n + t] = in.traffic(s, t);
  }
  j["traffic"] = h;
  j["geodesic_km"] = in.geodesic_km;
  j["mw_km"] = opt_matrix(in.mw_km);
  j["mw_cost"] = in.mw_cost;
  j["fiber_km"] = opt_matrix(in.fiber_km);
  j["budget"] = in.budget;
  return j;
}

DesignInput design_input_from_json(const Json& j) {
  DesignInput in;
  try {
    for (const Json& s : j.at("sites")) {
      in.sites.push_back({get<std::string>(s, "id"),
                          GeoPoint(get<double>(s, "lat"), get<double>(s, "lon")),
                          s.value("population", 1.0)});
    }
    const std::size_t n = in.sites.size();
    in.traffic = TrafficMatrix(ids_of(in.sites), get<std::vector<double>>(j, "traffic"));
    if (j.contains("geodesic_km")) {
      in.geodesic_km = get<Matrix>(j, "geodesic_km");
    } else {
      in.geodesic_km = geodesic_matrix(in.sites);
    }
    in.mw_km = read_opt_matrix(j, "mw_km", n);
    in.mw_cost = get<Matrix>(j, "mw_cost");
    in.fiber_km = read_opt_matrix(j, "fiber_km", n);
    in.budget = get<double>(j, "budget");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("design instance: ") + e.what());
  }
  in.validate();
  return in;
}

Json to_json(const StretchStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"p95", s.p95},
          {"weighting", to_string(s.weighting)}, {"pairs", s.pairs}};
}

Json to_json(const DesignInput& in, const NetworkDesign& d) {
  Json j;
  Json built = Json::array();
  for (LinkKey k : d.built) {
    built.push_back({{"a", in.sites[k.a].id}, {"b", in.sites[k.b].id},
                     {"km", *in.mw_km[k.a][k.b]}, {"towers", in.mw_cost[k.a][k.b]}});
  }
  j["built_links"] = built;
  Json pairs = Json::array();
  for (const RoutedPath& r : d.routes) {
    Json path = Json::array();
    for (std::size_t s : r.sites) path.push_back(in.sites[s].id);
    Json media = Json::array();
    for (const LinkUse& u : r.links) media.push_back(to_string(u.medium));
    pairs.push_back({{"src", in.sites[r.src].id}, {"dst", in.sites[r.dst].id},
                     {"stretch", r.stretch}, {"length_km", r.length_km},
                     {"path", path}, {"media", media}});
  }
  j["per_pair_stretch"] = pairs;
  j["stats"] = to_json(d.stats);
  j["towers_used"] = d.towers_used;
  j["objective"] = d.objective;
  return j;
}

std::vector<LinkKey> built_links_from_json(const DesignInput& in, const Json& j) {
  std::vector<LinkKey> out;
  for (const Json& l : j.at("built_links")) {
    const std::size_t a = find_site(in.sites, get<std::string>(l, "a"));
    const std::size_t b = find_site(in.sites, get<std::string>(l, "b"));
    out.push_back({std::min(a, b), std::max(a, b)});
  }
  return out;
}

Json design_geojson(const DesignInput& in, const NetworkDesign& d,
                    std::span<const LinkHops> hops) {
  std::set<std::pair<Medium, LinkKey>> used;
  for (const RoutedPath& r : d.routes) {
    for (const LinkUse& u : r.links) used.insert({u.medium, u.link});
  }
  for (LinkKey k : d.built) used.insert({Medium::kMicrowave, k});
  Json features = Json::array();
  for (const auto& [medium, k] : used) {
    Json coords = Json::array();
    coords.push_back(point(in.sites[k.a].location));
    if (medium == Medium::kMicrowave) {
      for (const LinkHops& h : hops) {
        if (h.link == k) {
          for (const GeoPoint& p : h.towers) coords.push_back(point(p));
        }
      }
    }
    coords.push_back(point(in.sites[k.b].location));
    const double km = medium == Medium::kMicrowave ? *in.mw_km[k.a][k.b] : *in.fiber_km[k.a][k.b];
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                        {"properties",
                         {{"medium", to_string(medium)}, {"a", in.sites[k.a].id},
                          {"b", in.sites[k.b].id}, {"latency_km", km}}}});
  }
  for (const Site& s : in.sites) {
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", point(s.location)}}},
                        {"properties", {{"site", s.id}, {"population", s.population}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

Json to_json(const SimTopology& t) {
  Json links = Json::array();
  for (const SimLink& l : t.links) {
    links.push_back({{"a", t.nodes[l.a]}, {"b", t.nodes[l.b]}, {"km", l.km},
                     {"medium", to_string(l.medium)}, {"capacity_gbps", l.capacity_gbps}});
  }
  return {{"nodes", t.nodes}, {"links", links}};
}

SimTopology sim_topology_from_json(const Json& j) {
  SimTopology t;
  try {
    t.nodes = get<std::vector<std::string>>(j, "nodes");
    auto index = [&](const std::string& id) {
      for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i] == id) return i;
      }
      throw InputError("unknown node " + id);
    };
    for (const Json& l : j.at("links")) {
      t.links.push_back({index(get<std::string>(l, "a")), index(get<std::string>(l, "b")),
                         get<double>(l, "km"), parse_medium(get<std::string>(l, "medium")),
                         get<double>(l, "capacity_gbps")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("topology: ") + e.what());
  }
  t.validate();
  return t;
}

Json to_json(const DesignInput& in, const AugmentationPlan& p, const MwCost& c) {
  Json links = Json::array();
  for (const LinkAugmentation& a : p.links) {
    links.push_back({{"a", in.sites[a.link.a].id}, {"b", in.sites[a.link.b].id},
                     {"demand_gbps", a.demand_gbps}, {"series", a.series},
                     {"existing_series", a.existing_series.size()},
                     {"shortfall", a.shortfall}, {"hops_per_series", a.hops_per_series},
                     {"radio_hops", a.radio_hops}, {"new_towers", a.new_towers}});
  }
  Json cats = Json::object();
  for (const auto& [k, v] : p.hops_by_category) cats[std::to_string(k)] = v;
  return {{"links", links},
          {"hops_by_new_towers_per_end", cats},
          {"new_towers", p.new_towers},
          {"existing_towers", p.existing_towers},
          {"cost",
           {{"capex_usd", c.capex_usd}, {"rent_usd", c.rent_usd},
            {"total_usd", c.total_usd}, {"dollars_per_gb", c.dollars_per_gb}}}};
}

Json to_json(const LeaseCost& c) {
  return {{"bandwidth_per_month_usd", c.bandwidth_per_month_usd},
          {"bandwidth_usd", c.bandwidth_usd},
          {"site_usd", c.site_usd},
          {"total_usd", c.total_usd},
          {"dollars_per_gb", c.dollars_per_gb}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace hybridnet
