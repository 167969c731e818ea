// Writes the small synthetic demo dataset: ten north-eastern US cities,
// a smooth terrain grid with a ridge band, towers along city corridors plus
// scattered ones, a fiber conduit mesh, and a few days of storm rasters.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridnet/fiber.h"
#include "hybridnet/json_io.h"
#include "hybridnet/los.h"
#include "hybridnet/raster.h"
#include "hybridnet/rng.h"
#include "hybridnet/site.h"

using namespace hybridnet;
namespace fs = std::filesystem;

namespace {

constexpr double kLat0 = 38.4, kLat1 = 43.6, kLon0 = -82.4, kLon1 = -70.4;

const std::vector<Site> kCities{
    {"NYC", GeoPoint(40.7128, -74.0060), 8.34}, {"PHL", GeoPoint(39.9526, -75.1652), 1.60},
    {"BOS", GeoPoint(42.3601, -71.0589), 0.65}, {"WAS", GeoPoint(38.9072, -77.0369), 0.69},
    {"BAL", GeoPoint(39.2904, -76.6122), 0.58}, {"PIT", GeoPoint(40.4406, -79.9959), 0.30},
    {"BUF", GeoPoint(42.8864, -78.8784), 0.28}, {"ALB", GeoPoint(42.6526, -73.7562), 0.10},
    {"HFD", GeoPoint(41.7658, -72.6734), 0.12}, {"CLE", GeoPoint(41.4993, -81.6944), 0.37},
};

const std::vector<Site> kJunctions{
    {"J-SCR", GeoPoint(41.4090, -75.6624), 0}, {"J-HAR", GeoPoint(40.2732, -76.8867), 0},
    {"J-SYR", GeoPoint(43.0481, -76.1474), 0}, {"J-ERI", GeoPoint(42.1292, -80.0851), 0},
    {"J-PRV", GeoPoint(41.8240, -71.4128), 0}, {"J-ALN", GeoPoint(40.6023, -75.4714), 0},
};

const std::vector<std::pair<const char*, const char*>> kCorridors{
    {"NYC", "PHL"}, {"NYC", "BOS"}, {"NYC", "HFD"}, {"HFD", "BOS"}, {"NYC", "ALB"},
    {"ALB", "BUF"}, {"PHL", "BAL"}, {"BAL", "WAS"}, {"PHL", "PIT"}, {"PIT", "CLE"},
    {"CLE", "BUF"}, {"PIT", "WAS"}, {"ALB", "BOS"}, {"NYC", "PIT"},
};

const std::vector<std::pair<const char*, const char*>> kConduits{
    {"NYC", "PHL"}, {"PHL", "BAL"}, {"BAL", "WAS"}, {"NYC", "HFD"}, {"HFD", "J-PRV"},
    {"J-PRV", "BOS"}, {"HFD", "ALB"}, {"NYC", "ALB"}, {"ALB", "J-SYR"}, {"J-SYR", "BUF"},
    {"BUF", "J-ERI"}, {"J-ERI", "CLE"}, {"CLE", "PIT"}, {"PIT", "J-HAR"}, {"J-HAR", "PHL"},
    {"J-HAR", "BAL"}, {"NYC", "J-ALN"}, {"J-ALN", "J-HAR"}, {"J-ALN", "J-SCR"},
    {"J-SCR", "J-SYR"}, {"PIT", "WAS"}, {"BOS", "ALB"},
};

const Site& by_id(const std::vector<Site>& all, const std::string& id) {
  for (const Site& s : all)
    if (s.id == id) return s;
  throw std::runtime_error("unknown site " + id);
}

double terrain_at(double lat, double lon) {
  // rolling base plus a ridge band running south-west to north-east
  double h = 120.0 + 60.0 * std::sin(lat * 3.1) * std::cos(lon * 2.3) + 40.0 * std::sin(lon * 5.7 + lat);
  const double u = (lon + 78.5) * 0.62 - (lat - 40.0) * 0.78;  // signed offset from the ridge axis
  h += 520.0 * std::exp(-u * u / 0.35) * (0.75 + 0.25 * std::sin(lat * 9.0));
  // coastal plain
  if (lon > -75.5) h *= std::max(0.15, 1.0 - (lon + 75.5) * 0.25);
  return std::max(0.0, h);
}

Raster make_terrain(double cell) {
  const auto ncols = static_cast<std::size_t>(std::lround((kLon1 - kLon0) / cell));
  const auto nrows = static_cast<std::size_t>(std::lround((kLat1 - kLat0) / cell));
  Raster r(kLon0, kLat0, cell, ncols, nrows, std::vector<double>(ncols * nrows, 0.0));
  for (std::size_t c = 0; c < ncols; ++c)
    for (std::size_t row = 0; row < nrows; ++row) {
      const GeoPoint p = r.cell_center(c, row);
      r.at(c, row) = std::round(terrain_at(p.lat(), p.lon()));
    }
  return r;
}

GeoPoint offset(const GeoPoint& p, double north_km, double east_km) {
  const double dlat = north_km / 111.195;
  const double dlon = east_km / (111.195 * std::cos(p.lat() * std::numbers::pi / 180.0));
  return GeoPoint(p.lat() + dlat, p.lon() + dlon);
}

std::vector<Tower> make_towers(const Raster& terrain, Rng& rng) {
  std::vector<Tower> out;
  int next = 0;
  auto add = [&](GeoPoint p, double h) {
    char id[16];
    std::snprintf(id, sizeof id, "T%03d", next++);
    out.push_back({id, p, std::round(h), std::round(terrain.sample(p))});
  };
  for (const auto& [a, b] : kCorridors) {
    const GeoPoint pa = by_id(kCities, a).location, pb = by_id(kCities, b).location;
    const double km = geodesic_km(pa, pb);
    const int n = static_cast<int>(std::ceil(km / 42.0));
    for (int i = 0; i <= n; ++i) {
      GeoPoint p = interpolate(pa, pb, static_cast<double>(i) / n);
      p = offset(p, rng.uniform(-4, 4), rng.uniform(-4, 4));
      // skip duplicates near shared corridor ends
      bool near = false;
      for (const Tower& t : out) near = near || geodesic_km(t.location, p) < 6.0;
      if (!near) add(p, rng.uniform(70, 190));
    }
  }
  for (int i = 0; i < 40; ++i) {
    const GeoPoint p(rng.uniform(kLat0 + 0.3, kLat1 - 0.3), rng.uniform(kLon0 + 0.3, kLon1 - 0.3));
    add(p, rng.uniform(15, 160));  // some fall below the culling height
  }
  return out;
}

void write_rain(const fs::path& dir, Rng& rng) {
  fs::create_directories(dir);
  std::ofstream index(dir / "index.csv");
  index << "timestamp,path\n";
  const double cell = 0.1;
  const auto ncols = static_cast<std::size_t>(std::lround((kLon1 - kLon0) / cell));
  const auto nrows = static_cast<std::size_t>(std::lround((kLat1 - kLat0) / cell));
  struct Storm {
    double lat, lon, vlat, vlon, peak, radius_km;
  };
  std::vector<Storm> storms;
  for (int i = 0; i < 5; ++i)
    storms.push_back({rng.uniform(kLat0, kLat1), rng.uniform(kLon0, kLon1), rng.uniform(-0.05, 0.05),
                      rng.uniform(0.05, 0.2), rng.uniform(20, 140), rng.uniform(15, 60)});
  for (int day = 1; day <= 3; ++day)
    for (int hour = 0; hour < 24; hour += 3) {
      char ts[32], name[48];
      std::snprintf(ts, sizeof ts, "2024-07-%02dT%02d:00", day, hour);
      std::snprintf(name, sizeof name, "rain_2024-07-%02dT%02d.asc", day, hour);
      Raster r(kLon0, kLat0, cell, ncols, nrows, std::vector<double>(ncols * nrows, 0.0));
      const double step = (day - 1) * 8 + hour / 3;
      for (std::size_t c = 0; c < ncols; ++c)
        for (std::size_t row = 0; row < nrows; ++row) {
          const GeoPoint p = r.cell_center(c, row);
          double rain = 0.0;
          for (const Storm& s : storms) {
            const GeoPoint centre(std::clamp(s.lat + s.vlat * step, -89.0, 89.0), s.lon + s.vlon * step);
            const double d = geodesic_km(p, centre);
            // storms pulse over a day
            const double strength = 0.5 + 0.5 * std::sin(step * 0.7 + s.peak);
            rain += s.peak * strength * std::exp(-d * d / (2 * s.radius_km * s.radius_km));
          }
          r.at(c, row) = std::round(rain * 10.0) / 10.0;
        }
      std::ofstream out(dir / name);
      r.write_esri_ascii(out);
      index << ts << ',' << name << '\n';
    }
}

Json demo_config() {
  Json c;
  c["seed"] = 1;
  c["inputs"] = {{"sites", "sites.csv"},
                 {"towers", "towers.csv"},
                 {"terrain", "terrain.asc"},
                 {"fiber_endpoints", "fiber_endpoints.csv"},
                 {"fiber_conduits", "fiber_conduits.csv"},
                 {"rain_index", "rain/index.csv"}};
  c["cull"] = {{"min_height_m", 30.0}, {"grid_cell_deg", 0.25}, {"max_per_cell", 4}};
  c["attach_radius_km"] = 12.0;
  c["budgets"] = {0, 10, 20, 40, 60, 80, 100};
  c["budget"] = 60;
  c["aggregate_gbps"] = 20.0;
  c["weather"] = {{"intervals_per_day", 2}};
  c["simulate"] = {{"routing", "shortest_path"}, {"sim_seconds", 0.02},
                   {"loads", {0.5, 0.7, 1.2}}, {"gammas", {0.0, 0.1, 0.3, 0.5}}};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic demo dataset"};
  std::string out_dir = "data/demo";
  std::uint64_t seed = 1;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  const fs::path out(out_dir);
  fs::create_directories(out);
  Rng rng(seed);

  {
    std::ofstream f(out / "sites.csv");
    write_sites_csv(f, kCities);
  }
  const Raster terrain = make_terrain(0.025);
  {
    std::ofstream f(out / "terrain.asc");
    terrain.write_esri_ascii(f);
  }
  const auto towers = make_towers(terrain, rng);
  {
    std::ofstream f(out / "towers.csv");
    write_towers_csv(f, towers);
  }

  std::vector<Site> endpoints = kCities;
  endpoints.insert(endpoints.end(), kJunctions.begin(), kJunctions.end());
  {
    std::ofstream f(out / "fiber_endpoints.csv");
    write_sites_csv(f, endpoints);
  }
  std::vector<Conduit> conduits;
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < endpoints.size(); ++i)
      if (endpoints[i].id == id) return i;
    throw std::runtime_error("unknown endpoint " + id);
  };
  for (const auto& [a, b] : kConduits) {
    const std::size_t i = index_of(a), j = index_of(b);
    const double km = geodesic_km(endpoints[i].location, endpoints[j].location) * rng.uniform(1.1, 1.35);
    conduits.push_back({i, j, std::round(km * 10.0) / 10.0});
  }
  {
    std::ofstream f(out / "fiber_conduits.csv");
    FiberGraph(endpoints, conduits).write_conduits_csv(f);
  }
  write_rain(out / "rain", rng);
  write_json_file((out / "config.json").string(), demo_config());

  std::cout << "wrote " << towers.size() << " towers, " << conduits.size() << " conduits to " << out_dir
            << '\n';
  return 0;
}
