// End-to-end checks of the command-line tool. The binary, the demo dataset
// and the golden directory come from the environment (set by ctest).
// HYBRIDNET_UPDATE_GOLDEN=1 rewrites the golden files instead of comparing.

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hybridnet/csv.h"
#include "hybridnet/json_io.h"
#include "hybridnet/los.h"
#include "hybridnet/raster.h"
#include "hybridnet/rng.h"

using namespace hybridnet;
namespace fs = std::filesystem;

namespace {

std::string env(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE_MESSAGE(v != nullptr, name << " is not set");
  return v;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "hybridnet_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with `args`, stdout and stderr to <log>. Returns the exit code.
int run(const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + env("HYBRIDNET_CLI") + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Demo config with absolute input paths, patched by `patch`.
fs::path demo_config(const fs::path& dir, const Json& patch = Json::object()) {
  const fs::path demo = env("HYBRIDNET_DEMO");
  Json c = read_json_file((demo / "config.json").string());
  for (auto& [key, value] : c["inputs"].items())
    if (value.is_string()) value = (demo / value.get<std::string>()).string();
  c.merge_patch(patch);
  const fs::path p = dir / "config.json";
  write_json_file(p.string(), c);
  return p;
}

bool close(double a, double b) {
  return std::fabs(a - b) <= 1e-9 + 1e-6 * std::max(std::fabs(a), std::fabs(b));
}

bool as_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

void compare_json(const Json& got, const Json& want, const std::string& where) {
  if (want.is_number() && got.is_number()) {
    CHECK_MESSAGE(close(got.get<double>(), want.get<double>()), where << ": " << got << " vs " << want);
    return;
  }
  REQUIRE_MESSAGE(got.type() == want.type(), where << ": type differs");
  if (want.is_object()) {
    CHECK_MESSAGE(got.size() == want.size(), where << ": key count differs");
    for (const auto& [k, v] : want.items()) {
      REQUIRE_MESSAGE(got.contains(k), where << ": missing " << k);
      compare_json(got[k], v, where + "." + k);
    }
  } else if (want.is_array()) {
    REQUIRE_MESSAGE(got.size() == want.size(), where << ": length differs");
    for (std::size_t i = 0; i < want.size(); ++i) compare_json(got[i], want[i], where + "[" + std::to_string(i) + "]");
  } else {
    CHECK_MESSAGE(got == want, where << ": " << got << " vs " << want);
  }
}

void compare_csv(const std::string& got, const std::string& want, const std::string& name) {
  std::istringstream g(got), w(want);
  std::string gl, wl;
  std::size_t line = 0;
  while (std::getline(w, wl)) {
    ++line;
    REQUIRE_MESSAGE(std::getline(g, gl), name << ": output ends at line " << line);
    const auto gc = split_csv_line(gl), wc = split_csv_line(wl);
    REQUIRE_MESSAGE(gc.size() == wc.size(), name << ":" << line << ": column count differs");
    for (std::size_t i = 0; i < wc.size(); ++i) {
      double a = 0, b = 0;
      if (as_number(gc[i], a) && as_number(wc[i], b))
        CHECK_MESSAGE(close(a, b), name << ":" << line << " col " << i << ": " << gc[i] << " vs " << wc[i]);
      else
        CHECK_MESSAGE(gc[i] == wc[i], name << ":" << line << " col " << i << ": " << gc[i] << " vs " << wc[i]);
    }
  }
  CHECK_MESSAGE(!std::getline(g, gl), name << ": output has extra lines");
}

void check_golden(const fs::path& out, const std::vector<std::string>& files) {
  const fs::path golden = fs::path(env("HYBRIDNET_GOLDEN"));
  const bool update = std::getenv("HYBRIDNET_UPDATE_GOLDEN") != nullptr;
  for (const auto& f : files) {
    REQUIRE_MESSAGE(fs::exists(out / f), f << " was not written");
    if (update) {
      fs::create_directories(golden);
      fs::copy_file(out / f, golden / f, fs::copy_options::overwrite_existing);
      continue;
    }
    REQUIRE_MESSAGE(fs::exists(golden / f), "no golden file for " << f);
    if (fs::path(f).extension() == ".json")
      compare_json(read_json_file((out / f).string()), read_json_file((golden / f).string()), f);
    else
      compare_csv(slurp(out / f), slurp(golden / f), f);
  }
}

std::vector<Site> line_sites() {
  return {{"A", GeoPoint(40.0, -100.0), 1.0},
          {"B", GeoPoint(40.0, -99.0), 2.0},
          {"C", GeoPoint(40.5, -98.0), 1.0},
          {"D", GeoPoint(41.0, -99.5), 3.0}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and argument errors") {
    const fs::path dir = scratch("args");
    CHECK(run("--help", dir / "help.txt") == 0);
    const std::string help = slurp(dir / "help.txt");
    CHECK(help.find("Exit status") != std::string::npos);
    CHECK(help.find("infeasible") != std::string::npos);

    CHECK(run("", dir / "none.txt") == 1);
    CHECK(run("design --bogus-flag", dir / "flag.txt") == 1);
    CHECK(run("design --config \"" + (dir / "absent.json").string() + "\" --out \"" + dir.string() + "\"",
              dir / "absent.txt") == 1);
    const fs::path cfg = demo_config(dir);
    CHECK(run("design --config \"" + cfg.string() + "\" --set no_such.key=3 --out \"" + dir.string() + "\"",
              dir / "key.txt") == 1);
    CHECK(run("design --config \"" + cfg.string() + "\" --budget -5 --out \"" + dir.string() + "\"",
              dir / "neg.txt") == 1);
  }

  TEST_CASE("empty tower file is an input error") {
    const fs::path dir = scratch("empty_towers");
    {
      std::ofstream f(dir / "towers.csv");
      write_towers_csv(f, {});
    }
    const fs::path cfg = demo_config(dir, {{"inputs", {{"towers", (dir / "towers.csv").string()}}}});
    CHECK(run("hopgraph --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"",
              dir / "log.txt") == 1);
  }

  TEST_CASE("disconnected fiber is infeasible") {
    const fs::path dir = scratch("disconnected");
    const auto sites = line_sites();
    {
      std::ofstream f(dir / "endpoints.csv");
      write_sites_csv(f, sites);
      std::ofstream c(dir / "conduits.csv");
      c << "endpoint_a,endpoint_b,fiber_km\nA,B,100\nC,D,90\n";
    }
    const Json cfg_json = {{"inputs",
                            {{"fiber_endpoints", (dir / "endpoints.csv").string()},
                             {"fiber_conduits", (dir / "conduits.csv").string()}}}};
    const fs::path cfg = dir / "config.json";
    write_json_file(cfg.string(), cfg_json);
    CHECK(run("fiber --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"",
              dir / "log.txt") == 2);
    CHECK(slurp(dir / "log.txt").find("infeasible") != std::string::npos);
  }

  TEST_CASE("tree conduit graph has a one-row pruning curve") {
    const fs::path dir = scratch("tree");
    {
      std::ofstream f(dir / "endpoints.csv");
      write_sites_csv(f, line_sites());
      std::ofstream c(dir / "conduits.csv");
      c << "endpoint_a,endpoint_b,fiber_km\nA,B,100\nB,C,110\nB,D,130\n";
    }
    const fs::path cfg = dir / "config.json";
    write_json_file(cfg.string(), {{"inputs",
                                    {{"fiber_endpoints", (dir / "endpoints.csv").string()},
                                     {"fiber_conduits", (dir / "conduits.csv").string()}}}});
    REQUIRE(run("fiber --config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"",
                dir / "log.txt") == 0);
    const CsvTable t = CsvTable::read_file((dir / "out" / "pruning.csv").string());
    CHECK(t.rows() == 1);
    CHECK(t.number(0, "links") == 3);
  }

  TEST_CASE("hop graph matches the library and is reproducible") {
    const fs::path dir = scratch("hopgraph");
    const Raster terrain = Raster::constant(39.0, -101.0, 42.0, -97.0, 0.05, 200.0);
    {
      std::ofstream f(dir / "terrain.asc");
      terrain.write_esri_ascii(f);
    }
    Rng rng(5);
    std::vector<Tower> towers;
    for (int i = 0; i < 100; ++i)
      towers.push_back({"T" + std::to_string(i), GeoPoint(rng.uniform(39.5, 41.5), rng.uniform(-100.5, -97.5)),
                        std::round(rng.uniform(20, 200)), 200.0});
    {
      std::ofstream f(dir / "towers.csv");
      write_towers_csv(f, towers);
    }
    const Json inputs = {{"towers", (dir / "towers.csv").string()}, {"terrain", (dir / "terrain.asc").string()}};

    const fs::path cfg = dir / "config.json";
    write_json_file(cfg.string(), {{"inputs", inputs}, {"cull", {{"enabled", false}}}});
    REQUIRE(run("hopgraph --config \"" + cfg.string() + "\" --out \"" + (dir / "a").string() + "\"",
                dir / "a.txt") == 0);
    const HopGraph lib = build_hop_graph(towers, terrain, LosParams{});
    const CsvTable hops = CsvTable::read_file((dir / "a" / "hops.csv").string());
    CHECK(hops.rows() == lib.hops.size());
    const Json summary = read_json_file((dir / "a" / "hopgraph_summary.json").string());
    CHECK(summary["towers_kept"] == 100);
    CHECK(summary["hops"] == lib.hops.size());

    // culling draws from the seed
    const fs::path cull_cfg = dir / "cull.json";
    write_json_file(cull_cfg.string(),
                    {{"inputs", inputs}, {"cull", {{"min_height_m", 60.0}, {"grid_cell_deg", 1.0}, {"max_per_cell", 5}}}});
    for (const char* out : {"b", "c"})
      REQUIRE(run("hopgraph --config \"" + cull_cfg.string() + "\" --seed 9 --out \"" + (dir / out).string() + "\"",
                  dir / "log.txt") == 0);
    CHECK(slurp(dir / "b" / "hops.csv") == slurp(dir / "c" / "hops.csv"));
    CHECK(slurp(dir / "b" / "towers_culled.csv") == slurp(dir / "c" / "towers_culled.csv"));
    const auto kept = cull_towers(towers, 60.0, 1.0, 5, 9);
    CHECK(CsvTable::read_file((dir / "b" / "towers_culled.csv").string()).rows() == kept.size());
    CHECK(read_json_file((dir / "b" / "effective_config.json").string())["seed"] == 9);
  }

  TEST_CASE("budget zero is the fiber baseline and the ladder is monotone") {
    const fs::path dir = scratch("budget0");
    const fs::path cfg = demo_config(dir, {{"budgets", {0}}});
    REQUIRE(run("design --config \"" + cfg.string() + "\" --budget 0 --out \"" + (dir / "d").string() + "\"",
                dir / "d.txt") == 0);
    REQUIRE(run("fiber --config \"" + cfg.string() + "\" --out \"" + (dir / "f").string() + "\"", dir / "f.txt") == 0);
    const Json design = read_json_file((dir / "d" / "design.json").string());
    const Json fiber = read_json_file((dir / "f" / "fiber_stats.json").string());
    CHECK(design["built"].empty());
    const CsvTable curve0 = CsvTable::read_file((dir / "d" / "stretch_vs_budget.csv").string());
    REQUIRE(curve0.rows() == 1);
    CHECK(curve0.number(0, "mean_stretch") == doctest::Approx(fiber["gravity"]["mean"].get<double>()).epsilon(1e-12));
    CHECK(curve0.number(0, "median_stretch") == doctest::Approx(fiber["gravity"]["median"].get<double>()).epsilon(1e-12));

    REQUIRE(run("design --config \"" + demo_config(dir).string() + "\" --out \"" + (dir / "l").string() + "\"",
                dir / "l.txt") == 0);
    const CsvTable curve = CsvTable::read_file((dir / "l" / "stretch_vs_budget.csv").string());
    REQUIRE(curve.rows() >= 3);
    for (std::size_t r = 1; r < curve.rows(); ++r) {
      CHECK(curve.number(r, "budget") > curve.number(r - 1, "budget"));
      CHECK(curve.number(r, "mean_stretch") <= curve.number(r - 1, "mean_stretch"));
      CHECK(curve.number(r, "towers_used") <= curve.number(r, "budget"));
    }
  }

  TEST_CASE("weather extremes") {
    const fs::path dir = scratch("weather");
    const fs::path cfg0 = demo_config(dir);
    REQUIRE(run("design --config \"" + cfg0.string() + "\" --set budgets=[0] --budget 0 --out \"" +
                    (dir / "fiber").string() + "\"",
                dir / "b0.txt") == 0);
    const double fiber_mean =
        CsvTable::read_file((dir / "fiber" / "stretch_vs_budget.csv").string()).number(0, "mean_stretch");
    REQUIRE(run("design --config \"" + cfg0.string() + "\" --out \"" + (dir / "fair").string() + "\"",
                dir / "fair.txt") == 0);
    const double fair_mean = read_json_file((dir / "fair" / "design.json").string())["stats"]["mean"].get<double>();

    // one rain rate per site pair, both orientations, four intervals
    const Json sites = read_json_file((dir / "fair" / "instance.json").string())["sites"];
    auto write_rain = [&](const fs::path& p, double rate) {
      std::ofstream f(p);
      f << "timestamp,link,rain_mm_h\n";
      for (int t = 0; t < 4; ++t)
        for (const auto& a : sites)
          for (const auto& b : sites)
            if (a["id"] != b["id"])
              f << "2024-01-0" << t + 1 << "T00:00," << a["id"].get<std::string>() << '-'
                << b["id"].get<std::string>() << ',' << rate << '\n';
    };
    write_rain(dir / "dry.csv", 0.0);
    write_rain(dir / "wet.csv", 400.0);
    for (const auto& [name, mean] : {std::pair{"dry", fair_mean}, std::pair{"wet", fiber_mean}}) {
      const fs::path cfg = demo_config(dir, {{"inputs", {{"rain_links", (dir / (std::string(name) + ".csv")).string()}}}});
      const fs::path out = dir / name;
      REQUIRE(run("weather --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"", dir / "w.txt") == 0);
      const CsvTable t = CsvTable::read_file((out / "weather_intervals.csv").string());
      REQUIRE(t.rows() == 4);
      for (std::size_t r = 0; r < t.rows(); ++r) CHECK(t.number(r, "mean_stretch") == doctest::Approx(mean).epsilon(1e-12));
    }
  }

  TEST_CASE("simulation is reproducible for a seed") {
    const fs::path dir = scratch("simulate");
    const fs::path cfg = demo_config(dir, {{"simulate", {{"loads", {0.9}}, {"gammas", {0.2}}}}});
    for (const char* out : {"a", "b"})
      REQUIRE(run("simulate --config \"" + cfg.string() + "\" --seed 4 --out \"" + (dir / out).string() + "\"",
                  dir / "log.txt") == 0);
    for (const char* f : {"flows.csv", "link_util.csv", "perturbation.csv", "topology.json"})
      CHECK_MESSAGE(slurp(dir / "a" / f) == slurp(dir / "b" / f), f);
  }

  TEST_CASE("demo dataset matches the golden outputs") {
    const fs::path dir = scratch("golden");
    const fs::path demo = fs::path(env("HYBRIDNET_DEMO")) / "config.json";
    const std::string base = " --config \"" + demo.string() + "\" --out \"" + dir.string() + "\"";
    for (const char* cmd : {"hopgraph", "design", "fiber", "augment", "weather", "simulate"})
      REQUIRE_MESSAGE(run(std::string(cmd) + base, dir / "log.txt") == 0, cmd << ": " << slurp(dir / "log.txt"));
    REQUIRE(run("export-geojson" + base, dir / "log.txt") == 0);
    check_golden(dir, {"hopgraph_summary.json", "hops.csv", "stretch_vs_budget.csv", "design.json",
                       "pair_stretch.csv", "fiber_stats.json", "pruning.csv", "wavelengths.csv", "lease.json",
                       "augment.json", "augment_links.csv", "weather_intervals.csv", "weather_pairs.csv",
                       "perturbation.csv", "link_util.csv"});
    const Json geo = read_json_file((dir / "design.geojson").string());
    CHECK(geo["type"] == "FeatureCollection");
  }
}
