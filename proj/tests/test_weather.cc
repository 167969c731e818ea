#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.h"
#include "hybridnet/error.h"
#include "hybridnet/rng.h"
#include "hybridnet/weather.h"
#include "oracles.h"

using namespace hybridnet;

namespace {

LinkHops straight(LinkKey k, double lat, std::vector<double> lons) {
  LinkHops h{k, std::to_string(k.a) + "-" + std::to_string(k.b), {}};
  for (double lon : lons) h.towers.emplace_back(lat, lon);
  return h;
}

std::vector<double> per_pair(const NetworkDesign& d) {
  std::vector<double> out;
  for (const auto& r : d.routes) out.push_back(r.stretch);
  return out;
}

}  // namespace

TEST_SUITE("weather") {
  TEST_CASE("power-law attenuation") {
    const AttenuationModel m;
    CHECK(rain_attenuation_db(10.0, 0.0, m) == 0.0);
    const double a = rain_attenuation_db(10.0, 25.0, m);
    CHECK(a == doctest::Approx(0.01217 * std::pow(25.0, 1.2571) * 10.0).epsilon(1e-14));
    CHECK(a == doctest::Approx(6.95).epsilon(0.002));
    CHECK(rain_attenuation_db(20.0, 25.0, m) == doctest::Approx(2 * a).epsilon(1e-14));
    for (double r = 0.0; r < 100.0; r += 7.3)
      CHECK(rain_attenuation_db(5.0, r + 1.0, m) > rain_attenuation_db(5.0, r, m));
    CHECK_THROWS_AS(rain_attenuation_db(-1.0, 1.0, m), InputError);
    CHECK_THROWS_AS(rain_attenuation_db(1.0, -1.0, m), InputError);
  }

  TEST_CASE("hop attenuation averages rain along the path") {
    const AttenuationModel m;
    const GeoPoint a(40.0, -100.0), b(40.0, -99.5);
    const Raster uniform = Raster::constant(39, -101, 41, -98, 0.05, 25.0);
    const double km = geodesic_km(a, b);
    CHECK(hop_attenuation_db(a, b, uniform, m) ==
          doctest::Approx(rain_attenuation_db(km, 25.0, m)).epsilon(1e-12));
    const Raster small = Raster::constant(39, -99.8, 41, -98, 0.05, 25.0);
    CHECK_THROWS_AS(hop_attenuation_db(a, b, small, m), InputError);
  }

  TEST_CASE("failure sets") {
    const AttenuationModel m;
    const std::vector<LinkHops> links{straight({0, 1}, 40.0, {-100.0, -99.5, -99.0}),
                                      straight({1, 2}, 41.0, {-100.0, -99.5, -99.0})};
    CHECK(failed_links(links, Raster::constant(39, -101, 42, -98, 0.05, 0.0), m).empty());
    CHECK(failed_links(links, Raster::constant(39, -101, 42, -98, 0.05, 500.0), m).size() == 2);

    // storm cell over the first hop of the southern link only
    Raster cell = Raster::constant(39, -101, 42, -98, 0.05, 0.0);
    for (std::size_t c = 0; c < cell.ncols(); ++c)
      for (std::size_t r = 0; r < cell.nrows(); ++r) {
        const GeoPoint p = cell.cell_center(c, r);
        if (std::abs(p.lat() - 40.0) < 0.2 && p.lon() > -100.1 && p.lon() < -99.6) cell.at(c, r) = 150.0;
      }
    CHECK(failed_links(links, cell, m) == std::vector<LinkKey>{{0, 1}});

    const std::map<std::string, double> per_link{{"1-2", 200.0}, {"0-1", 1.0}};
    CHECK(failed_links(links, per_link, m) == std::vector<LinkKey>{{1, 2}});
    CHECK(failed_links(links, std::map<std::string, double>{}, m).empty());
  }

  TEST_CASE("rerouting extremes and detours") {
    const DesignInput in = fixture::random_instance(6, 21, 40);
    const NetworkDesign fair = solve_heuristic(in);
    REQUIRE(fair.built.size() >= 1);
    const std::vector<std::string> ts{"2024-01-01T00:00", "2024-01-02T00:00"};
    const std::vector<std::vector<LinkKey>> fails{{}, fair.built};
    const WeatherReport rep = reroute_and_stats(in, fair, ts, fails);
    REQUIRE(rep.intervals.size() == 2);
    const NetworkDesign fiber_only = evaluate_design(in, {});
    CHECK(per_pair(rep.intervals[0].design) == per_pair(fair));
    CHECK(rep.intervals[0].design.stats.mean == fair.stats.mean);
    CHECK(per_pair(rep.intervals[1].design) == per_pair(fiber_only));
    CHECK(rep.intervals[1].design.stats.mean == fiber_only.stats.mean);
    for (std::size_t p = 0; p < fair.routes.size(); ++p) {
      CHECK(rep.pair_median[p] == fair.routes[p].stretch);
      CHECK(rep.pair_p99[p] == fiber_only.routes[p].stretch);
    }

    // single failed link against an independent shortest-path oracle
    const LinkKey lost = fair.built.front();
    std::vector<LinkKey> survive;
    for (LinkKey k : fair.built)
      if (!(k == lost)) survive.push_back(k);
    const auto one = reroute_and_stats(in, fair, std::vector<std::string>{"t"},
                                       std::vector<std::vector<LinkKey>>{{lost}});
    const auto d = oracle::hybrid_distances(in, survive);
    for (const auto& r : one.intervals[0].design.routes)
      CHECK(r.stretch == doctest::Approx(d[r.src][r.dst] / in.geodesic_km[r.src][r.dst]).epsilon(1e-12));
  }

  TEST_CASE("stretch is monotone under failure-set inclusion") {
    const DesignInput in = fixture::random_instance(10, 8, 90);
    const NetworkDesign fair = solve_heuristic(in);
    const NetworkDesign fiber_only = evaluate_design(in, {});
    REQUIRE(fair.built.size() >= 3);
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<LinkKey> small, big;
      for (LinkKey k : fair.built) {
        const double u = rng.uniform01();
        if (u < 0.3) small.push_back(k);
        if (u < 0.6) big.push_back(k);
      }
      const auto rep = reroute_and_stats(in, fair, std::vector<std::string>{"a", "b"},
                                         std::vector<std::vector<LinkKey>>{small, big});
      const auto& s = rep.intervals[0].design.routes;
      const auto& b = rep.intervals[1].design.routes;
      REQUIRE(s.size() == fair.routes.size());
      for (std::size_t p = 0; p < s.size(); ++p) {
        CHECK(s[p].stretch >= fair.routes[p].stretch);
        CHECK(b[p].stretch >= s[p].stretch);
        CHECK(b[p].stretch <= fiber_only.routes[p].stretch);
      }
    }
  }

  TEST_CASE("interval sampling") {
    std::vector<std::string> ts;
    for (int day = 1; day <= 5; ++day)
      for (int h = 0; h < 48; ++h) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "2024-03-%02dT%02d:%02d", day, h / 2, 30 * (h % 2));
        ts.push_back(buf);
      }
    ts.push_back("2024-03-06T00:00");
    const auto a = sample_intervals(ts, 1, 7);
    CHECK(a.size() == 6);
    CHECK(a == sample_intervals(ts, 1, 7));
    std::set<std::string> days;
    for (const auto& t : a) days.insert(t.substr(0, 10));
    CHECK(days.size() == 6);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(sample_intervals(ts, 3, 1).size() == 16);
    CHECK(sample_intervals(ts, 100, 1) == ts);
  }
}
