#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hybridnet/error.h"
#include "hybridnet/los.h"
#include "hybridnet/rng.h"

using namespace hybridnet;

namespace {

// Point at `km` east of (lat, lon) along the parallel, found by bisection on
// the geodesic so the test does not depend on a flat-earth approximation.
GeoPoint east_of(double lat, double lon, double km) {
  double lo = 0.0, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (geodesic_km(GeoPoint(lat, lon), GeoPoint(lat, lon + mid)) < km ? lo : hi) = mid;
  }
  return GeoPoint(lat, lon + 0.5 * (lo + hi));
}

Tower tower(const std::string& id, GeoPoint p, double h, double ground = 0.0) {
  return {id, p, h, ground};
}

}  // namespace

TEST_SUITE("los") {
  TEST_CASE("Fresnel radius and Earth bulge formulas") {
    CHECK(fresnel_radius_m(1, 1) == 8.7);
    CHECK(fresnel_radius_m(0, 11) == 0.0);
    CHECK(fresnel_radius_m(100, 11) == doctest::Approx(8.7 * 10.0 / std::sqrt(11.0)).epsilon(1e-12));
    CHECK(fresnel_radius_m(100, 11) == doctest::Approx(26.23).epsilon(1e-3));
    CHECK(earth_bulge_m(0.5, 0.5, 1.0) == doctest::Approx(0.25 / 12.74).epsilon(1e-12));
    CHECK(earth_bulge_m(0.5, 0.5, 1.0) >= 0.0195);
    CHECK(earth_bulge_m(0.5, 0.5, 1.0) <= 0.0200);
    CHECK(earth_bulge_m(0.0, 37.0, 1.3) == 0.0);
    CHECK(earth_bulge_m(50, 50, 1.3) == doctest::Approx(2500.0 / (12.74 * 1.3)).epsilon(1e-12));
    CHECK(earth_bulge_m(50, 50, 1.3) == doctest::Approx(150.9).epsilon(1e-3));
    // The point form reduces to the mid-hop form at the midpoint.
    CHECK(fresnel_radius_at_m(50, 50, 11) == doctest::Approx(fresnel_radius_m(100, 11)).epsilon(1e-12));
    CHECK_THROWS_AS(fresnel_radius_m(-1, 11), InputError);
    CHECK_THROWS_AS(earth_bulge_m(-1, 1, 1.3), InputError);
  }

  TEST_CASE("formulas are monotone and continuous at zero") {
    double prev_f = 0.0, prev_b = 0.0;
    for (double d = 1e-9; d < 200; d *= 1.5) {
      CHECK(fresnel_radius_m(d, 11) > prev_f);
      CHECK(earth_bulge_m(d / 2, d / 2, 1.3) > prev_b);
      prev_f = fresnel_radius_m(d, 11);
      prev_b = earth_bulge_m(d / 2, d / 2, 1.3);
    }
    CHECK(fresnel_radius_m(1e-12, 11) < 1e-5);
    CHECK(earth_bulge_m(1e-12, 1e-12, 1.3) < 1e-20);
  }

  TEST_CASE("hop feasibility examples") {
    const Raster flat = Raster::constant(39.5, -101, 40.5, -98, 0.005, 0.0);
    const GeoPoint a(40.0, -100.0);
    const GeoPoint b = east_of(40.0, -100.0, 10.0);
    const LosParams p;
    CHECK(hop_feasible(tower("a", a, 100), tower("b", b, 100), flat, p));

    Raster ridge = flat;
    const double mid_lon = 0.5 * (a.lon() + b.lon());
    for (std::size_t c = 0; c < ridge.ncols(); ++c)
      for (std::size_t r = 0; r < ridge.nrows(); ++r)
        if (std::abs(ridge.cell_center(c, r).lon() - mid_lon) < 0.01) ridge.at(c, r) = 200.0;
    CHECK_FALSE(hop_feasible(tower("a", a, 100), tower("b", b, 100), ridge, p));

    const GeoPoint far = east_of(40.0, -100.0, 101.0);
    CHECK_FALSE(hop_feasible(tower("a", a, 5000), tower("b", far, 5000), flat, p));

    const Tower outside = tower("x", GeoPoint(45, -100), 100);
    CHECK_THROWS_AS(hop_feasible(tower("a", a, 100), outside, flat, p), InputError);
  }

  TEST_CASE("feasibility is symmetric and monotone in the constraints") {
    Rng rng(5);
    std::vector<double> values(200 * 200);
    for (double& v : values) v = rng.uniform(0.0, 60.0);
    const Raster rough(-101.0, 39.0, 0.01, 200, 200, values);
    int feasible = 0, total = 0;
    for (int i = 0; i < 300; ++i) {
      const Tower x = tower("x", GeoPoint(rng.uniform(39.2, 40.8), rng.uniform(-100.8, -99.2)),
                            rng.uniform(30, 200), rng.uniform(0, 60));
      const Tower y = tower("y", GeoPoint(rng.uniform(39.2, 40.8), rng.uniform(-100.8, -99.2)),
                            rng.uniform(30, 200), rng.uniform(0, 60));
      LosParams p;
      p.sample_step_m = 200;
      const bool base = hop_feasible(x, y, rough, p);
      CHECK(base == hop_feasible(y, x, rough, p));
      ++total;
      feasible += base;
      LosParams lower = p;
      lower.usable_height_fraction = 0.7;
      LosParams shorter = p;
      shorter.max_range_km = 50;
      LosParams margin = p;
      margin.obstruction_margin_m = 10;
      if (!base) {
        CHECK_FALSE(hop_feasible(x, y, rough, lower));
        CHECK_FALSE(hop_feasible(x, y, rough, shorter));
        CHECK_FALSE(hop_feasible(x, y, rough, margin));
        Raster higher = rough;
        for (std::size_t c = 0; c < higher.ncols(); ++c)
          for (std::size_t r = 0; r < higher.nrows(); ++r) higher.at(c, r) += 5.0;
        CHECK_FALSE(hop_feasible(x, y, higher, p));
      }
    }
    // both outcomes are exercised
    CHECK(feasible > 0);
    CHECK(feasible < total);
  }

  TEST_CASE("hop graph on collinear towers") {
    const Raster flat = Raster::constant(39.5, -101, 40.5, -97, 0.01, 0.0);
    const GeoPoint t1(40.0, -100.0);
    const GeoPoint t2 = east_of(40.0, -100.0, 60.0);
    const GeoPoint t3 = east_of(40.0, t2.lon(), 60.0);
    LosParams p;
    p.sample_step_m = 300;
    const HopGraph one = build_hop_graph({tower("1", t1, 1000)}, flat, p);
    CHECK(one.hops.empty());
    const HopGraph hg = build_hop_graph(
        {tower("1", t1, 1000), tower("2", t2, 1000), tower("3", t3, 1000)}, flat, p);
    REQUIRE(hg.hops.size() == 2);
    CHECK(hg.towers[hg.hops[0].a].id == "1");
    CHECK(hg.towers[hg.hops[0].b].id == "2");
    CHECK(hg.towers[hg.hops[1].a].id == "2");
    CHECK(hg.towers[hg.hops[1].b].id == "3");
    CHECK_THROWS_AS(build_hop_graph({}, flat, p), InputError);
  }

  TEST_CASE("hop graph equals the pairwise check on 100 towers") {
    Rng rng(17);
    std::vector<double> values(120 * 120);
    for (double& v : values) v = rng.uniform(0.0, 80.0);
    const Raster terrain(-101.2, 38.8, 0.02, 120, 120, values);
    std::vector<Tower> towers;
    for (int i = 0; i < 100; ++i) {
      towers.push_back(tower("T" + std::to_string(1000 + i),
                             GeoPoint(39.0 + 0.2 * (i / 10) + rng.uniform(0, 0.05),
                                      -101.0 + 0.2 * (i % 10) + rng.uniform(0, 0.05)),
                             rng.uniform(40, 250), rng.uniform(0, 80)));
    }
    LosParams p;
    p.sample_step_m = 250;
    p.max_range_km = 60;
    const HopGraph hg = build_hop_graph(towers, terrain, p);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < towers.size(); ++i)
      for (std::size_t j = i + 1; j < towers.size(); ++j)
        brute += hop_feasible(towers[i], towers[j], terrain, p);
    CHECK(hg.hops.size() == brute);
    CHECK(brute > 0);
    const HopGraph again = build_hop_graph(towers, terrain, p);
    REQUIRE(again.hops.size() == hg.hops.size());
    for (std::size_t k = 0; k < hg.hops.size(); ++k) {
      CHECK(again.hops[k].a == hg.hops[k].a);
      CHECK(again.hops[k].b == hg.hops[k].b);
      CHECK(hg.hops[k].length_km <= p.max_range_km);
    }
  }

  TEST_CASE("culling") {
    std::vector<Tower> low;
    for (int i = 0; i < 5; ++i) low.push_back(tower("L" + std::to_string(i), GeoPoint(40, -100), 50));
    CHECK(cull_towers(low, 100, 0.5, 50, 1).empty());

    std::vector<Tower> ten;
    for (int i = 0; i < 10; ++i)
      ten.push_back(tower("T" + std::to_string(i), GeoPoint(40.1, -100.1 + 0.01 * i), 150));
    CHECK(cull_towers(ten, 100, 0.5, 50, 1).size() == 10);

    Rng rng(3);
    std::vector<Tower> many;
    for (int i = 0; i < 200; ++i)
      many.push_back(tower("M" + std::to_string(i),
                           GeoPoint(40.01 + rng.uniform(0, 0.45), -100.49 + rng.uniform(0, 0.45)), 150));
    const auto a = cull_towers(many, 100, 0.5, 50, 42);
    const auto b = cull_towers(many, 100, 0.5, 50, 42);
    const auto c = cull_towers(many, 100, 0.5, 50, 43);
    REQUIRE(a.size() == 50);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < 50; ++i) {
      same = same && a[i].id == b[i].id;
      differs = differs || a[i].id != c[i].id;
    }
    CHECK(same);
    CHECK(differs);
  }

  TEST_CASE("site links over an access graph") {
    const Raster flat = Raster::constant(39.5, -101, 40.5, -97, 0.01, 0.0);
    std::vector<Tower> towers;
    GeoPoint p(40.0, -100.0);
    for (int i = 0; i < 4; ++i) {
      towers.push_back(tower("T" + std::to_string(i), p, 800));
      p = east_of(40.0, p.lon(), 45.0);
    }
    LosParams lp;
    lp.sample_step_m = 300;
    const HopGraph hg = build_hop_graph(towers, flat, lp);
    const std::vector<Site> sites{{"A", GeoPoint(40.0, -100.0), 1},
                                  {"B", towers[3].location, 1}};
    const AccessGraph ag = attach_sites(hg, sites, 5.0);
    const auto links = site_mw_links(ag);
    REQUIRE(links.size() == 1);
    // T0 -> T3 is out of range; T1 and T2 both give a two-hop route.
    REQUIRE(links[0].tower_count() == 3);
    CHECK(hg.towers[links[0].towers[0]].id == "T0");
    const std::string mid = hg.towers[links[0].towers[1]].id;
    CHECK((mid == "T1" || mid == "T2"));
    CHECK(hg.towers[links[0].towers[2]].id == "T3");
  }

  TEST_CASE("tower CSV round trip and terrain fill-in") {
    const Raster hill = Raster::constant(39.0, -101, 41.0, -99, 0.1, 321.0);
    const std::string path = "los_towers_test.csv";
    {
      std::ofstream out(path);
      out << "id,lat,lon,height_m\nA,40,-100,120\nB,40.2,-100.1,90\n";
    }
    const auto ts = read_towers_csv(path, &hill);
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].ground_elevation_m == doctest::Approx(321.0));
    std::ostringstream os;
    write_towers_csv(os, ts);
    CHECK(os.str().find("A,40,-100,120,321") != std::string::npos);
    CHECK_THROWS_AS(read_towers_csv(path, nullptr), InputError);
    std::remove(path.c_str());
  }
}
