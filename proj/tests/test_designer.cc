#include <doctest.h>

#include <cmath>

#include "fixtures.h"
#include "hybridnet/designer.h"
#include "hybridnet/error.h"
#include "oracles.h"

using namespace hybridnet;

namespace {

// Three sites on a line-ish layout with hand-picked lengths.
DesignInput tiny(double budget) {
  DesignInput in;
  in.sites = {{"a", GeoPoint(40, -100), 1}, {"b", GeoPoint(40, -95), 2}, {"c", GeoPoint(42, -90), 3}};
  in.traffic = gravity_matrix(in.sites);
  in.geodesic_km = geodesic_matrix(in.sites);
  const std::size_t n = 3;
  in.mw_km.assign(n, std::vector<std::optional<double>>(n));
  in.mw_cost.assign(n, std::vector<double>(n, 0));
  in.fiber_km.assign(n, std::vector<std::optional<double>>(n));
  auto set = [&](std::size_t i, std::size_t j, double mw_f, double cost, double fib_f) {
    const double d = in.geodesic_km[i][j];
    if (mw_f > 0) {
      in.mw_km[i][j] = in.mw_km[j][i] = d * mw_f;
      in.mw_cost[i][j] = in.mw_cost[j][i] = cost;
    }
    in.fiber_km[i][j] = in.fiber_km[j][i] = d * fib_f;
  };
  set(0, 1, 1.02, 6, 1.5 * 1.3);
  set(1, 2, 1.05, 7, 1.5 * 1.2);
  set(0, 2, 1.01, 12, 1.5 * 1.4);
  in.budget = budget;
  in.validate();
  return in;
}

double hand_objective(const DesignInput& in, const std::vector<LinkKey>& built) {
  const auto d = oracle::hybrid_distances(in, built);
  double sum = 0;
  for (std::size_t s = 0; s < in.size(); ++s)
    for (std::size_t t = 0; t < in.size(); ++t)
      if (s != t) sum += in.traffic(s, t) / in.geodesic_km[s][t] * d[s][t];
  return sum;
}

}  // namespace

TEST_SUITE("designer") {
  TEST_CASE("objective special cases") {
    // every pair on a geodesic microwave link: stretch 1 everywhere
    DesignInput in = tiny(1000);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) {
          in.mw_km[i][j] = in.geodesic_km[i][j];
          in.fiber_km[i][j] = 1.5 * in.geodesic_km[i][j];
        }
    const auto all = evaluate_design(in, mw_options(in));
    CHECK(all.objective == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(all.stats.mean == doctest::Approx(1.0).epsilon(1e-14));
    const auto none = evaluate_design(in, {});
    CHECK(none.objective == doctest::Approx(1.5).epsilon(1e-14));
  }

  TEST_CASE("three-site objective equals the hand sum") {
    const DesignInput in = tiny(100);
    for (const auto& built : std::vector<std::vector<LinkKey>>{{}, {{0, 1}}, {{1, 2}}, {{0, 1}, {1, 2}},
                                                               {{0, 2}}, {{0, 1}, {0, 2}, {1, 2}}}) {
      const auto d = evaluate_design(in, built);
      CHECK(d.objective == doctest::Approx(hand_objective(in, built)).epsilon(1e-13));
      // objective / sum(h) is the traffic-weighted mean stretch
      CHECK(d.objective == doctest::Approx(d.stats.mean).epsilon(1e-13));
    }
  }

  TEST_CASE("dominance elimination") {
    DesignInput in = tiny(100);
    in.mw_km[0][1] = in.mw_km[1][0] = 2.0 * *in.fiber_km[0][1];
    const auto r = eliminate_dominated(in);
    CHECK(r.dominated == std::vector<LinkKey>{{0, 1}});
    CHECK(r.flow_variables_kept <= r.flow_variables_total);
    // a dominated link never carries flow, even when built
    const auto d = evaluate_design(in, mw_options(in));
    for (const auto& route : d.routes)
      for (const auto& u : route.links)
        CHECK_FALSE((u.medium == Medium::kMicrowave && u.link == LinkKey{0, 1}));

    const DesignInput clean = tiny(100);
    CHECK(eliminate_dominated(clean).dominated.empty());
  }

  TEST_CASE("dominance elimination keeps the exhaustive optimum") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      DesignInput in = fixture::random_instance(6, seed, 40);
      // make some options dominated
      for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a + 1; b < 6; ++b)
          if (in.mw_km[a][b] && (a + b + seed) % 3 == 0)
            in.mw_km[a][b] = in.mw_km[b][a] = *in.fiber_km[a][b] * 1.2;
      const auto full = oracle::exhaustive_design(in, oracle::all_options(in));
      const auto reduced = oracle::exhaustive_design(in, eliminate_dominated(in).links);
      CHECK(reduced.mean_stretch == doctest::Approx(full.mean_stretch).epsilon(1e-12));
    }
  }

  TEST_CASE("greedy candidates") {
    const DesignInput zero = tiny(0);
    CHECK(greedy_candidates(zero).empty());

    DesignInput two;
    two.sites = {{"x", GeoPoint(40, -100), 1}, {"y", GeoPoint(41, -95), 1}};
    two.traffic = gravity_matrix(two.sites);
    two.geodesic_km = geodesic_matrix(two.sites);
    const double d = two.geodesic_km[0][1];
    two.mw_km = {{std::nullopt, d * 1.02}, {d * 1.02, std::nullopt}};
    two.mw_cost = {{0, 5}, {5, 0}};
    two.fiber_km = {{std::nullopt, d * 1.8}, {d * 1.8, std::nullopt}};
    two.budget = 3;  // 2B = 6 > 5
    CHECK(greedy_candidates(two) == std::vector<LinkKey>{{0, 1}});
    CHECK_THROWS_AS(greedy_candidates(two, 0.5), InputError);

    // every addition fits the inflated budget and strictly helps
    const DesignInput in = fixture::random_instance(10, 3, 60);
    const auto cands = greedy_candidates(in, 2.0);
    REQUIRE_FALSE(cands.empty());
    CHECK(total_cost(in, cands) <= 2.0 * in.budget);
    std::vector<LinkKey> prefix;
    double prev = oracle::mean_stretch(in, prefix);
    for (LinkKey k : cands) {
      prefix.push_back(k);
      const double now = oracle::mean_stretch(in, prefix);
      CHECK(now < prev);
      prev = now;
    }

    // The candidate set is a pruning heuristic with no inclusion guarantee;
    // on this pinned instance it does contain the exhaustive optimum.
    const DesignInput pinned = fixture::random_instance(8, 1, 40);
    const auto pc = greedy_candidates(pinned, 2.0);
    const auto best = oracle::exhaustive_design(pinned, oracle::all_options(pinned));
    REQUIRE_FALSE(best.links.empty());
    for (LinkKey k : best.links) CHECK(std::find(pc.begin(), pc.end(), k) != pc.end());
  }

  TEST_CASE("exact search") {
    const DesignInput in = tiny(6);
    const auto none = solve_exact(in, {});
    CHECK(none.built.empty());
    CHECK(none.stats.mean == evaluate_design(in, {}).stats.mean);

    // budget fits only one of (0,1) cost 6 and (1,2) cost 7
    const std::vector<LinkKey> two{{0, 1}, {1, 2}};
    DesignInput one = tiny(7);
    const auto pick = solve_exact(one, two);
    REQUIRE(pick.built.size() == 1);
    const double o01 = evaluate_design(one, std::vector<LinkKey>{{0, 1}}).objective;
    const double o12 = evaluate_design(one, std::vector<LinkKey>{{1, 2}}).objective;
    CHECK(pick.built[0] == (o01 <= o12 ? LinkKey{0, 1} : LinkKey{1, 2}));

    for (std::uint64_t seed = 10; seed < 16; ++seed) {
      const DesignInput r = fixture::random_instance(6, seed, 35);
      const auto opts = oracle::all_options(r);
      const auto bb = solve_exact(r, opts);
      const auto ex = oracle::exhaustive_design(r, opts);
      CHECK(bb.stats.mean == doctest::Approx(ex.mean_stretch).epsilon(1e-12));
      CHECK(total_cost(r, bb.built) <= r.budget);
    }
    std::vector<LinkKey> many(26, LinkKey{0, 1});
    CHECK_THROWS_AS(solve_exact(in, many), SearchTooLarge);
  }

  TEST_CASE("heuristic extremes") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      DesignInput in = fixture::random_instance(7, seed, 0);
      const auto zero = solve_heuristic(in);
      CHECK(zero.built.empty());
      CHECK(zero.stats.mean == evaluate_design(in, {}).stats.mean);

      in.budget = 1e9;
      const auto all = solve_heuristic(in);
      const auto d = oracle::hybrid_distances(in, oracle::all_options(in));
      for (const auto& r : all.routes)
        CHECK(r.length_km == doctest::Approx(d[r.src][r.dst]).epsilon(1e-12));
    }
  }

  TEST_CASE("heuristic is near the exhaustive optimum and within budget") {
    for (std::uint64_t seed = 100; seed < 106; ++seed) {
      const DesignInput in = fixture::random_instance(8, seed, 50);
      const auto h = solve_heuristic(in);
      const auto ex = oracle::exhaustive_design(in, oracle::all_options(in));
      CHECK(total_cost(in, h.built) <= in.budget);
      CHECK(h.stats.mean <= ex.mean_stretch + 0.01);
      CHECK(h.stats.mean >= ex.mean_stretch - 1e-12);
    }
  }

  TEST_CASE("budget ladder is monotone") {
    const DesignInput in = fixture::random_instance(12, 77, 0);
    const std::vector<double> budgets{0, 10, 20, 40, 80, 160};
    const auto ladder = solve_budget_ladder(in, budgets);
    for (std::size_t i = 1; i < ladder.size(); ++i) {
      CHECK(ladder[i].stats.mean <= ladder[i - 1].stats.mean);
      CHECK(ladder[i].towers_used <= budgets[i]);
    }
  }

  TEST_CASE("evaluation matches Dijkstra per pair and routes are consistent") {
    const DesignInput in = fixture::random_instance(10, 5, 80);
    const auto design = solve_heuristic(in);
    const auto d = oracle::hybrid_distances(in, design.built);
    std::size_t demanded = 0;
    for (std::size_t s = 0; s < 10; ++s)
      for (std::size_t t = 0; t < 10; ++t) demanded += s != t && in.traffic(s, t) > 0;
    CHECK(design.routes.size() == demanded);
    for (const auto& r : design.routes) {
      CHECK(r.length_km == doctest::Approx(d[r.src][r.dst]).epsilon(1e-12));
      CHECK(r.stretch >= 1.0);
      REQUIRE(r.sites.front() == r.src);
      REQUIRE(r.sites.back() == r.dst);
      double len = 0;
      for (std::size_t i = 0; i < r.links.size(); ++i) {
        const auto& u = r.links[i];
        CHECK(u.link == LinkKey{std::min(r.sites[i], r.sites[i + 1]), std::max(r.sites[i], r.sites[i + 1])});
        len += u.medium == Medium::kMicrowave ? *in.mw_km[u.link.a][u.link.b] : *in.fiber_km[u.link.a][u.link.b];
        if (u.medium == Medium::kMicrowave)
          CHECK(std::find(design.built.begin(), design.built.end(), u.link) != design.built.end());
      }
      CHECK(len == doctest::Approx(r.length_km).epsilon(1e-12));
    }
  }

  TEST_CASE("input validation") {
    DesignInput in = tiny(5);
    in.budget = -1;
    CHECK_THROWS_AS(in.validate(), InputError);
    in = tiny(5);
    in.mw_km[0][1] = in.mw_km[1][0] = in.geodesic_km[0][1] * 0.5;
    CHECK_THROWS_AS(in.validate(), InputError);
    in = tiny(5);
    in.fiber_km[0][1] = in.fiber_km[1][0] = in.geodesic_km[0][1] * 1.2;
    CHECK_THROWS_AS(in.validate(), InputError);
  }
}
