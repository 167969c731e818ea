// Seeded synthetic instances shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hybridnet/designer.h"
#include "hybridnet/fiber.h"
#include "hybridnet/rng.h"
#include "hybridnet/traffic.h"

namespace fixture {

inline std::vector<hybridnet::Site> random_sites(std::size_t n, std::uint64_t seed) {
  hybridnet::Rng rng(seed);
  std::vector<hybridnet::Site> s;
  for (std::size_t i = 0; i < n; ++i) {
    const double lat = rng.uniform(30.0, 46.0);
    const double lon = rng.uniform(-122.0, -72.0);
    s.push_back({"S" + std::to_string(i), hybridnet::GeoPoint(lat, lon), rng.uniform(0.2, 10.0)});
  }
  return s;
}

// Conduit graph over the sites: a nearest-neighbour spanning tree plus a few
// random chords, each conduit 5-45% longer than the geodesic.
inline hybridnet::FiberGraph random_fiber(const std::vector<hybridnet::Site>& sites,
                                          std::uint64_t seed, double chord_prob = 0.15) {
  hybridnet::Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t n = sites.size();
  const auto d = hybridnet::geodesic_matrix(sites);
  std::vector<hybridnet::Conduit> cs;
  std::vector<bool> in_tree(n, false);
  in_tree[0] = true;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  for (std::size_t added = 1; added < n; ++added) {
    std::size_t ba = 0, bb = 0;
    double best = 1e300;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (in_tree[a] && !in_tree[b] && d[a][b] < best) { best = d[a][b]; ba = a; bb = b; }
    in_tree[bb] = true;
    used[ba][bb] = used[bb][ba] = true;
    cs.push_back({ba, bb, d[ba][bb] * rng.uniform(1.05, 1.45)});
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!used[a][b] && rng.uniform01() < chord_prob)
        cs.push_back({a, b, d[a][b] * rng.uniform(1.05, 1.45)});
  return hybridnet::FiberGraph(sites, cs);
}

// Design instance with gravity traffic, all-pairs fiber distances from a
// random conduit graph, and microwave options on a random subset of pairs.
inline hybridnet::DesignInput random_instance(std::size_t n, std::uint64_t seed,
                                              double budget, double mw_prob = 0.8) {
  using namespace hybridnet;
  auto sites = random_sites(n, seed);
  const FiberGraph fg = random_fiber(sites, seed);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto raw = all_pairs_site_paths(fg.graph(), all);
  Rng rng(seed * 31 + 7);
  std::vector<MwLink> links;
  const auto d = geodesic_matrix(sites);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rng.uniform01() >= mw_prob) continue;
      const double m = d[a][b] * rng.uniform(1.0, 1.1);
      const auto towers = static_cast<std::size_t>(std::ceil(m / 70.0)) + 1;
      links.push_back({a, b, m, std::vector<std::size_t>(towers, 0)});
    }
  TrafficMatrix h = gravity_matrix(sites);
  return make_design_input(sites, h, links, raw, budget);
}

}  // namespace fixture
