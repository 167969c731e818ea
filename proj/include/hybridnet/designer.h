#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hybridnet/geo.h"
#include "hybridnet/graph.h"
#include "hybridnet/los.h"
#include "hybridnet/site.h"
#include "hybridnet/stats.h"
#include "hybridnet/traffic.h"

namespace hybridnet {

using Matrix = std::vector<std::vector<double>>;
using OptMatrix = std::vector<std::vector<std::optional<double>>>;

// One instance of the budgeted design problem. Lengths are in
// latency-equivalent km: microwave at face value, fiber already multiplied
// by the fiber slowdown.
struct DesignInput {
  std::vector<Site> sites;
  TrafficMatrix traffic;  // h
  Matrix geodesic_km;     // d
  OptMatrix mw_km;        // m, nullopt where no line-of-sight link exists
  Matrix mw_cost;         // c in towers, read only where m is present
  OptMatrix fiber_km;     // o, nullopt where no fiber path exists
  double budget = 0.0;    // B in towers

  std::size_t size() const { return sites.size(); }
  // Throws InputError when dimensions or the documented bounds
  // (m >= d, o >= 1.5 d, c >= 1, B >= 0) are violated.
  void validate(double fiber_slowdown = 1.5) const;
};

// An undirected site pair, a < b.
struct LinkKey {
  std::size_t a;
  std::size_t b;

  friend auto operator<=>(const LinkKey&, const LinkKey&) = default;
};

// Every site pair with a microwave option, in lexicographic order.
std::vector<LinkKey> mw_options(const DesignInput& in);

double link_cost(const DesignInput& in, LinkKey k);
double total_cost(const DesignInput& in, std::span<const LinkKey> links);

struct LinkUse {
  LinkKey link;
  Medium medium;
};

struct RoutedPath {
  std::size_t src;
  std::size_t dst;
  std::vector<std::size_t> sites;  // src ... dst
  std::vector<LinkUse> links;
  double length_km = 0.0;  // latency-equivalent
  double stretch = 0.0;
};

struct NetworkDesign {
  std::vector<LinkKey> built;        // sorted
  std::vector<RoutedPath> routes;    // every ordered pair with demand
  StretchStats stats;                // traffic-weighted
  double objective = 0.0;
  double towers_used = 0.0;
};

// Routes every pair with demand over fiber plus the built microwave links
// (shortest path, deterministic ties) and reports traffic-weighted stretch.
// Throws InfeasibleError when a pair with demand has no route.
NetworkDesign evaluate_design(const DesignInput& in,
                              std::span<const LinkKey> built);

// Sum over pairs of h_st / d_st times the routed length.
double objective(const DesignInput& in, const NetworkDesign& design);

struct ReducedCandidates {
  std::vector<LinkKey> links;      // may shorten some route
  std::vector<LinkKey> dominated;  // never shorter than fiber between its ends
  // Size of the per-pair flow formulation before and after removing
  // microwave variables that cannot beat the fiber route of their pair.
  std::size_t flow_variables_total = 0;
  std::size_t flow_variables_kept = 0;
};

// Drops microwave options that are no shorter than the fiber route between
// their endpoints. Any route over such a link can swap in the fiber, so the
// optimum is unchanged.
ReducedCandidates eliminate_dominated(const DesignInput& in);

// Repeatedly adds the link that lowers the objective most among those that
// still fit inflation * budget, until nothing fits or nothing helps. Returns
// links in the order added. `pool` defaults to every microwave option.
std::vector<LinkKey> greedy_candidates(
    const DesignInput& in, double inflation = 2.0,
    std::optional<std::span<const LinkKey>> pool = std::nullopt);

// Same loop, ranking links by objective decrease per tower of cost.
std::vector<LinkKey> greedy_candidates_per_cost(
    const DesignInput& in, double inflation = 2.0,
    std::optional<std::span<const LinkKey>> pool = std::nullopt);

class SearchTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kExactCandidateLimit = 25;

// Optimal subset of candidates within the budget, by branch and bound.
// Throws SearchTooLarge above `limit` candidates.
NetworkDesign solve_exact(const DesignInput& in,
                          std::span<const LinkKey> candidates,
                          std::size_t limit = kExactCandidateLimit);

struct HeuristicOptions {
  double inflation = 2.0;
  std::size_t exact_limit = kExactCandidateLimit;
  std::size_t max_swaps = 1000;
  // Also admit the per-tower greedy list as candidates.
  bool per_cost_candidates = true;
  // Feasible starting point from an earlier solve, e.g. a smaller budget.
  std::vector<LinkKey> warm_start;
};

// Dominance elimination, greedy candidates at the inflated budget (by raw
// gain, plus by gain per tower unless disabled), exact
// search over them when small enough (otherwise the greedy prefix that
// fits), then single-swap local improvement.
NetworkDesign solve_heuristic(const DesignInput& in,
                              const HeuristicOptions& opts = {});

// Solves for each budget in increasing order, warm-starting each solve from
// the previous design. Results are returned in the order of `budgets`.
std::vector<NetworkDesign> solve_budget_ladder(const DesignInput& in,
                                               std::span<const double> budgets,
                                               const HeuristicOptions& opts = {});

// Assembles an instance from component data. mw_links entries supply m and
// c; fiber_km is the raw fiber distance, scaled here by the slowdown.
DesignInput make_design_input(std::vector<Site> sites, TrafficMatrix traffic,
                              std::span<const MwLink> mw_links,
                              const OptMatrix& raw_fiber_km, double budget,
                              const LatencyModel& model = {});

}  // namespace hybridnet
