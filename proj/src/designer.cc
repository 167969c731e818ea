#include "hybridnet/designer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hybridnet/error.h"

namespace hybridnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack when comparing objectives, so rounding noise never counts
// as an improvement.
bool improves(double candidate, double incumbent) {
  return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

// Dense all-pairs distance matrix of the hybrid site graph. Adding one link
// keeps it exact: a shortest path uses the new link at most once.
class Closure {
 public:
  explicit Closure(const DesignInput& in) : n_(in.size()), d_(n_ * n_, kInf) {
    for (std::size_t i = 0; i < n_; ++i) {
      d_[i * n_ + i] = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (i != j && in.fiber_km[i][j]) d_[i * n_ + j] = *in.fiber_km[i][j];
      }
    }
    for (std::size_t k = 0; k < n_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double dik = d_[i * n_ + k];
        if (dik == kInf) continue;
        for (std::size_t j = 0; j < n_; ++j) {
          const double v = dik + d_[k * n_ + j];
          if (v < d_[i * n_ + j]) d_[i * n_ + j] = v;
        }
      }
    }
  }

  double at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

  void add(std::size_t a, std::size_t b, double w) {
    for (std::size_t s = 0; s < n_; ++s) {
      const double sa = d_[s * n_ + a];
      const double sb = d_[s * n_ + b];
      for (std::size_t t = 0; t < n_; ++t) {
        const double via = std::min(sa + w + d_[b * n_ + t], sb + w + d_[a * n_ + t]);
        if (via < d_[s * n_ + t]) d_[s * n_ + t] = via;
      }
    }
  }

  // Objective given per-pair weights h/d (zero where there is no demand).
  double objective(const std::vector<double>& weight) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < d_.size(); ++k) {
      if (weight[k] > 0.0) sum += weight[k] * d_[k];
    }
    return sum;
  }

  // Objective if (a, b, w) were added, without modifying the matrix.
  double objective_with(std::size_t a, std::size_t b, double w,
                        const std::vector<double>& weight) const {
    double sum = 0.0;
    for (std::size_t s = 0; s < n_; ++s) {
      const double sa = d_[s * n_ + a];
      const double sb = d_[s * n_ + b];
      for (std::size_t t = 0; t < n_; ++t) {
        const double wk = weight[s * n_ + t];
        if (wk <= 0.0) continue;
        const double via = std::min(sa + w + d_[b * n_ + t], sb + w + d_[a * n_ + t]);
        sum += wk * std::min(d_[s * n_ + t], via);
      }
    }
    return sum;
  }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

std::vector<double> pair_weights(const DesignInput& in) {
  const std::size_t n = in.size();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const double h = in.traffic(s, t);
      if (s == t || h <= 0.0) continue;
      if (!(in.geodesic_km[s][t] > 0.0)) {
        throw InputError("sites " + in.sites[s].id + " and " + in.sites[t].id +
                         " coincide but exchange traffic");
      }
      w[s * n + t] = h / in.geodesic_km[s][t];
    }
  }
  return w;
}

double mw_length(const DesignInput& in, LinkKey k) {
  const auto& m = in.mw_km[k.a][k.b];
  if (!m) {
    throw InputError("no microwave option between " + in.sites[k.a].id +
                     " and " + in.sites[k.b].id);
  }
  return *m;
}

Closure closure_with(const DesignInput& in, std::span<const LinkKey> links) {
  Closure c(in);
  for (LinkKey k : links) c.add(k.a, k.b, mw_length(in, k));
  return c;
}

std::vector<LinkKey> sorted(std::vector<LinkKey> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Depth-first branch and bound over include/exclude decisions.
class BranchAndBound {
 public:
  BranchAndBound(const DesignInput& in, std::span<const LinkKey> cands)
      : in_(in), cands_(cands.begin(), cands.end()), weight_(pair_weights(in)) {
    for (LinkKey k : cands_) {
      len_.push_back(mw_length(in, k));
      cost_.push_back(link_cost(in, k));
    }
  }

  std::vector<LinkKey> run() {
    Closure root(in_);
    best_obj_ = root.objective(weight_);
    std::vector<LinkKey> chosen;
    visit(0, root, 0.0, chosen);
    return best_;
  }

 private:
  void visit(std::size_t k, const Closure& state, double spent,
             std::vector<LinkKey>& chosen) {
    const double here = state.objective(weight_);
    if (improves(here, best_obj_)) {
      best_obj_ = here;
      best_ = chosen;
    }
    if (k == cands_.size()) return;

    // Relaxation: everything still affordable on its own gets built.
    Closure relaxed = state;
    bool any = false;
    for (std::size_t j = k; j < cands_.size(); ++j) {
      if (spent + cost_[j] <= in_.budget) {
        relaxed.add(cands_[j].a, cands_[j].b, len_[j]);
        any = true;
      }
    }
    if (!any || !improves(relaxed.objective(weight_), best_obj_)) return;

    if (spent + cost_[k] <= in_.budget) {
      Closure next = state;
      next.add(cands_[k].a, cands_[k].b, len_[k]);
      chosen.push_back(cands_[k]);
      visit(k + 1, next, spent + cost_[k], chosen);
      chosen.pop_back();
    }
    visit(k + 1, state, spent, chosen);
  }

  const DesignInput& in_;
  std::vector<LinkKey> cands_;
  std::vector<double> weight_;
  std::vector<double> len_;
  std::vector<double> cost_;
  double best_obj_ = kInf;
  std::vector<LinkKey> best_;
};

// First-improvement search over "drop one built link, add one pool link"
// moves, plus pure additions, within the budget.
// Adds the largest-gain affordable link from `pool` until none helps.
std::vector<LinkKey> refill(const DesignInput& in, std::vector<LinkKey> built,
                            std::span<const LinkKey> pool, const std::vector<double>& weight) {
  Closure state = closure_with(in, built);
  double current = state.objective(weight);
  double spent = total_cost(in, built);
  while (true) {
    const LinkKey* best = nullptr;
    double best_obj = current;
    for (const LinkKey& k : pool) {
      if (spent + link_cost(in, k) > in.budget) continue;
      if (std::find(built.begin(), built.end(), k) != built.end()) continue;
      const double obj = state.objective_with(k.a, k.b, mw_length(in, k), weight);
      if (improves(obj, best_obj)) {
        best = &k;
        best_obj = obj;
      }
    }
    if (!best) return built;
    state.add(best->a, best->b, mw_length(in, *best));
    spent += link_cost(in, *best);
    current = best_obj;
    built.push_back(*best);
  }
}

// A pair-removal sweep costs roughly built^2 * pool^2 * n^2 objective terms.
constexpr double kPairMoveWork = 1e9;

std::vector<LinkKey> local_improve(const DesignInput& in,
                                   std::vector<LinkKey> built,
                                   std::span<const LinkKey> pool,
                                   std::size_t max_swaps) {
  const auto weight = pair_weights(in);
  double current = closure_with(in, built).objective(weight);
  std::size_t swaps = 0;
  bool moved = true;
  while (moved && swaps < max_swaps) {
    moved = false;
    const double spent = total_cost(in, built);
    // r == built.size() means "remove nothing".
    for (std::size_t r = 0; r <= built.size() && !moved; ++r) {
      std::vector<LinkKey> rest;
      for (std::size_t i = 0; i < built.size(); ++i) {
        if (i != r) rest.push_back(built[i]);
      }
      const double freed = r < built.size() ? link_cost(in, built[r]) : 0.0;
      const Closure base = closure_with(in, rest);
      for (LinkKey add : pool) {
        if (std::find(built.begin(), built.end(), add) != built.end()) continue;
        if (spent - freed + link_cost(in, add) > in.budget) continue;
        const double obj = base.objective_with(add.a, add.b, mw_length(in, add), weight);
        if (improves(obj, current)) {
          rest.push_back(add);
          built = std::move(rest);
          current = obj;
          ++swaps;
          moved = true;
          break;
        }
      }
    }
    if (moved) continue;

    const double b = static_cast<double>(built.size());
    const double n = static_cast<double>(in.size());
    const double p = static_cast<double>(pool.size());
    if (b * b * p * p * n * n > kPairMoveWork) break;
    for (std::size_t r1 = 0; r1 < built.size() && !moved; ++r1) {
      for (std::size_t r2 = r1 + 1; r2 < built.size() && !moved; ++r2) {
        std::vector<LinkKey> rest;
        for (std::size_t i = 0; i < built.size(); ++i) {
          if (i != r1 && i != r2) rest.push_back(built[i]);
        }
        const double room = in.budget - total_cost(in, rest);
        for (const LinkKey& first : pool) {
          if (link_cost(in, first) > room) continue;
          if (std::find(built.begin(), built.end(), first) != built.end()) continue;
          auto trial = rest;
          trial.push_back(first);
          auto next = refill(in, std::move(trial), pool, weight);
          const double obj = closure_with(in, next).objective(weight);
          if (improves(obj, current)) {
            built = std::move(next);
            current = obj;
            ++swaps;
            moved = true;
            break;
          }
        }
      }
    }
  }
  return built;
}

}  // namespace

void DesignInput::validate(double fiber_slowdown) const {
  const std::size_t n = size();
  if (traffic.size() != n) throw InputError("traffic matrix size differs from site count");
  auto square = [n](std::size_t rows, auto& m, const char* name) {
    if (rows != n) throw InputError(std::string(name) + " has wrong row count");
    for (const auto& row : m) {
      if (row.size() != n) throw InputError(std::string(name) + " has wrong column count");
    }
  };
  square(geodesic_km.size(), geodesic_km, "geodesic matrix");
  square(mw_km.size(), mw_km, "microwave matrix");
  square(mw_cost.size(), mw_cost, "cost matrix");
  square(fiber_km.size(), fiber_km, "fiber matrix");
  if (!(budget >= 0.0)) throw InputError("budget must be non-negative");
  for (std::size_t i = 0; i < n; ++i) {
    if (traffic.site_ids()[i] != sites[i].id) {
      throw InputError("traffic matrix site order differs from sites");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = geodesic_km[i][j];
      const double tol = 1e-9 * std::max(1.0, d);
      if (mw_km[i][j]) {
        if (*mw_km[i][j] < d - tol) throw InputError("microwave length below geodesic");
        if (!(mw_cost[i][j] >= 1.0)) throw InputError("microwave link cost must be >= 1");
        if (mw_km[i][j] != mw_km[j][i] || mw_cost[i][j] != mw_cost[j][i]) {
          throw InputError("microwave matrices must be symmetric");
        }
      }
      if (fiber_km[i][j] && *fiber_km[i][j] < fiber_slowdown * d - tol) {
        throw InputError("fiber length below slowdown times geodesic");
      }
    }
  }
}

std::vector<LinkKey> mw_options(const DesignInput& in) {
  std::vector<LinkKey> out;
  for (std::size_t a = 0; a < in.size(); ++a) {
    for (std::size_t b = a + 1; b < in.size(); ++b) {
      if (in.mw_km[a][b]) out.push_back({a, b});
    }
  }
  return out;
}

double link_cost(const DesignInput& in, LinkKey k) { return in.mw_cost[k.a][k.b]; }

double total_cost(const DesignInput& in, std::span<const LinkKey> links) {
  double c = 0.0;
  for (LinkKey k : links) c += link_cost(in, k);
  return c;
}

NetworkDesign evaluate_design(const DesignInput& in,
                              std::span<const LinkKey> built) {
  const std::size_t n = in.size();
  NetworkDesign out;
  out.built = sorted({built.begin(), built.end()});
  out.towers_used = total_cost(in, out.built);

  WeightedGraph g(n);
  std::vector<LinkUse> use;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (in.fiber_km[a][b]) {
        g.add_edge(a, b, *in.fiber_km[a][b]);
        use.push_back({{a, b}, Medium::kFiber});
      }
    }
  }
  for (LinkKey k : out.built) {
    g.add_edge(k.a, k.b, mw_length(in, k));
    use.push_back({k, Medium::kMicrowave});
  }

  std::vector<double> stretches, weights;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || in.traffic(s, t) <= 0.0) continue;
      auto p = shortest_path(g, s, t);
      if (!p) {
        throw InfeasibleError("no route between " + in.sites[s].id + " and " +
                              in.sites[t].id);
      }
      const double d = in.geodesic_km[s][t];
      if (!(d > 0.0)) throw InputError("coincident sites exchange traffic");
      RoutedPath r{s, t, p->nodes, {}, p->total_weight, p->total_weight / d};
      for (EdgeId e : p->edges) r.links.push_back(use[e]);
      stretches.push_back(r.stretch);
      weights.push_back(in.traffic(s, t));
      out.routes.push_back(std::move(r));
    }
  }
  if (!stretches.empty()) {
    out.stats = summarize(stretches, weights, Weighting::kGravity);
  }
  out.objective = objective(in, out);
  return out;
}

double objective(const DesignInput& in, const NetworkDesign& design) {
  double sum = 0.0;
  std::size_t routed = 0;
  for (const RoutedPath& r : design.routes) {
    sum += in.traffic(r.src, r.dst) / in.geodesic_km[r.src][r.dst] * r.length_km;
    ++routed;
  }
  std::size_t demanded = 0;
  for (std::size_t s = 0; s < in.size(); ++s) {
    for (std::size_t t = 0; t < in.size(); ++t) {
      if (s != t && in.traffic(s, t) > 0.0) ++demanded;
    }
  }
  if (routed != demanded) throw InfeasibleError("design leaves pairs unrouted");
  return sum;
}

ReducedCandidates eliminate_dominated(const DesignInput& in) {
  const std::size_t n = in.size();
  const Closure fiber(in);
  ReducedCandidates out;
  std::size_t demanded = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s != t && in.traffic(s, t) > 0.0) ++demanded;
    }
  }
  for (LinkKey k : mw_options(in)) {
    const double m = *in.mw_km[k.a][k.b];
    out.flow_variables_total += 2 * demanded;  // one variable per direction
    if (m >= fiber.at(k.a, k.b)) {
      out.dominated.push_back(k);
      continue;
    }
    out.links.push_back(k);
    // Geodesic distance bounds any route from below, so a flow whose best
    // route through this link is already no shorter than its fiber route
    // never needs the variable.
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = 0; t < n; ++t) {
        if (s == t || in.traffic(s, t) <= 0.0) continue;
        const double fib = fiber.at(s, t);
        const double fwd = in.geodesic_km[s][k.a] + m + in.geodesic_km[k.b][t];
        const double rev = in.geodesic_km[s][k.b] + m + in.geodesic_km[k.a][t];
        if (fwd < fib) ++out.flow_variables_kept;
        if (rev < fib) ++out.flow_variables_kept;
      }
    }
  }
  return out;
}

namespace {

// One greedy pass. With per_cost, links are ranked by objective gain per
// tower instead of raw gain.
std::vector<LinkKey> greedy_pass(const DesignInput& in, double limit,
                                 std::vector<LinkKey> remaining, bool per_cost) {
  const auto weight = pair_weights(in);
  Closure state(in);
  double current = state.objective(weight);
  double spent = 0.0;
  std::vector<LinkKey> chosen;
  while (true) {
    std::size_t best = remaining.size();
    double best_obj = current;
    double best_score = 0.0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const double cost = link_cost(in, remaining[i]);
      if (spent + cost > limit) continue;
      const double obj = state.objective_with(remaining[i].a, remaining[i].b,
                                              mw_length(in, remaining[i]), weight);
      if (!improves(obj, current)) continue;
      const double score = per_cost ? (current - obj) / cost : current - obj;
      if (best == remaining.size() || score > best_score) {
        best = i;
        best_obj = obj;
        best_score = score;
      }
    }
    if (best == remaining.size()) break;
    const LinkKey k = remaining[best];
    state.add(k.a, k.b, mw_length(in, k));
    spent += link_cost(in, k);
    current = best_obj;
    chosen.push_back(k);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return chosen;
}

std::vector<LinkKey> pool_or_all(const DesignInput& in,
                                 std::optional<std::span<const LinkKey>> pool) {
  if (pool) return sorted({pool->begin(), pool->end()});
  return mw_options(in);
}

}  // namespace

std::vector<LinkKey> greedy_candidates(
    const DesignInput& in, double inflation,
    std::optional<std::span<const LinkKey>> pool) {
  if (!(inflation >= 1.0)) throw InputError("inflation must be >= 1");
  return greedy_pass(in, inflation * in.budget, pool_or_all(in, pool), false);
}

std::vector<LinkKey> greedy_candidates_per_cost(
    const DesignInput& in, double inflation,
    std::optional<std::span<const LinkKey>> pool) {
  if (!(inflation >= 1.0)) throw InputError("inflation must be >= 1");
  return greedy_pass(in, inflation * in.budget, pool_or_all(in, pool), true);
}

NetworkDesign solve_exact(const DesignInput& in,
                          std::span<const LinkKey> candidates,
                          std::size_t limit) {
  if (candidates.size() > limit) {
    throw SearchTooLarge("exact search limited to " + std::to_string(limit) +
                         " candidates, got " + std::to_string(candidates.size()));
  }
  BranchAndBound bb(in, candidates);
  return evaluate_design(in, bb.run());
}

NetworkDesign solve_heuristic(const DesignInput& in,
                              const HeuristicOptions& opts) {
  const ReducedCandidates reduced = eliminate_dominated(in);
  const std::span<const LinkKey> pool(reduced.links);
  const auto weight = pair_weights(in);
  auto start_from = [&](const std::vector<LinkKey>& cands) {
    if (cands.size() <= opts.exact_limit) return solve_exact(in, cands, opts.exact_limit).built;
    std::vector<LinkKey> prefix;
    double spent = 0.0;
    for (LinkKey k : cands) {
      if (spent + link_cost(in, k) <= in.budget) {
        prefix.push_back(k);
        spent += link_cost(in, k);
      }
    }
    return prefix;
  };

  std::vector<std::vector<LinkKey>> starts;
  std::vector<LinkKey> cands = greedy_candidates(in, opts.inflation, pool);
  starts.push_back(start_from(cands));
  if (opts.per_cost_candidates) {
    for (LinkKey k : greedy_candidates_per_cost(in, opts.inflation, pool)) {
      if (std::find(cands.begin(), cands.end(), k) == cands.end()) cands.push_back(k);
    }
    starts.push_back(start_from(cands));
  }
  if (!opts.warm_start.empty() && total_cost(in, opts.warm_start) <= in.budget) {
    starts.push_back(opts.warm_start);
  }

  std::vector<LinkKey> built;
  double best = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    auto local = local_improve(in, std::move(starts[i]), reduced.links, opts.max_swaps);
    const double obj = closure_with(in, local).objective(weight);
    if (i == 0 || improves(obj, best)) {
      built = std::move(local);
      best = obj;
    }
  }
  return evaluate_design(in, built);
}

std::vector<NetworkDesign> solve_budget_ladder(const DesignInput& in,
                                               std::span<const double> budgets,
                                               const HeuristicOptions& opts) {
  std::vector<std::size_t> order(budgets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return budgets[x] < budgets[y]; });
  std::vector<NetworkDesign> out(budgets.size());
  DesignInput step = in;
  HeuristicOptions o = opts;
  for (std::size_t i : order) {
    step.budget = budgets[i];
    out[i] = solve_heuristic(step, o);
    o.warm_start = out[i].built;
  }
  return out;
}

DesignInput make_design_input(std::vector<Site> sites, TrafficMatrix traffic,
                              std::span<const MwLink> mw_links,
                              const OptMatrix& raw_fiber_km, double budget,
                              const LatencyModel& model) {
  DesignInput in;
  const std::size_t n = sites.size();
  in.geodesic_km = geodesic_matrix(sites);
  in.sites = std::move(sites);
  in.traffic = std::move(traffic);
  in.mw_km.assign(n, std::vector<std::optional<double>>(n));
  in.mw_cost.assign(n, std::vector<double>(n, 0.0));
  for (const MwLink& l : mw_links) {
    auto& cur = in.mw_km[l.site_a][l.site_b];
    if (!cur || l.length_km < *cur) {
      cur = l.length_km;
      in.mw_km[l.site_b][l.site_a] = l.length_km;
      in.mw_cost[l.site_a][l.site_b] = in.mw_cost[l.site_b][l.site_a] =
          static_cast<double>(l.tower_count());
    }
  }
  in.fiber_km.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && raw_fiber_km.at(i).at(j)) {
        in.fiber_km[i][j] = *raw_fiber_km[i][j] * model.fiber_slowdown;
      }
    }
  }
  in.budget = budget;
  in.validate(model.fiber_slowdown);
  return in;
}

}  // namespace hybridnet
