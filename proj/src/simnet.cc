#include "hybridnet/simnet.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "hybridnet/csv.h"
#include "hybridnet/error.h"
#include "hybridnet/graph.h"
#include "hybridnet/rng.h"

namespace hybridnet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<std::size_t>> out_arcs(const SimTopology& topo) {
  std::vector<std::vector<std::size_t>> out(topo.nodes.size());
  for (std::size_t a = 0; a < topo.arc_count(); ++a) out[topo.arc_from(a)].push_back(a);
  return out;
}

// Directed Dijkstra over arcs; returns distances and the arc used to reach
// each node (npos for the source and unreachable nodes).
void arc_dijkstra(const SimTopology& topo, const std::vector<std::vector<std::size_t>>& out,
                  std::size_t src, const std::vector<double>& len,
                  std::vector<double>& dist, std::vector<std::size_t>& via) {
  const std::size_t n = topo.nodes.size();
  dist.assign(n, kInf);
  via.assign(n, static_cast<std::size_t>(-1));
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (std::size_t a : out[v]) {
      const std::size_t w = topo.arc_to(a);
      const double nd = d + len[a];
      if (nd < dist[w]) {
        dist[w] = nd;
        via[w] = a;
        pq.push({nd, w});
      }
    }
  }
}

RoutingTable shortest_path_table(const SimTopology& topo, const LatencyModel& model) {
  const std::size_t n = topo.nodes.size();
  WeightedGraph g(n);
  for (std::size_t i = 0; i < topo.links.size(); ++i) {
    g.add_edge(topo.links[i].a, topo.links[i].b, topo.propagation_ms(2 * i, model));
  }
  RoutingTable t;
  t.nodes = n;
  t.next.assign(n * n, {});
  for (std::size_t dst = 0; dst < n; ++dst) {
    for (std::size_t v = 0; v < n; ++v) {
      if (v == dst) continue;
      auto p = shortest_path(g, v, dst);
      if (!p) throw InfeasibleError("no route from " + topo.nodes[v] + " to " + topo.nodes[dst]);
      const EdgeId e = p->edges.front();
      t.next[dst * n + v] = {{topo.links[e].a == v ? 2 * e : 2 * e + 1, 1.0}};
    }
  }
  return t;
}

// Removes directed cycles from a single-destination flow so that
// proportional splitting at every node is loop-free.
void cancel_cycles(const SimTopology& topo, const std::vector<std::vector<std::size_t>>& out,
                   std::vector<double>& flow) {
  const std::size_t n = topo.nodes.size();
  double scale = 0.0;
  for (double f : flow) scale = std::max(scale, f);
  const double eps = 1e-12 * scale;
  for (double& f : flow) {
    if (f <= eps) f = 0.0;
  }
  while (true) {
    std::vector<int> color(n, 0);
    std::vector<std::size_t> stack_arc;
    std::vector<std::size_t> cycle;
    // Iterative DFS keeping the arc path on a stack.
    for (std::size_t root = 0; root < n && cycle.empty(); ++root) {
      if (color[root]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> st{{root, 0}};
      color[root] = 1;
      while (!st.empty() && cycle.empty()) {
        auto& [v, i] = st.back();
        if (i == out[v].size()) {
          color[v] = 2;
          st.pop_back();
          if (!stack_arc.empty()) stack_arc.pop_back();
          continue;
        }
        const std::size_t a = out[v][i++];
        if (flow[a] <= 0.0) continue;
        const std::size_t w = topo.arc_to(a);
        if (color[w] == 1) {
          cycle.push_back(a);
          for (auto it = stack_arc.rbegin(); it != stack_arc.rend(); ++it) {
            if (topo.arc_to(*it) == w) break;
            cycle.push_back(*it);
          }
        } else if (color[w] == 0) {
          color[w] = 1;
          stack_arc.push_back(a);
          st.push_back({w, 0});
        }
      }
    }
    if (cycle.empty()) return;
    double m = kInf;
    for (std::size_t a : cycle) m = std::min(m, flow[a]);
    for (std::size_t a : cycle) {
      flow[a] -= m;
      if (flow[a] <= eps) flow[a] = 0.0;
    }
  }
}

// Multiplicative-weights concurrent flow (Garg-Koenemann, Fleischer's
// per-source variant). Runs phases until the averaged flow's maximum
// utilization is within `tolerance` of the best dual bound seen.
RoutingTable flow_table(const SimTopology& topo, std::span<const double> demand,
                        double tolerance, const LatencyModel& model) {
  const std::size_t n = topo.nodes.size();
  const std::size_t m = topo.arc_count();
  const auto out = out_arcs(topo);
  std::vector<double> cap(m);
  for (std::size_t a = 0; a < m; ++a) cap[a] = topo.arc_link(a).capacity_gbps;

  std::vector<double> len(m);
  for (std::size_t a = 0; a < m; ++a) len[a] = 1.0 / cap[a];
  std::vector<double> total(m, 0.0);
  std::vector<double> per_dst(n * m, 0.0);  // per_dst[t * m + a]
  std::vector<double> dist;
  std::vector<std::size_t> via;
  std::vector<double> rest(n), load(m);

  bool any_demand = false;
  for (double d : demand) any_demand = any_demand || d > 0.0;
  RoutingTable t;
  t.nodes = n;
  if (!any_demand) return shortest_path_table(topo, model);

  const double eps = 0.02;
  double best_lb = 0.0;
  double primal = kInf;
  std::size_t phases = 0;
  const std::size_t max_phases = 200000;
  while (phases < max_phases) {
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t d = 0; d < n; ++d) rest[d] = demand[s * n + d];
      double left = 0.0;
      for (double r : rest) left += r;
      while (left > 0.0) {
        arc_dijkstra(topo, out, s, len, dist, via);
        std::fill(load.begin(), load.end(), 0.0);
        for (std::size_t d = 0; d < n; ++d) {
          if (rest[d] <= 0.0) continue;
          if (dist[d] == kInf) {
            throw InfeasibleError("no route from " + topo.nodes[s] + " to " + topo.nodes[d]);
          }
          for (std::size_t v = d; v != s; v = topo.arc_from(via[v])) load[via[v]] += rest[d];
        }
        double sigma = 1.0;
        for (std::size_t a = 0; a < m; ++a) {
          if (load[a] > 0.0) sigma = std::min(sigma, cap[a] / load[a]);
        }
        for (std::size_t d = 0; d < n; ++d) {
          if (rest[d] <= 0.0) continue;
          const double f = sigma * rest[d];
          for (std::size_t v = d; v != s; v = topo.arc_from(via[v])) per_dst[d * m + via[v]] += f;
        }
        double maxlen = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
          if (load[a] > 0.0) {
            total[a] += sigma * load[a];
            len[a] *= 1.0 + eps * sigma * load[a] / cap[a];
          }
          maxlen = std::max(maxlen, len[a]);
        }
        for (double& l : len) l /= maxlen;  // only ratios matter
        left = 0.0;
        for (double& r : rest) {
          r = sigma >= 1.0 ? 0.0 : r * (1.0 - sigma);
          left += r;
        }
      }
    }
    ++phases;

    double lhs = 0.0, rhs = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      arc_dijkstra(topo, out, s, len, dist, via);
      for (std::size_t d = 0; d < n; ++d) {
        if (demand[s * n + d] > 0.0) lhs += demand[s * n + d] * dist[d];
      }
    }
    for (std::size_t a = 0; a < m; ++a) rhs += len[a] * cap[a];
    best_lb = std::max(best_lb, lhs / rhs);
    primal = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      primal = std::max(primal, total[a] / (static_cast<double>(phases) * cap[a]));
    }
    if (primal <= (1.0 + tolerance) * best_lb) break;
  }

  t.next.assign(n * n, {});
  const RoutingTable sp = shortest_path_table(topo, model);
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<double> f(per_dst.begin() + static_cast<std::ptrdiff_t>(d * m),
                          per_dst.begin() + static_cast<std::ptrdiff_t>((d + 1) * m));
    cancel_cycles(topo, out, f);
    for (std::size_t v = 0; v < n; ++v) {
      if (v == d) continue;
      double sum = 0.0;
      for (std::size_t a : out[v]) sum += f[a];
      auto& hops = t.next[d * n + v];
      if (sum > 0.0) {
        for (std::size_t a : out[v]) {
          if (f[a] > 0.0) hops.push_back({a, f[a] / sum});
        }
      } else {
        hops = sp.at(d, v);
      }
    }
  }
  t.utilization_lower_bound = best_lb;
  const auto loads = expected_arc_load(topo, t, demand);
  for (std::size_t a = 0; a < m; ++a) t.max_utilization = std::max(t.max_utilization, loads[a] / cap[a]);
  return t;
}

}  // namespace

std::size_t SimTopology::arc_from(std::size_t arc) const {
  const SimLink& l = links.at(arc / 2);
  return arc % 2 == 0 ? l.a : l.b;
}

std::size_t SimTopology::arc_to(std::size_t arc) const {
  const SimLink& l = links.at(arc / 2);
  return arc % 2 == 0 ? l.b : l.a;
}

double SimTopology::propagation_ms(std::size_t arc, const LatencyModel& m) const {
  const SimLink& l = arc_link(arc);
  return latency_ms(l.km, l.medium, m);
}

void SimTopology::validate() const {
  for (const SimLink& l : links) {
    if (l.a >= nodes.size() || l.b >= nodes.size() || l.a == l.b) {
      throw InputError("link endpoints must be two distinct known nodes");
    }
    if (!(l.km > 0.0)) throw InputError("link length must be positive");
    if (!(l.capacity_gbps > 0.0)) throw InputError("link capacity must be positive");
  }
}

const char* to_string(RoutingScheme s) {
  switch (s) {
    case RoutingScheme::kShortestPath: return "shortest_path";
    case RoutingScheme::kMinMaxUtil: return "min_max_util";
    case RoutingScheme::kThroughputOptimal: return "throughput_optimal";
  }
  return "?";
}

RoutingScheme parse_routing(const std::string& s) {
  if (s == "shortest_path") return RoutingScheme::kShortestPath;
  if (s == "min_max_util") return RoutingScheme::kMinMaxUtil;
  if (s == "throughput_optimal") return RoutingScheme::kThroughputOptimal;
  throw InputError("unknown routing scheme: " + s);
}

std::vector<double> demand_gbps(const TrafficMatrix& h, double aggregate_gbps) {
  if (!(aggregate_gbps >= 0.0)) throw InputError("aggregate rate must be non-negative");
  const std::size_t n = h.size();
  std::vector<double> d(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) d[s * n + t] = h(s, t) * aggregate_gbps;
  }
  return d;
}

RoutingTable build_routing(const SimTopology& topo, std::span<const double> demand,
                           RoutingScheme scheme, double tolerance,
                           const LatencyModel& model) {
  topo.validate();
  const std::size_t n = topo.nodes.size();
  if (demand.size() != n * n) throw InputError("demand size differs from node count");
  if (scheme == RoutingScheme::kShortestPath) {
    RoutingTable t = shortest_path_table(topo, model);
    const auto loads = expected_arc_load(topo, t, demand);
    for (std::size_t a = 0; a < loads.size(); ++a) {
      t.max_utilization = std::max(t.max_utilization, loads[a] / topo.arc_link(a).capacity_gbps);
    }
    return t;
  }
  // Minimizing the maximum utilization of `demand` and maximizing the
  // factor by which `demand` can be scaled are the same program.
  return flow_table(topo, demand, tolerance, model);
}

std::vector<double> expected_arc_load(const SimTopology& topo, const RoutingTable& table,
                                      std::span<const double> demand) {
  const std::size_t n = topo.nodes.size();
  std::vector<double> load(topo.arc_count(), 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      if (v == d) continue;
      for (const NextHop& h : table.at(d, v)) ++indeg[topo.arc_to(h.arc)];
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) x[v] = demand[v * n + d];
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
      if (indeg[v] == 0) ready.push_back(v);
    }
    std::size_t done = 0;
    while (!ready.empty()) {
      const std::size_t v = ready.back();
      ready.pop_back();
      ++done;
      if (v == d) continue;
      for (const NextHop& h : table.at(d, v)) {
        const std::size_t w = topo.arc_to(h.arc);
        load[h.arc] += x[v] * h.weight;
        x[w] += x[v] * h.weight;
        if (--indeg[w] == 0) ready.push_back(w);
      }
    }
    if (done != n) throw InputError("routing table has a loop");
  }
  return load;
}

void SimConfig::validate() const {
  if (!(packet_bytes > 0.0)) throw InputError("packet size must be positive");
  if (!(sim_seconds > 0.0)) throw InputError("simulated time must be positive");
  if (queue_capacity_packets == 0) throw InputError("queue capacity must be positive");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw InputError("warm-up fraction must lie in [0, 1)");
  }
  latency.validate();
}

FlowStats run(const SimTopology& topo, std::span<const double> demand,
              const RoutingTable& table, const SimConfig& cfg) {
  topo.validate();
  cfg.validate();
  const std::size_t n = topo.nodes.size();
  if (demand.size() != n * n) throw InputError("demand size differs from node count");
  if (table.nodes != n) throw InputError("routing table size differs from node count");

  const double bits = cfg.packet_bytes * 8.0;
  const double end = cfg.sim_seconds;
  const double warm = cfg.warmup_fraction * end;
  const std::size_t m = topo.arc_count();
  std::vector<double> tx(m), prop(m);
  for (std::size_t a = 0; a < m; ++a) {
    tx[a] = bits / (topo.arc_link(a).capacity_gbps * 1e9);
    prop[a] = topo.propagation_ms(a, cfg.latency) / 1000.0;
  }

  struct Packet {
    std::size_t flow;
    std::size_t node;
    double created;
    double floor;    // propagation + transmission so far
    double queued;   // waiting time so far
    bool counted;
  };
  struct Event {
    double time;
    std::uint64_t seq;
    bool emit;
    std::size_t id;  // flow for emissions, packet slot otherwise
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  Rng rng(cfg.seed);
  FlowStats stats;
  std::vector<double> interval;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const double rate = demand[s * n + t];
      if (s == t || !(rate > 0.0)) continue;
      FlowResult f;
      f.src = s;
      f.dst = t;
      f.rate_gbps = rate;
      f.min_slack_ms = kInf;
      stats.flows.push_back(f);
      interval.push_back(bits / (rate * 1e9));
      const double phase = rng.uniform01() * interval.back();
      if (phase < end) events.push({phase, seq++, true, stats.flows.size() - 1});
    }
  }

  std::vector<Packet> pool;
  std::vector<std::size_t> free_slots;
  std::vector<double> busy_until(m, 0.0), busy(m, 0.0);
  std::vector<std::deque<double>> in_system(m);
  std::vector<double> delay_sum(stats.flows.size(), 0.0), queue_sum(stats.flows.size(), 0.0);

  auto release = [&](std::size_t slot) { free_slots.push_back(slot); };

  auto arrive = [&](std::size_t slot, double now) {
    Packet& p = pool[slot];
    FlowResult& f = stats.flows[p.flow];
    if (p.node == f.dst) {
      if (p.counted) {
        const double delay = now - p.created;
        ++f.delivered;
        delay_sum[p.flow] += delay;
        queue_sum[p.flow] += p.queued;
        f.max_delay_ms = std::max(f.max_delay_ms, delay * 1000.0);
        f.min_slack_ms = std::min(f.min_slack_ms, (delay - p.floor) * 1000.0);
      }
      release(slot);
      return;
    }
    const auto& hops = table.at(f.dst, p.node);
    if (hops.empty()) throw InputError("routing table has no next hop");
    std::size_t arc = hops.front().arc;
    if (hops.size() > 1) {
      double u = rng.uniform01();
      arc = hops.back().arc;
      for (const NextHop& h : hops) {
        if (u < h.weight) {
          arc = h.arc;
          break;
        }
        u -= h.weight;
      }
    }
    auto& q = in_system[arc];
    while (!q.empty() && q.front() <= now) q.pop_front();
    if (q.size() >= cfg.queue_capacity_packets) {
      if (p.counted) ++f.dropped;
      release(slot);
      return;
    }
    const double start = std::max(now, busy_until[arc]);
    const double finish = start + tx[arc];
    busy_until[arc] = finish;
    q.push_back(finish);
    busy[arc] += std::max(0.0, std::min(finish, end) - std::max(start, warm));
    p.queued += start - now;
    p.floor += tx[arc] + prop[arc];
    p.node = topo.arc_to(arc);
    events.push({finish + prop[arc], seq++, false, slot});
  };

  while (!events.empty()) {
    const Event e = events.top();
    if (e.time > end) break;
    events.pop();
    ++stats.events;
    if (e.emit) {
      FlowResult& f = stats.flows[e.id];
      std::size_t slot;
      if (free_slots.empty()) {
        slot = pool.size();
        pool.push_back({});
      } else {
        slot = free_slots.back();
        free_slots.pop_back();
      }
      pool[slot] = {e.id, f.src, e.time, 0.0, 0.0, e.time >= warm};
      if (pool[slot].counted) ++f.sent;
      const double next = e.time + interval[e.id];
      if (next <= end) events.push({next, seq++, true, e.id});
      arrive(slot, e.time);
    } else {
      arrive(e.id, e.time);
    }
  }

  std::uint64_t delivered = 0, dropped = 0;
  double dsum = 0.0, qsum = 0.0;
  for (std::size_t i = 0; i < stats.flows.size(); ++i) {
    FlowResult& f = stats.flows[i];
    f.in_flight = f.sent - f.delivered - f.dropped;
    if (f.delivered) {
      f.mean_delay_ms = delay_sum[i] / static_cast<double>(f.delivered) * 1000.0;
      f.mean_queuing_ms = queue_sum[i] / static_cast<double>(f.delivered) * 1000.0;
    }
    if (f.min_slack_ms == kInf) f.min_slack_ms = 0.0;
    delivered += f.delivered;
    dropped += f.dropped;
    dsum += delay_sum[i];
    qsum += queue_sum[i];
  }
  if (delivered) {
    stats.mean_delay_ms = dsum / static_cast<double>(delivered) * 1000.0;
    stats.mean_queuing_ms = qsum / static_cast<double>(delivered) * 1000.0;
  }
  if (delivered + dropped) {
    stats.loss_rate = static_cast<double>(dropped) / static_cast<double>(delivered + dropped);
  }
  stats.arc_utilization.resize(m);
  for (std::size_t a = 0; a < m; ++a) stats.arc_utilization[a] = busy[a] / (end - warm);
  return stats;
}

void write_flow_csv(std::ostream& out, const SimTopology& topo, const FlowStats& s) {
  out << "src,dst,rate_gbps,sent,delivered,dropped,in_flight,loss,mean_delay_ms,"
         "max_delay_ms,mean_queuing_ms\n";
  for (const FlowResult& f : s.flows) {
    out << topo.nodes[f.src] << ',' << topo.nodes[f.dst] << ',' << format_double(f.rate_gbps)
        << ',' << f.sent << ',' << f.delivered << ',' << f.dropped << ',' << f.in_flight << ','
        << format_double(f.loss()) << ',' << format_double(f.mean_delay_ms) << ','
        << format_double(f.max_delay_ms) << ',' << format_double(f.mean_queuing_ms) << '\n';
  }
}

void write_link_util_csv(std::ostream& out, const SimTopology& topo, const FlowStats& s) {
  out << "from,to,medium,capacity_gbps,utilization\n";
  for (std::size_t a = 0; a < topo.arc_count(); ++a) {
    const SimLink& l = topo.arc_link(a);
    out << topo.nodes[topo.arc_from(a)] << ',' << topo.nodes[topo.arc_to(a)] << ','
        << to_string(l.medium) << ',' << format_double(l.capacity_gbps) << ','
        << format_double(s.arc_utilization.at(a)) << '\n';
  }
}

std::vector<PerturbationRow> perturbation_experiment(
    const SimTopology& topo, std::span<const Site> sites,
    std::span<const double> gammas, std::span<const double> loads,
    double aggregate_gbps, RoutingScheme scheme, const SimConfig& cfg) {
  if (sites.size() != topo.nodes.size()) throw InputError("site list differs from topology");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].id != topo.nodes[i]) throw InputError("site order differs from topology");
  }
  std::vector<PerturbationRow> rows;
  for (double gamma : gammas) {
    const TrafficMatrix h = perturb(sites, gamma, cfg.seed);
    const auto base = demand_gbps(h, aggregate_gbps);
    const RoutingTable table = build_routing(topo, base, scheme, 0.01, cfg.latency);
    for (double load : loads) {
      std::vector<double> d(base);
      for (double& x : d) x *= load;
      const FlowStats s = run(topo, d, table, cfg);
      rows.push_back({gamma, load, s.mean_delay_ms, s.loss_rate, s.mean_queuing_ms});
    }
  }
  return rows;
}

void write_perturbation_csv(std::ostream& out, std::span<const PerturbationRow> rows) {
  out << "gamma,load,mean_delay_ms,loss_rate\n";
  for (const PerturbationRow& r : rows) {
    out << format_double(r.gamma) << ',' << format_double(r.load) << ','
        << format_double(r.mean_delay_ms) << ',' << format_double(r.loss_rate) << '\n';
  }
}

}  // namespace hybridnet
