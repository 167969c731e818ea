#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hybridnet/geo.h"
#include "hybridnet/site.h"
#include "hybridnet/traffic.h"

namespace hybridnet {

struct SimLink {
  std::size_t a;
  std::size_t b;
  double km = 0.0;
  Medium medium = Medium::kFiber;
  double capacity_gbps = 0.0;  // per direction
};

// Nodes are named by site id. Each link is two independent directions
// ("arcs"): arc 2i runs a -> b, arc 2i + 1 runs b -> a.
struct SimTopology {
  std::vector<std::string> nodes;
  std::vector<SimLink> links;

  std::size_t arc_count() const { return 2 * links.size(); }
  std::size_t arc_from(std::size_t arc) const;
  std::size_t arc_to(std::size_t arc) const;
  const SimLink& arc_link(std::size_t arc) const { return links.at(arc / 2); }
  double propagation_ms(std::size_t arc, const LatencyModel& m = {}) const;
  void validate() const;
};

enum class RoutingScheme { kShortestPath, kMinMaxUtil, kThroughputOptimal };
const char* to_string(RoutingScheme s);
RoutingScheme parse_routing(const std::string& s);

struct NextHop {
  std::size_t arc;
  double weight;  // in (0, 1], summing to 1 per (destination, node)
};

struct RoutingTable {
  std::size_t nodes = 0;
  // next[dst * nodes + node]
  std::vector<std::vector<NextHop>> next;
  // Maximum link utilization the routing attains for the demand it was
  // built for, and a lower bound on the best possible value.
  double max_utilization = 0.0;
  double utilization_lower_bound = 0.0;

  const std::vector<NextHop>& at(std::size_t dst, std::size_t node) const {
    return next.at(dst * nodes + node);
  }
};

// Demand in Gbps per ordered node pair, row-major.
std::vector<double> demand_gbps(const TrafficMatrix& h, double aggregate_gbps);

// shortest_path: one next hop per destination along minimum-latency paths.
// min_max_util / throughput_optimal: splittable multicommodity flow within
// `tolerance` of the optimal concurrent-flow value; the two objectives are
// reciprocal (max utilization = 1 / concurrent throughput factor).
RoutingTable build_routing(const SimTopology& topo, std::span<const double> demand,
                           RoutingScheme scheme, double tolerance = 0.01,
                           const LatencyModel& model = {});

// Per-arc load when `demand` is split according to `table`.
std::vector<double> expected_arc_load(const SimTopology& topo, const RoutingTable& table,
                                      std::span<const double> demand);

struct SimConfig {
  double packet_bytes = 500.0;
  double sim_seconds = 1.0;
  std::size_t queue_capacity_packets = 1000;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;
  LatencyModel latency;
  void validate() const;
};

struct FlowResult {
  std::size_t src;
  std::size_t dst;
  double rate_gbps = 0.0;
  // Counters cover packets sent after warm-up.
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  double mean_delay_ms = 0.0;
  double max_delay_ms = 0.0;
  double mean_queuing_ms = 0.0;
  // Smallest delay minus its path's propagation + transmission time.
  double min_slack_ms = 0.0;
  double loss() const {
    const auto done = delivered + dropped;
    return done ? static_cast<double>(dropped) / static_cast<double>(done) : 0.0;
  }
};

struct FlowStats {
  std::vector<FlowResult> flows;
  std::vector<double> arc_utilization;  // busy fraction after warm-up
  double mean_delay_ms = 0.0;           // over delivered packets
  double mean_queuing_ms = 0.0;
  double loss_rate = 0.0;               // dropped / (delivered + dropped)
  std::uint64_t events = 0;
};

// Constant-rate datagram flows, one per ordered pair with positive demand,
// each starting at a random phase. Each packet picks its next hop by a
// seeded weighted draw; links are drop-tail FIFO queues holding at most
// queue_capacity_packets packets, including the one being transmitted.
FlowStats run(const SimTopology& topo, std::span<const double> demand,
              const RoutingTable& table, const SimConfig& cfg);

void write_flow_csv(std::ostream& out, const SimTopology& topo, const FlowStats& s);
void write_link_util_csv(std::ostream& out, const SimTopology& topo, const FlowStats& s);

struct PerturbationRow {
  double gamma;
  double load;
  double mean_delay_ms;
  double loss_rate;
  double mean_queuing_ms;
};

// For each gamma, rebuilds the gravity matrix from perturbed populations
// (seeded by cfg.seed) and the routing for it, then simulates each load as a
// fraction of aggregate_gbps. `sites` must be in topology node order.
std::vector<PerturbationRow> perturbation_experiment(
    const SimTopology& topo, std::span<const Site> sites,
    std::span<const double> gammas, std::span<const double> loads,
    double aggregate_gbps, RoutingScheme scheme, const SimConfig& cfg);

void write_perturbation_csv(std::ostream& out, std::span<const PerturbationRow> rows);

}  // namespace hybridnet
