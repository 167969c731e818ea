#include "hybridnet/graph.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <utility>

#include "hybridnet/error.h"

namespace hybridnet {
namespace {

void check_node(const WeightedGraph& g, NodeId n) {
  if (n >= g.node_count()) {
    throw InputError("unknown node " + std::to_string(n));
  }
}

bool near_equal(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-10 * std::max(1.0, scale);
}

}  // namespace

NodeId WeightedGraph::add_node() {
  adj_.emplace_back();
  return adj_.size() - 1;
}

EdgeId WeightedGraph::add_edge(NodeId a, NodeId b, double weight) {
  check_node(*this, a);
  check_node(*this, b);
  if (a == b) throw InputError("self-loop on node " + std::to_string(a));
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InputError("edge weight must be positive and finite");
  }
  const EdgeId id = edges_.size();
  edges_.push_back({a, b, weight});
  adj_[a].push_back({b, id});
  adj_[b].push_back({a, id});
  return id;
}

std::vector<double> distances_from(const WeightedGraph& g, NodeId src,
                                   const Exclusions* exclude) {
  check_node(g, src);
  std::vector<double> dist(g.node_count(), kUnreachable);
  if (exclude && exclude->node(src)) return dist;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[src] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Adjacency& adj : g.neighbors(u)) {
      if (exclude && (exclude->edge(adj.edge) || exclude->node(adj.node))) {
        continue;
      }
      const double nd = d + g.edge(adj.edge).weight;
      if (nd < dist[adj.node]) {
        dist[adj.node] = nd;
        heap.push({nd, adj.node});
      }
    }
  }
  return dist;
}

std::optional<Path> shortest_path(const WeightedGraph& g, NodeId src,
                                  NodeId dst, const Exclusions* exclude) {
  check_node(g, src);
  check_node(g, dst);
  if (exclude && (exclude->node(src) || exclude->node(dst))) return std::nullopt;
  if (src == dst) return Path{{src}, {}, 0.0};

  const std::vector<double> to_dst = distances_from(g, dst, exclude);
  const double total = to_dst[src];
  if (total == kUnreachable) return std::nullopt;

  // Walk forward from src, always taking the smallest-id neighbor that stays
  // on some shortest path. This yields the lexicographically smallest
  // optimal node sequence.
  Path path;
  path.nodes.push_back(src);
  NodeId u = src;
  double travelled = 0.0;
  while (u != dst) {
    NodeId best_node = g.node_count();
    EdgeId best_edge = 0;
    double best_w = 0.0;
    for (const Adjacency& adj : g.neighbors(u)) {
      if (exclude && (exclude->edge(adj.edge) || exclude->node(adj.node))) {
        continue;
      }
      const double w = g.edge(adj.edge).weight;
      if (to_dst[adj.node] == kUnreachable) continue;
      if (!near_equal(travelled + w + to_dst[adj.node], total, total)) continue;
      const bool better =
          adj.node < best_node ||
          (adj.node == best_node &&
           (w < best_w || (w == best_w && adj.edge < best_edge)));
      if (better) {
        best_node = adj.node;
        best_edge = adj.edge;
        best_w = w;
      }
    }
    if (best_node == g.node_count()) {
      // Unreachable in exact arithmetic; guards against a broken invariant.
      throw InfeasibleError("shortest path reconstruction failed");
    }
    path.nodes.push_back(best_node);
    path.edges.push_back(best_edge);
    travelled += best_w;
    u = best_node;
  }
  path.total_weight = travelled;
  return path;
}

std::vector<std::vector<std::optional<double>>> all_pairs_site_paths(
    const WeightedGraph& g, std::span<const NodeId> sites) {
  const std::size_t n = sites.size();
  std::vector<std::vector<std::optional<double>>> out(
      n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto dist = distances_from(g, sites[i]);
    out[i][i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist[sites[j]] != kUnreachable) {
        out[i][j] = dist[sites[j]];
        out[j][i] = dist[sites[j]];
      }
    }
  }
  return out;
}

std::vector<Path> tower_disjoint_paths(const WeightedGraph& g, NodeId src,
                                       NodeId dst, std::size_t n,
                                       const Exclusions* exclude) {
  check_node(g, src);
  check_node(g, dst);
  std::vector<Path> out;
  if (n == 0 || src == dst) return out;
  Exclusions ex;
  if (exclude) ex = *exclude;
  ex.nodes.resize(g.node_count(), false);
  ex.edges.resize(g.edge_count(), false);
  while (out.size() < n) {
    auto p = shortest_path(g, src, dst, &ex);
    if (!p) break;
    if (p->nodes.size() == 2) {
      ex.edges[p->edges.front()] = true;
    } else {
      for (std::size_t i = 1; i + 1 < p->nodes.size(); ++i) {
        ex.nodes[p->nodes[i]] = true;
      }
    }
    out.push_back(std::move(*p));
  }
  return out;
}

}  // namespace hybridnet
