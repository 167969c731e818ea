#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace hybridnet {

using NodeId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  NodeId a;
  NodeId b;
  double weight;

  NodeId other(NodeId n) const { return n == a ? b : a; }
};

struct Adjacency {
  NodeId node;
  EdgeId edge;
};

// Undirected graph with positive edge weights. Nodes are dense indices and
// the index order is the node-id order used for tie-breaking. Parallel edges
// are allowed; self-loops are not.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t nodes) : adj_(nodes) {}

  NodeId add_node();
  EdgeId add_edge(NodeId a, NodeId b, double weight);

  std::size_t node_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Adjacency> neighbors(NodeId n) const { return adj_.at(n); }

 private:
  std::vector<std::vector<Adjacency>> adj_;
  std::vector<Edge> edges_;
};

struct Path {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  double total_weight = 0.0;

  std::size_t hop_count() const { return edges.size(); }
};

// Nodes and edges a query may not use. Vectors may be empty (nothing
// excluded) or sized to the graph.
struct Exclusions {
  std::vector<bool> nodes;
  std::vector<bool> edges;

  bool node(NodeId n) const { return n < nodes.size() && nodes[n]; }
  bool edge(EdgeId e) const { return e < edges.size() && edges[e]; }
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

// Single-source distances (Dijkstra). Unreachable nodes get kUnreachable.
// An excluded source yields all-unreachable.
std::vector<double> distances_from(const WeightedGraph& g, NodeId src,
                                   const Exclusions* exclude = nullptr);

// Minimum-weight path. Among equal-weight paths the lexicographically
// smallest node sequence wins; parallel edges tie-break on weight then id.
// Returns nullopt when dst is unreachable. Throws InputError on unknown ids.
std::optional<Path> shortest_path(const WeightedGraph& g, NodeId src,
                                  NodeId dst,
                                  const Exclusions* exclude = nullptr);

// Symmetric matrix of shortest-path weights between the given nodes;
// nullopt entries mark disconnected pairs.
std::vector<std::vector<std::optional<double>>> all_pairs_site_paths(
    const WeightedGraph& g, std::span<const NodeId> sites);

// Successive shortest paths between src and dst, removing the interior
// nodes of every path found before searching for the next one. A direct
// src-dst edge has no interior nodes, so that edge is removed instead.
// Returns fewer than n paths when the endpoints become disconnected.
std::vector<Path> tower_disjoint_paths(const WeightedGraph& g, NodeId src,
                                       NodeId dst, std::size_t n,
                                       const Exclusions* exclude = nullptr);

}  // namespace hybridnet
