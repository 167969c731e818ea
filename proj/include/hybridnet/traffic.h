#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hybridnet/site.h"

namespace hybridnet {

// Relative demand between ordered site pairs. Entries are non-negative, the
// diagonal is zero and all entries sum to 1. Absolute rates come from
// multiplying by an aggregate rate downstream.
class TrafficMatrix {
 public:
  TrafficMatrix() = default;
  // Normalizes raw non-negative weights. Throws InputError on a size
  // mismatch, negative or non-finite entries, a non-zero diagonal or an
  // all-zero matrix.
  TrafficMatrix(std::vector<std::string> site_ids, std::vector<double> raw);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& site_ids() const { return ids_; }
  double operator()(std::size_t s, std::size_t t) const { return h_[s * size() + t]; }
  // Demand between i and j in both directions.
  double pair_weight(std::size_t i, std::size_t j) const {
    return (*this)(i, j) + (*this)(j, i);
  }
  double total() const;

  // Same demand expressed over a larger site list; every current site must
  // appear in universe.
  TrafficMatrix embed(std::span<const std::string> universe) const;

  // CSV src,dst,weight. Rows may name pairs in any order; the site order is
  // taken from `site_ids`.
  static TrafficMatrix read_csv(const std::string& path,
                                std::span<const std::string> site_ids);
  void write_csv(std::ostream& out) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> h_;
};

std::vector<std::string> ids_of(std::span<const Site> sites);

// h_ij proportional to p_i * p_j. Needs at least two sites with positive
// populations.
TrafficMatrix gravity_matrix(std::span<const Site> sites);

// Equal demand between every pair of data centers.
TrafficMatrix inter_dc_matrix(std::span<const Site> dcs);

// Each city exchanges traffic with its geodesically nearest data center
// (ties to the smaller id), weighted by city population. The matrix is over
// cities followed by data centers.
TrafficMatrix dc_edge_matrix(std::span<const Site> cities,
                             std::span<const Site> dcs);

// Weighted combination of matrices over the same sites, renormalized.
TrafficMatrix mix(std::span<const TrafficMatrix> matrices,
                  std::span<const double> ratios);

// Populations scaled by independent draws from U[1 - gamma, 1 + gamma].
std::vector<Site> perturb_populations(std::span<const Site> sites, double gamma,
                                      std::uint64_t seed);

// Gravity matrix over perturbed populations.
TrafficMatrix perturb(std::span<const Site> sites, double gamma,
                      std::uint64_t seed);

}  // namespace hybridnet
