#include "hybridnet/traffic.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "hybridnet/csv.h"
#include "hybridnet/error.h"
#include "hybridnet/rng.h"

namespace hybridnet {

TrafficMatrix::TrafficMatrix(std::vector<std::string> site_ids,
                             std::vector<double> raw)
    : ids_(std::move(site_ids)), h_(std::move(raw)) {
  const std::size_t n = ids_.size();
  if (h_.size() != n * n) {
    throw InputError("traffic matrix has " + std::to_string(h_.size()) +
                     " entries for " + std::to_string(n) + " sites");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = h_[i * n + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InputError("traffic entries must be finite and non-negative");
      }
      if (i == j && v != 0.0) throw InputError("traffic diagonal must be zero");
      sum += v;
    }
  }
  if (!(sum > 0.0)) throw InputError("traffic matrix is all zero");
  for (double& v : h_) v /= sum;
}

double TrafficMatrix::total() const {
  return std::accumulate(h_.begin(), h_.end(), 0.0);
}

TrafficMatrix TrafficMatrix::embed(std::span<const std::string> universe) const {
  std::vector<std::size_t> where(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto it = std::find(universe.begin(), universe.end(), ids_[i]);
    if (it == universe.end()) throw InputError("site " + ids_[i] + " not in universe");
    where[i] = static_cast<std::size_t>(it - universe.begin());
  }
  const std::size_t m = universe.size();
  std::vector<double> raw(m * m, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      raw[where[i] * m + where[j]] += (*this)(i, j);
    }
  }
  return TrafficMatrix({universe.begin(), universe.end()}, std::move(raw));
}

TrafficMatrix TrafficMatrix::read_csv(const std::string& path,
                                      std::span<const std::string> site_ids) {
  const CsvTable t = CsvTable::read_file(path);
  const std::size_t n = site_ids.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[site_ids[i]] = i;
  std::vector<double> raw(n * n, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto s = index.find(t.text(r, "src"));
    auto d = index.find(t.text(r, "dst"));
    if (s == index.end() || d == index.end()) {
      throw InputError(path + ": unknown site in row " + std::to_string(r + 1));
    }
    raw[s->second * n + d->second] += t.number(r, "weight");
  }
  return TrafficMatrix({site_ids.begin(), site_ids.end()}, std::move(raw));
}

void TrafficMatrix::write_csv(std::ostream& out) const {
  out << "src,dst,weight\n";
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      if ((*this)(i, j) > 0.0) {
        out << ids_[i] << ',' << ids_[j] << ',' << format_double((*this)(i, j))
            << '\n';
      }
    }
  }
}

std::vector<std::string> ids_of(std::span<const Site> sites) {
  std::vector<std::string> ids;
  ids.reserve(sites.size());
  for (const Site& s : sites) ids.push_back(s.id);
  return ids;
}

TrafficMatrix gravity_matrix(std::span<const Site> sites) {
  const std::size_t n = sites.size();
  if (n < 2) throw InputError("gravity model needs at least two sites");
  for (const Site& s : sites) {
    if (!(s.population > 0.0)) throw InputError("population must be positive: " + s.id);
  }
  std::vector<double> raw(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) raw[i * n + j] = sites[i].population * sites[j].population;
    }
  }
  return TrafficMatrix(ids_of(sites), std::move(raw));
}

TrafficMatrix inter_dc_matrix(std::span<const Site> dcs) {
  const std::size_t n = dcs.size();
  if (n < 2) throw InputError("inter-DC traffic needs at least two data centers");
  std::vector<double> raw(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) raw[i * n + i] = 0.0;
  return TrafficMatrix(ids_of(dcs), std::move(raw));
}

TrafficMatrix dc_edge_matrix(std::span<const Site> cities,
                             std::span<const Site> dcs) {
  if (cities.empty() || dcs.empty()) {
    throw InputError("DC-edge traffic needs cities and data centers");
  }
  std::vector<std::string> ids = ids_of(cities);
  for (const Site& d : dcs) ids.push_back(d.id);
  const std::size_t n = ids.size();
  std::vector<double> raw(n * n, 0.0);
  for (std::size_t c = 0; c < cities.size(); ++c) {
    std::size_t best = 0;
    double best_d = geodesic_km(cities[c].location, dcs[0].location);
    for (std::size_t k = 1; k < dcs.size(); ++k) {
      const double d = geodesic_km(cities[c].location, dcs[k].location);
      if (d < best_d || (d == best_d && dcs[k].id < dcs[best].id)) {
        best = k;
        best_d = d;
      }
    }
    const std::size_t dc = cities.size() + best;
    // Requests and responses: the city's weight is split over both
    // directions.
    raw[c * n + dc] += cities[c].population / 2.0;
    raw[dc * n + c] += cities[c].population / 2.0;
  }
  return TrafficMatrix(std::move(ids), std::move(raw));
}

TrafficMatrix mix(std::span<const TrafficMatrix> matrices,
                  std::span<const double> ratios) {
  if (matrices.empty() || matrices.size() != ratios.size()) {
    throw InputError("mix needs one ratio per matrix");
  }
  const auto& ids = matrices[0].site_ids();
  double ratio_sum = 0.0;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    if (matrices[k].site_ids() != ids) {
      throw InputError("mixed matrices must share the same site list");
    }
    if (!(ratios[k] >= 0.0)) throw InputError("mix ratios must be non-negative");
    ratio_sum += ratios[k];
  }
  if (!(ratio_sum > 0.0)) throw InputError("mix ratios are all zero");
  const std::size_t n = ids.size();
  std::vector<double> raw(n * n, 0.0);
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    if (ratios[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        raw[i * n + j] += ratios[k] * matrices[k](i, j);
      }
    }
  }
  return TrafficMatrix(ids, std::move(raw));
}

std::vector<Site> perturb_populations(std::span<const Site> sites, double gamma,
                                      std::uint64_t seed) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("gamma must be in [0, 1]");
  Rng rng(seed);
  std::vector<Site> out(sites.begin(), sites.end());
  for (Site& s : out) {
    s.population *= 1.0 - gamma + 2.0 * gamma * rng.uniform01();
  }
  return out;
}

TrafficMatrix perturb(std::span<const Site> sites, double gamma,
                      std::uint64_t seed) {
  return gravity_matrix(perturb_populations(sites, gamma, seed));
}

}  // namespace hybridnet
