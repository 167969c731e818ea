#pragma once

#include <span>
#include <string>
#include <vector>

#include "hybridnet/geo.h"

namespace hybridnet {

// A population center or data center the network interconnects.
struct Site {
  std::string id;
  GeoPoint location;
  double population = 1.0;
};

// CSV with header id,lat,lon[,population]. Missing population reads as 1.
std::vector<Site> read_sites_csv(const std::string& path);
void write_sites_csv(std::ostream& out, std::span<const Site> sites);

// Index of the site with the given id, or throws InputError.
std::size_t find_site(std::span<const Site> sites, const std::string& id);

// Pairwise geodesic distances in km.
std::vector<std::vector<double>> geodesic_matrix(std::span<const Site> sites);

}  // namespace hybridnet
