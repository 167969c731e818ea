#include "hybridnet/site.h"

#include <ostream>
#include <set>

#include "hybridnet/csv.h"
#include "hybridnet/error.h"

namespace hybridnet {

std::vector<Site> read_sites_csv(const std::string& path) {
  const CsvTable t = CsvTable::read_file(path);
  std::vector<Site> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Site s{t.text(r, "id"), GeoPoint(t.number(r, "lat"), t.number(r, "lon")),
           t.optional_number(r, "population").value_or(1.0)};
    if (!seen.insert(s.id).second) {
      throw InputError(path + ": duplicate site id " + s.id);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_sites_csv(std::ostream& out, std::span<const Site> sites) {
  out << "id,lat,lon,population\n";
  for (const Site& s : sites) {
    out << s.id << ',' << format_double(s.location.lat()) << ','
        << format_double(s.location.lon()) << ',' << format_double(s.population)
        << '\n';
  }
}

std::size_t find_site(std::span<const Site> sites, const std::string& id) {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].id == id) return i;
  }
  throw InputError("unknown site " + id);
}

std::vector<std::vector<double>> geodesic_matrix(std::span<const Site> sites) {
  const std::size_t n = sites.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i][j] = d[j][i] = geodesic_km(sites[i].location, sites[j].location);
    }
  }
  return d;
}

}  // namespace hybridnet
