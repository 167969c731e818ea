#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybridnet/capacity.h"
#include "hybridnet/designer.h"
#include "hybridnet/fiber.h"
#include "hybridnet/los.h"
#include "hybridnet/simnet.h"
#include "hybridnet/weather.h"

namespace hybridnet {

using Json = nlohmann::ordered_json;

// Design instance: sites plus dense row-major matrices (null marks an absent
// microwave or fiber option) and the budget.
Json to_json(const DesignInput& in);
DesignInput design_input_from_json(const Json& j);

Json to_json(const StretchStats& s);

// {built_links, per_pair_stretch, stats, towers_used, objective}
Json to_json(const DesignInput& in, const NetworkDesign& d);
// Built links of a design document written by the function above.
std::vector<LinkKey> built_links_from_json(const DesignInput& in, const Json& j);

// FeatureCollection with one LineString per link that carries traffic:
// built microwave links through their towers when `hops` is given, fiber
// links as straight site-site segments.
Json design_geojson(const DesignInput& in, const NetworkDesign& d,
                    std::span<const LinkHops> hops = {});

Json to_json(const SimTopology& t);
SimTopology sim_topology_from_json(const Json& j);

Json to_json(const DesignInput& in, const AugmentationPlan& p, const MwCost& c);
Json to_json(const LeaseCost& c);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace hybridnet
