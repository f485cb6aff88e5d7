#pragma once

#include "coarseforge/builtins.hpp"
#include "coarseforge/certificate.hpp"
#include "coarseforge/diagram.hpp"
#include "coarseforge/equalizer.hpp"
#include "coarseforge/hhs.hpp"
#include "coarseforge/rips.hpp"

#include <json.hpp>

namespace coarseforge {

using Json = nlohmann::json;

Json rational_to_json(const Rational& q);
Rational rational_from_json(const Json& j);

Json extdist_to_json(const ExtDist& d);

Json control_to_json(const ControlFn& f);
ControlFn control_from_json(const Json& j);

Json point_to_json(const Point& p);
Point point_from_json(const Json& j);

Json certificate_to_json(const Certificate& c);
Json stability_table_to_json(const EqStabilityTable& t);
std::string stability_table_to_csv(const EqStabilityTable& t);
Json sweep_report_to_json(const StabilityReport& r);

/// A loaded document: named spaces, windows, and maps.
struct Workspace {
    std::map<std::string, SpaceHandle> spaces;
    std::map<std::string, std::vector<Point>> windows;
    std::map<std::string, MapTable> maps;

    SpaceHandle space(const std::string& name) const;
    const MapTable& map(const std::string& name) const;
};

/// Loads {"spaces": {...}, "windows": {...}, "maps": {...}}. Unknown space
/// names fall back to the built-in registry.
Workspace load_workspace(const Json& doc);

DiagramSpec diagram_from_json(const Json& doc, const Workspace& ws);
PairwiseFamily family_from_json(const Json& doc, const Workspace& ws);

}  // namespace coarseforge
