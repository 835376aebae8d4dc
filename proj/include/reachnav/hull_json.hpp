#pragma once

#include "reachnav/hull.hpp"
#include "reachnav/reach.hpp"

#include <string>

namespace reachnav {

/// {"dim", "vertices", "normals", "offsets"}
std::string hull_to_json(const Hull& hull);

/// Parses the document written by hull_to_json. Normals must be unit
/// length within kTol.unit_normal; violations throw SchemaError.
Hull hull_from_json(const std::string& text);

/// State-space facets of a reach polytope: {"dim", "time", "normals", "offsets"}.
std::string reach_to_json(const ReachPolytope& reach);

}  // namespace reachnav
