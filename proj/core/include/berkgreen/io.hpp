#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "berkgreen/elliptic.hpp"
#include "berkgreen/measure.hpp"
#include "berkgreen/metric_space.hpp"
#include "berkgreen/minimization.hpp"

namespace berkgreen {

/// Reads a whole file; InputError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Space file:
///
///   {"vertices": [{"id": "a", "type": "II"}, ...],
///    "edges":    [{"id": "e1", "u": "a", "v": "b", "length": 1.0}, ...],
///    "trees":    [{"attach": "a", "vertices": [...], "edges": [...], "leaf_types": {"p1": "I"}}]}
///
/// "type" defaults to "II"; "trees" may be omitted. Unknown keys are rejected.
/// Errors carry "line L, column C" where the offending object can be located.
SpaceDescription parse_space_description(std::string_view text);
MetricSpace parse_space(std::string_view text);
MetricSpace load_space(const std::filesystem::path& path);
std::string to_json(const SpaceDescription& description);

/// {"trees": [...]} with the same tree schema as the space file.
std::vector<TreeDescription> parse_trees(std::string_view text);

/// Point in a file: {"vertex": "a"} or {"edge": "e1", "offset": 0.3}.
/// Point on the command line: "a" or "e1@0.3".
SpacePoint parse_point(std::string_view text, const MetricGraph& graph);

/// {"atoms": [{"point": {...}, "weight": 0.5}], "densities": [{"edge": "e1", "from": 0, "to": 1, "density": 0.5}]}
SignedMeasure parse_measure(std::string_view text, const MetricGraph& graph);
SignedMeasure load_measure(const std::filesystem::path& path, const MetricGraph& graph);
std::string to_json(const SignedMeasure& measure, const MetricGraph& graph);

/// {"segments": [{"edge": "e1", "from": 0.5, "to": 1.0}], "points": [{...}]}
Region parse_region(std::string_view text, const MetricGraph& graph);

/// {"points": [...]} where each point is a point object or, on a circle
/// model, {"arc": s} for the arc-length position s.
std::vector<SpacePoint> parse_configuration(std::string_view text, const EllipticModel& model);

}  // namespace berkgreen
