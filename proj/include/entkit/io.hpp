#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entkit/coupling.hpp"
#include "entkit/decompose.hpp"
#include "entkit/structure.hpp"

namespace entkit::io {

using nlohmann::json;

/// Round to 12 significant digits before emission, so serialized reports are
/// stable byte-for-byte.
double round12(double x);

/// Set file: JSON lines; a header object then one integer array per line.
std::pair<GroupContext, std::vector<CoordVec>> parse_set_file(const std::string& path);
std::pair<GroupContext, std::vector<CoordVec>> parse_set_stream(std::istream& in,
                                                                const std::string& name);

/// Distribution file: one JSON object {"group":..., "D":..., "mass": [[coords..., p], ...]}.
FinDist parse_dist_file(const std::string& path);
FinDist parse_dist_stream(std::istream& in, const std::string& name);

/// Reads either format; set files become uniform distributions.
FinDist parse_any_as_dist(const std::string& path);

json ctx_to_json(const GroupContext& ctx);
json set_to_json(const GroupContext& ctx, const std::vector<CoordVec>& s);
json dist_to_json(const FinDist& d);
json joint_to_json(const JointDist& j);
json subgroup_to_json(const SubgroupF2& h);
json metric_report_to_json(const MetricReport& r);
json dstar_to_json(const DStarResult& r);
json extraction_to_json(const ExtractionResult& r);
json localize_to_json(const LocalizeResult& r);
json audit_to_json(const ProjectionAudit& a);
json coupling_result_to_json(const ThreeMarginalResult& r);
json decomposition_to_json(const DecompositionResult& r);

void write_set_file(const std::string& path, const GroupContext& ctx,
                    const std::vector<CoordVec>& s);

/// Stable field order, floats at 12 significant digits; empty path = stdout.
void emit(const json& j, const std::string& path);

}  // namespace entkit::io
