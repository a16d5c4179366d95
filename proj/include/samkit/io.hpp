#pragma once

#include "samkit/cables.hpp"
#include "samkit/datagen.hpp"
#include "samkit/evaluation.hpp"
#include "samkit/plant.hpp"
#include "samkit/pose_estimation.hpp"
#include "samkit/workspace.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace samkit {

using nlohmann::json;

/// Row-major 16-element array.
json transform_to_json(const RigidTransform& T);
/// Throws DomainError unless 16 numbers with a rigid upper-left 3x3 and a [0 0 0 1] last row.
RigidTransform transform_from_json(const json& j);

json frame_to_json(const FrameEstimate& f);
json cables_to_json(const CableDeltas& c);
json joints_to_json(const JointConfig& q);

json plant_state_to_json(const PlantState& s);
PlantState plant_state_from_json(const json& j);

/// `[{label, points: [[x,y,z], ...]}, ...]`
json clouds_to_json(const std::vector<MarkerCloud>& clouds);
std::vector<MarkerCloud> clouds_from_json(const json& j);

/// One CSV per translation set (trans_<i>.csv, header t,q1_cmd..q7_cmd,q1_phy..q7_phy)
/// with a JSON sidecar (seed, plant hash, q1, split), plus dataset.json listing them.
void write_dataset(const Dataset& ds, const std::string& dir);
/// Throws ConfigError on missing or malformed files.
Dataset read_dataset(const std::string& dir);

/// Joint trajectory CSV with header t,q1..q7.
void write_joint_csv(const std::vector<JointConfig>& qs, const std::string& path);
std::vector<JointConfig> read_joint_csv(const std::string& path);

void write_tracking_csv(const std::vector<TrackingReport>& reps, const std::string& path);
json tracking_to_json(const TrackingReport& rep);
void write_box_csv(const BoxReport& rep, const std::string& path);
json box_to_json(const BoxReport& rep);

/// CSV q1_max,volume_mm3,mode.
void write_workspace_csv(const WorkspaceReport& rep, const std::string& path);
/// Bounds, voxel size and run-length-encoded occupancy ([value, count] pairs, x fastest).
json voxel_dump(const WorkspaceGrid& grid);

void write_json(const json& j, const std::string& path);
json read_json(const std::string& path);
void write_text(const std::string& text, const std::string& path);

}  // namespace samkit
