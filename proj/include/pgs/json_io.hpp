#pragma once
/**
 * @file json_io.hpp
 * @brief UTF-8 JSON (de)serialization for scenarios and result records.
 *
 * Field names follow the domain types; angles are radians, distances
 * meters, coordinates in the global frame. Numbers are serialized with
 * full round-trip precision and object keys are emitted sorted, so equal
 * values produce byte-identical payloads. Result records embed the tool
 * version and a hash of the canonical scenario form.
 */

#include <string>
#include <vector>

#include <json.hpp>

#include "pgs/lanes.hpp"
#include "pgs/losses.hpp"
#include "pgs/ntps.hpp"
#include "pgs/scenario.hpp"
#include "pgs/simulate.hpp"
#include "pgs/stps.hpp"
#include "pgs/supervision.hpp"
#include "pgs/version.hpp"

namespace pgs {

using Json = nlohmann::json;

Json scenario_to_json(const ScenarioSpec& scenario);
ScenarioSpec scenario_from_json(const Json& j);

/// Canonical serialized form: sorted keys, 2-space indent, newline-terminated.
std::string canonical_json(const Json& j);

/// FNV-1a 64 over the canonical scenario form, as a hex string.
std::string scenario_hash(const ScenarioSpec& scenario);

/// Record skeleton carrying tool_version and scenario_hash.
Json record_envelope(const ScenarioSpec& scenario);

/// Load, finalize, and validate a scenario file. Throws ParseError on
/// malformed input and ValidationError on invariant violations.
ScenarioSpec load_scenario(const std::string& path);

void save_scenario(const ScenarioSpec& scenario, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json trajectory_to_json(const Trajectory& traj);
/// Accepts a bare trajectory object or any record with a "trajectory" key.
Trajectory trajectory_from_json(const Json& j);

Json candidate_to_json(const LaneCandidate& cand);
Json relevant_lanes_to_json(const RelevantLaneSet& relevant);
Json label_to_json(const TargetLaneLabel& label);
Json spatial_target_to_json(const SpatialTarget& target);
Json collision_set_to_json(const CollisionSet& collisions);
Json breakdown_to_json(const LossBreakdown& breakdown);
Json weights_to_json(const LossWeights& weights);
Json metrics_to_json(const Metrics& metrics);
Json step_trace_to_json(const StepTrace& row);
StepTrace step_trace_from_json(const Json& j);
Json finite_diff_report_to_json(const FiniteDiffReport& report);
Json gradient_to_json(const std::vector<Point2>& gradient);
Json supervision_record_to_json(const SupervisionRecord& record);

/// Line-delimited trace payload: an envelope line followed by one
/// StepTrace object per line.
std::string trace_payload(const ScenarioSpec& scenario, const std::vector<StepTrace>& trace);

}  // namespace pgs
