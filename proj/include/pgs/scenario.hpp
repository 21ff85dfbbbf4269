#pragma once
/**
 * @file scenario.hpp
 * @brief Scenario description: map lanes, ego setup, scripted agents, and
 *        supervision thresholds, plus the synthetic scenario generators.
 *
 * Coordinates are stored in a global frame (+x east, +y north, radians,
 * counter-clockwise headings). Lane centerlines are densified to the
 * configured vertex spacing when a scenario is finalized, so discrete
 * nearest-vertex rules approximate continuous projection.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgs/lanes.hpp"
#include "pgs/ntps.hpp"
#include "pgs/trajectory.hpp"

namespace pgs {

struct ScenarioMeta {
    double dt_plan = 0.5;          // seconds between trajectory points (2 Hz)
    int horizon_steps = 6;         // planning horizon in dt_plan steps (3 s)
    double default_lane_width = 3.5;
    std::uint64_t seed = 0;
};

struct EgoSpec {
    Pose2 pose;
    double width = 2.0;
    double length = 4.5;
    double speed = 5.0;      // cruise speed, meters/second
    double wheelbase = 2.8;
    Trajectory expert_trajectory;
    std::string command = "LaneFollow";
    std::vector<std::string> route;  // ordered lane ids
};

struct Thresholds {
    double w_snap = 2.0;  // spatial-target snap threshold
    double beta = 3.0;    // collision hinge margin
    std::optional<double> lane_filter_width;  // overrides default_lane_width
    double densify_spacing = 0.5;             // centerline vertex spacing
};

struct ScenarioSpec {
    ScenarioMeta meta;
    std::vector<Lane> lanes;
    EgoSpec ego;
    std::vector<AgentTrack> agents;
    Thresholds thresholds;
};

/// Lane width used by the relevant-lane filter.
double lane_filter_width(const ScenarioSpec& scenario);

/// Normalize headings and densify all lane centerlines. Idempotent.
void finalize_scenario(ScenarioSpec& scenario);

/// Throws ValidationError naming the first violated invariant.
void validate_scenario(const ScenarioSpec& scenario);

const Lane* find_lane(const ScenarioSpec& scenario, const std::string& id);

/// Concatenated centerline of the route lanes, joint duplicates removed.
Polyline route_polyline(const ScenarioSpec& scenario);

/**
 * Centerline of `lane_id` extended along successors until `min_length`
 * is reached (route order preferred, then first successor). Stops at
 * dead ends and on cycles.
 */
Polyline extended_centerline(const ScenarioSpec& scenario, const std::string& lane_id,
                             double min_length);

/// Copies of the scenario agents with every mode trajectory sliced to the
/// window [start, start + n_points), clamp-extended at the script end.
std::vector<AgentTrack> agents_for_window(const ScenarioSpec& scenario, std::size_t start,
                                          std::size_t n_points);

enum class ScenarioKind { Straight3, Curve, Intersection, Overtake, Merge };

/// Parses "straight3", "curve", "intersection", "overtake", "merge".
std::optional<ScenarioKind> parse_scenario_kind(const std::string& name);
const char* to_string(ScenarioKind kind);

/**
 * Deterministic synthetic scenario for the given kind and seed.
 *
 * Expert trajectories carry seeded lateral noise. The overtake kind
 * places a stopped vehicle in the ego lane (the expert drives through
 * it); the merge kind has an agent converging into the ego lane and then
 * driving slowly ahead.
 */
ScenarioSpec generate_synthetic(ScenarioKind kind, std::uint64_t seed);

}  // namespace pgs
