#pragma once
/**
 * @file supervision.hpp
 * @brief One-stop supervision bundle for a scenario: the target-lane
 *        label, the snapped spatial target, the detected collision set,
 *        and the combined loss breakdown, tied to the source scenario by
 *        its content hash.
 */

#include <string>

#include "pgs/lanes.hpp"
#include "pgs/losses.hpp"
#include "pgs/ntps.hpp"
#include "pgs/scenario.hpp"
#include "pgs/stps.hpp"

namespace pgs {

struct SupervisionRecord {
    RelevantLaneSet relevant_lanes;
    TargetLaneLabel target_lane;
    std::array<double, 3> lane_scores{0.0, 0.0, 0.0};  // (left, current, right)
    SpatialTarget spatial_target;
    CollisionSet collision_set;
    LossBreakdown losses;
    std::string scenario_hash;
};

/**
 * Derive the full supervision bundle for `pred` against a scenario:
 * relevant lanes and rule-based scores at the ego pose, the target-lane
 * label from the expert trajectory, the expert snapped onto the labeled
 * centerline, collisions of `pred` against the agents' top-mode futures,
 * and the weighted loss combination.
 */
SupervisionRecord build_supervision_record(const ScenarioSpec& scenario, const Trajectory& pred,
                                           const LossWeights& weights = {},
                                           const std::optional<ClassWeights>& class_weights =
                                               std::nullopt);

}  // namespace pgs
