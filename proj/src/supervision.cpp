#include "pgs/supervision.hpp"

#include "pgs/json_io.hpp"
#include "pgs/simulate.hpp"

namespace pgs {

SupervisionRecord build_supervision_record(const ScenarioSpec& scenario, const Trajectory& pred,
                                           const LossWeights& weights,
                                           const std::optional<ClassWeights>& class_weights) {
    SupervisionRecord record;
    const LaneScores scored = score_relevant_lanes(scenario, scenario.ego.pose, 0.0);
    record.relevant_lanes = scored.relevant;
    record.lane_scores = scored.scores;
    record.target_lane =
        label_target_lane(scored.relevant, scenario.ego.expert_trajectory);

    const LaneCandidate& target = *scored.relevant.slot(record.target_lane.slot);
    const Polyline centerline = extended_centerline(
        scenario, target.lane_id, polyline_length(route_polyline(scenario)) + 60.0);
    record.spatial_target = generate_spatial_target(
        scenario.ego.expert_trajectory, centerline, scenario.thresholds.w_snap);

    const auto start = static_cast<std::size_t>(std::lround(pred.t0 / scenario.meta.dt_plan));
    record.collision_set = detect_collisions(
        pred, scenario.ego.width, scenario.ego.length, scenario.ego.pose.heading,
        agents_for_window(scenario, start, pred.points.size()), scenario.thresholds.beta);

    const double mtps = mtps_loss(record.lane_scores, record.target_lane, class_weights);
    const double stps = stps_loss(pred, record.spatial_target);
    const double ntps = ntps_loss(record.collision_set);
    record.losses = combine_losses(mtps, stps, ntps, weights);
    record.scenario_hash = scenario_hash(scenario);
    return record;
}

}  // namespace pgs
