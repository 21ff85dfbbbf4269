#include "pgs/lanes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgs/errors.hpp"

namespace pgs {

const char* to_string(LaneSlot slot) {
    switch (slot) {
        case LaneSlot::Left: return "left";
        case LaneSlot::Current: return "current";
        case LaneSlot::Right: return "right";
    }
    return "current";
}

const std::optional<LaneCandidate>& RelevantLaneSet::slot(LaneSlot s) const {
    switch (s) {
        case LaneSlot::Left: return left;
        case LaneSlot::Right: return right;
        case LaneSlot::Current: break;
    }
    return current;
}

std::optional<LaneCandidate>& RelevantLaneSet::slot(LaneSlot s) {
    switch (s) {
        case LaneSlot::Left: return left;
        case LaneSlot::Right: return right;
        case LaneSlot::Current: break;
    }
    return current;
}

namespace {

// Smaller d wins; equal d falls back to lane id order.
bool better_candidate(const LaneCandidate& a, const LaneCandidate& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.lane_id < b.lane_id;
}

void place(std::optional<LaneCandidate>& slot, LaneCandidate cand) {
    if (!slot || better_candidate(cand, *slot)) {
        slot = std::move(cand);
    }
}

}  // namespace

RelevantLaneSet filter_relevant_lanes(const std::vector<Lane>& lanes, const Pose2& ego,
                                      double lane_width) {
    if (lanes.empty()) {
        throw EmptyMapError("lane filter requires a non-empty lane list");
    }
    RelevantLaneSet out;
    for (const Lane& lane : lanes) {
        const NearestVertex nearest = nearest_point_discrete(lane.centerline, ego.position);
        LaneCandidate cand;
        cand.lane_id = lane.id;
        cand.d = nearest.distance;
        cand.phi = signed_side(nearest.point - ego.position, ego.heading);
        cand.centerline = lane.centerline;
        if (cand.d <= 0.5 * lane_width) {
            cand.slot = LaneSlot::Current;
            place(out.current, std::move(cand));
        } else if (cand.d <= 1.5 * lane_width) {
            if (cand.phi < 0.0) {
                cand.slot = LaneSlot::Left;
                place(out.left, std::move(cand));
            } else if (cand.phi > 0.0) {
                cand.slot = LaneSlot::Right;
                place(out.right, std::move(cand));
            }
            // phi == 0 in the side band: collinear with the heading, discarded
        }
    }
    return out;
}

TargetLaneLabel label_target_lane(const RelevantLaneSet& relevant, const Trajectory& gt_traj,
                                  double match_horizon) {
    if (relevant.empty()) {
        throw NoCandidatesError("target-lane labeling requires at least one candidate slot");
    }
    const auto window =
        static_cast<std::size_t>(std::ceil(match_horizon / gt_traj.dt));
    if (gt_traj.points.size() < window || window == 0) {
        throw TrajectoryTooShortError("trajectory shorter than the matching window");
    }
    const std::size_t begin = gt_traj.points.size() - window;

    // Tie preference: current, then left, then right.
    const LaneSlot order[] = {LaneSlot::Current, LaneSlot::Left, LaneSlot::Right};
    TargetLaneLabel best;
    double best_mean = std::numeric_limits<double>::infinity();
    for (LaneSlot s : order) {
        const auto& cand = relevant.slot(s);
        if (!cand) continue;
        double sum = 0.0;
        for (std::size_t i = begin; i < gt_traj.points.size(); ++i) {
            sum += nearest_point_discrete(cand->centerline, gt_traj.points[i]).distance;
        }
        const double mean = sum / static_cast<double>(window);
        if (mean < best_mean) {
            best_mean = mean;
            best = {s, mean};
        }
    }
    return best;
}

namespace {

std::array<double, 3> masked_softmax(const std::array<double, 3>& scores,
                                     const std::array<bool, 3>& mask) {
    double max_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        if (mask[i]) max_score = std::max(max_score, scores[i]);
    }
    std::array<double, 3> probs{0.0, 0.0, 0.0};
    double denom = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (!mask[i]) continue;
        probs[i] = std::exp(scores[i] - max_score);
        denom += probs[i];
    }
    for (int i = 0; i < 3; ++i) probs[i] /= denom;
    return probs;
}

double label_weight(const TargetLaneLabel& label, const std::optional<ClassWeights>& weights) {
    return weights ? (*weights)[static_cast<int>(label.slot)] : 1.0;
}

std::array<bool, 3> effective_mask(const std::optional<std::array<bool, 3>>& mask,
                                   const TargetLaneLabel& label) {
    const std::array<bool, 3> m = mask.value_or(std::array<bool, 3>{true, true, true});
    if (!m[static_cast<int>(label.slot)]) {
        throw LabelAbsentError("label slot was absent at labeling time");
    }
    return m;
}

}  // namespace

double mtps_loss(const std::array<double, 3>& scores, const TargetLaneLabel& label,
                 const std::optional<ClassWeights>& class_weights,
                 const std::optional<std::array<bool, 3>>& present_mask) {
    const auto mask = effective_mask(present_mask, label);
    const auto probs = masked_softmax(scores, mask);
    const double p = probs[static_cast<int>(label.slot)];
    return -label_weight(label, class_weights) * std::log(p);
}

std::array<double, 3> mtps_score_gradient(const std::array<double, 3>& scores,
                                          const TargetLaneLabel& label,
                                          const std::optional<ClassWeights>& class_weights,
                                          const std::optional<std::array<bool, 3>>& present_mask) {
    const auto mask = effective_mask(present_mask, label);
    const auto probs = masked_softmax(scores, mask);
    const double w = label_weight(label, class_weights);
    std::array<double, 3> grad{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        if (!mask[i]) continue;
        const double onehot = (i == static_cast<int>(label.slot)) ? 1.0 : 0.0;
        grad[i] = w * (probs[i] - onehot);
    }
    return grad;
}

}  // namespace pgs
