#pragma once
/**
 * @file lanes.hpp
 * @brief Relevant-lane filtering, target-lane labeling, and the
 *        lane-selection cross-entropy loss.
 *
 * A lane is relevant when its centerline passes close to the ego: within
 * half a lane width it is the current lane; between half and one-and-a-half
 * widths it is the left or right neighbor depending on which side of the
 * ego heading the nearest centerline point falls.
 */

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pgs/geometry.hpp"
#include "pgs/trajectory.hpp"

namespace pgs {

/// Matching window over the trajectory tail used for target-lane labeling.
inline constexpr double kDefaultMatchHorizon = 2.0;  // seconds

/// Slot order matches the score vector layout everywhere: left, current, right.
enum class LaneSlot { Left = 0, Current = 1, Right = 2 };

const char* to_string(LaneSlot slot);

struct Lane {
    std::string id;
    Polyline centerline;
    double width = 3.5;  // meters, > 0
    std::vector<std::string> successors;
};

struct LaneCandidate {
    LaneSlot slot = LaneSlot::Current;
    std::string lane_id;
    double d = 0.0;    // min vertex distance from the ego position
    double phi = 0.0;  // side sign at the nearest vertex (negative = left)
    Polyline centerline;
};

/// The filtered (left, current, right) triple; an absent slot means no
/// lane qualified for it.
struct RelevantLaneSet {
    std::optional<LaneCandidate> left;
    std::optional<LaneCandidate> current;
    std::optional<LaneCandidate> right;

    const std::optional<LaneCandidate>& slot(LaneSlot s) const;
    std::optional<LaneCandidate>& slot(LaneSlot s);
    bool empty() const { return !left && !current && !right; }
};

struct TargetLaneLabel {
    LaneSlot slot = LaneSlot::Current;
    double mean_terminal_distance = 0.0;  // meters
};

/**
 * Assign lanes to the (left, current, right) slots around the ego.
 *
 * For each lane, d is the minimum vertex distance from the ego position
 * and phi the side sign at that nearest vertex. Bands: d <= 0.5*W is
 * current; d in (0.5*W, 1.5*W] is left when phi < 0 and right when
 * phi > 0. When several lanes qualify for a slot the smallest d wins,
 * ties broken by lexicographic lane id.
 *
 * Throws EmptyMapError when `lanes` is empty.
 */
RelevantLaneSet filter_relevant_lanes(const std::vector<Lane>& lanes, const Pose2& ego,
                                      double lane_width);

/**
 * Label the slot whose centerline best matches the trajectory tail.
 *
 * Averages, over the last ceil(match_horizon / dt) trajectory points, the
 * discrete nearest distance to each present candidate's centerline and
 * returns the slot with the minimal average. Ties resolve in the order
 * Current > Left > Right.
 *
 * Throws NoCandidatesError when all slots are absent and
 * TrajectoryTooShortError when the trajectory has fewer points than the
 * window.
 */
TargetLaneLabel label_target_lane(const RelevantLaneSet& relevant, const Trajectory& gt_traj,
                                  double match_horizon = kDefaultMatchHorizon);

/// Class weights in slot order (left, current, right).
using ClassWeights = std::array<double, 3>;

/// Inverse class-frequency weights for the (left, current, right) slots.
/// Lane keeping dominates recorded driving, so the side slots are rare
/// and weighted up.
inline constexpr ClassWeights kInverseFrequencyWeights = {32.480, 1.074, 26.505};

/**
 * Cross-entropy over the 3-way softmax of the slot scores.
 *
 * Scores are ordered (left, current, right); absent slots still occupy a
 * score position. With class weights the loss is scaled by the label
 * slot's weight. An optional presence mask switches to a masked softmax
 * over present slots only.
 *
 * Throws LabelAbsentError when the mask excludes the label slot.
 */
double mtps_loss(const std::array<double, 3>& scores, const TargetLaneLabel& label,
                 const std::optional<ClassWeights>& class_weights = std::nullopt,
                 const std::optional<std::array<bool, 3>>& present_mask = std::nullopt);

/// Analytical gradient of mtps_loss with respect to the scores:
/// w[label] * (softmax(scores) - onehot(label)). Sums to 0 when unweighted.
std::array<double, 3> mtps_score_gradient(
    const std::array<double, 3>& scores, const TargetLaneLabel& label,
    const std::optional<ClassWeights>& class_weights = std::nullopt,
    const std::optional<std::array<bool, 3>>& present_mask = std::nullopt);

}  // namespace pgs
