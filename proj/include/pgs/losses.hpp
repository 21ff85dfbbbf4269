#pragma once
/**
 * @file losses.hpp
 * @brief Weighted combination of the three supervision losses, a direct
 *        gradient-descent trajectory optimizer driven by them, and
 *        finite-difference validation of the analytical gradients.
 */

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "pgs/lanes.hpp"
#include "pgs/ntps.hpp"
#include "pgs/stps.hpp"
#include "pgs/trajectory.hpp"

namespace pgs {

struct LossWeights {
    double w_mtps = 1.0;
    double w_stps = 0.3;
    double w_ntps = 1.0;
};

/// Component losses and their weighted sum. The weighted total is always
/// computed as w_mtps*mtps + w_stps*stps + w_ntps*ntps in that order, so
/// repeated evaluations are bit-identical. Imitation and perception
/// training losses are out of scope here and contribute exactly zero.
struct LossBreakdown {
    double mtps = 0.0;
    double stps = 0.0;
    double ntps = 0.0;
    double weighted_total = 0.0;
};

struct MtpsInput {
    std::array<double, 3> scores{0.0, 0.0, 0.0};
    TargetLaneLabel label;
    std::optional<ClassWeights> class_weights;
};

struct StpsInput {
    Trajectory pred;
    SpatialTarget spatial_target;
};

/// Evaluate and combine the supplied components; absent components
/// contribute 0. At least one component must be supplied.
LossBreakdown total_pgs_loss(const std::optional<MtpsInput>& mtps_in,
                             const std::optional<StpsInput>& stps_in,
                             const std::optional<CollisionSet>& ntps_in,
                             const LossWeights& weights = {});

/// Recombine already-evaluated component values with the weights.
LossBreakdown combine_losses(double mtps, double stps, double ntps, const LossWeights& weights);

struct OptimizerConfig {
    double step_size = 0.1;               // meters per unit gradient
    int max_iters = 200;
    double convergence_tol = 1e-6;        // loss delta
    int refresh_collisions_every = 5;     // iterations
};

struct OptimizeResult {
    Trajectory trajectory;     // best-so-far iterate
    LossBreakdown final_loss;  // evaluated at the returned trajectory with a fresh detection
    int iterations = 0;
    std::vector<double> loss_history;  // objective per iteration, index 0 = initial
};

/**
 * Fixed-step gradient descent on w_stps * L_stps + w_ntps * L_ntps over
 * the trajectory points.
 *
 * The spatial target is computed once from `gt` at the start; the
 * collision set is re-detected every refresh_collisions_every iterations
 * and its distances are refreshed from the current iterate in between.
 * Stops at max_iters or when the loss delta falls below convergence_tol.
 * The returned trajectory is the best-so-far iterate by objective value.
 */
OptimizeResult optimize_trajectory(const Trajectory& init, const Polyline& target_centerline,
                                   const Trajectory& gt, const std::vector<AgentTrack>& agents,
                                   const LossWeights& weights, const OptimizerConfig& cfg,
                                   double snap_threshold, double beta,
                                   double ego_width = 2.0, double ego_length = 4.5,
                                   double ego_fallback_heading = 0.0,
                                   const ModePolicy& mode_policy = {});

struct FiniteDiffReport {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::size_t worst_point = 0;  // point index (score index for the lane loss)
    int worst_axis = 0;           // 0 = x, 1 = y
    std::size_t checked = 0;      // coordinates compared
    std::size_t skipped = 0;      // coordinates within 10h of a kink
};

/// Central differences of mtps_loss over the three scores vs the
/// analytical gradient. The softmax is smooth, so nothing is skipped.
FiniteDiffReport finite_diff_check(const MtpsInput& input, double h);

/// Central differences of stps_loss over every prediction coordinate.
/// Coordinates within 10h of the L1 kink (pred == target) are skipped.
FiniteDiffReport finite_diff_check(const StpsInput& input, double h);

/// Central differences of the frozen-set hinge loss over every ego
/// trajectory coordinate. Points involved in an event within 10h of the
/// hinge boundary (d near beta) or near zero distance are skipped.
FiniteDiffReport finite_diff_check(const Trajectory& ego_traj, const CollisionSet& collisions,
                                   double h);

}  // namespace pgs
