#pragma once
/**
 * @file stps.hpp
 * @brief Centerline-aligned spatial target trajectories and their L1
 *        supervision loss with analytical subgradient.
 */

#include <cstdint>
#include <vector>

#include "pgs/geometry.hpp"
#include "pgs/trajectory.hpp"

namespace pgs {

/// Default snap threshold: about half a lane plus control slack, so
/// lane-keeping noise snaps while genuine departures are retained.
inline constexpr double kDefaultSnapThreshold = 2.0;  // meters

/// Expert trajectory with points within the snap threshold replaced by
/// their nearest centerline vertex. Unsnapped points are the original
/// expert points, kept for smoothness.
struct SpatialTarget {
    Trajectory target;
    std::vector<std::uint8_t> snapped;  // per-point flags
    double snap_threshold = kDefaultSnapThreshold;
};

/**
 * Snap each trajectory point to the nearest centerline vertex when the
 * vertex lies within `snap_threshold`; retain the original point
 * otherwise. The centerline is expected to be densified already.
 */
SpatialTarget generate_spatial_target(const Trajectory& gt, const Polyline& target_centerline,
                                      double snap_threshold);

/// Mean per-point L1 distance between `pred` and the spatial target:
/// (1/N) * sum_t (|dx_t| + |dy_t|). Throws LengthMismatchError when the
/// lengths or step sizes differ.
double stps_loss(const Trajectory& pred, const SpatialTarget& spatial_target);

/// Component-wise subgradient (1/N) * sign(pred - target), with
/// sign(0) := 0. Throws LengthMismatchError as stps_loss.
std::vector<Point2> stps_gradient(const Trajectory& pred, const SpatialTarget& spatial_target);

}  // namespace pgs
