#pragma once
/**
 * @file trajectory.hpp
 * @brief Fixed-step 2D trajectories and heading estimation from offsets.
 */

#include <cstddef>
#include <vector>

#include "pgs/geometry.hpp"

namespace pgs {

/// Offsets shorter than this are treated as stationary when estimating
/// headings (below controller-relevant resolution).
inline constexpr double kHeadingOffsetEpsilon = 1e-3;

/// Fixed-dt sequence of 2D points; points[i] is at time t0 + i * dt.
struct Trajectory {
    std::vector<Point2> points;
    double dt = 0.5;  // seconds per step, > 0
    double t0 = 0.0;  // seconds
};

bool trajectory_valid(const Trajectory& traj);

/**
 * Per-step headings estimated from trajectory offsets.
 *
 * Heading at step t is atan2 of the forward offset (t -> t+1); the last
 * step reuses the backward offset. Offsets shorter than
 * kHeadingOffsetEpsilon inherit the previous step's heading; a degenerate
 * first offset uses `fallback`.
 */
std::vector<double> headings_from_offsets(const Trajectory& traj, double fallback);

/// Polyline through the trajectory points, merging vertices closer than
/// kMinVertexSpacing. Returns an empty polyline if fewer than 2 distinct
/// points remain.
Polyline trajectory_polyline(const Trajectory& traj);

/// Subsequence of `count` points starting at `start`; indices past the
/// end repeat the final point. t0 advances by start * dt.
Trajectory slice_clamped(const Trajectory& traj, std::size_t start, std::size_t count);

}  // namespace pgs
