#pragma once
/**
 * @file ntps.hpp
 * @brief Future oriented-box sequences, SAT-based collision detection,
 *        and the hinge repulsion loss with analytical gradient.
 *
 * Detected overlaps between future ego and agent boxes become negative
 * supervision: every overlapping (timestep, agent) pair contributes a
 * hinge term max(0, beta - center_distance) that pushes the ego
 * trajectory point away from the agent's predicted position.
 */

#include <string>
#include <vector>

#include "pgs/geometry.hpp"
#include "pgs/trajectory.hpp"

namespace pgs {

/// Default hinge margin: exceeds half the sum of typical vehicle widths,
/// so there is a nonzero repulsion band around contact.
inline constexpr double kDefaultCollisionMargin = 3.0;  // meters

/// Center distances below this make the repulsion direction undefined.
inline constexpr double kDegenerateDistance = 1e-9;  // meters

/// A perceived dynamic agent with multi-modal predicted futures.
struct AgentTrack {
    std::string id;
    double width = 2.0;   // meters, > 0
    double length = 4.5;  // meters, > 0
    Pose2 initial_pose;
    double speed = 0.0;  // meters/second
    struct Mode {
        double score = 0.0;  // in [0, 1]
        Trajectory trajectory;
    };
    std::vector<Mode> modes;
};

/// One oriented box per trajectory step.
struct FutureBoxSequence {
    std::vector<OrientedBox> boxes;
};

/// A detected ego/agent overlap at one timestep.
struct CollisionEvent {
    std::size_t t = 0;  // step index
    std::string agent_id;
    Point2 ego_point;
    Point2 agent_point;
    double center_distance = 0.0;
};

/// Overlap events sorted by (t, agent_id), no duplicate pairs.
struct CollisionSet {
    std::vector<CollisionEvent> events;
    double beta = kDefaultCollisionMargin;  // hinge margin, meters
};

/// How an agent's predicted trajectory is chosen for collision checking.
struct ModePolicy {
    /// When false, only the top-score mode is checked; when true, every
    /// mode with score >= score_threshold is checked and the events are
    /// unioned (duplicate (t, agent) pairs keep the smallest distance).
    bool all_above_threshold = false;
    double score_threshold = 0.3;
};

/// Mode with the highest score; ties keep the lowest index.
const AgentTrack::Mode& top_mode(const AgentTrack& agent);

/// One box per trajectory step, centered on the step point, half-extents
/// (width/2, length/2), headings estimated from trajectory offsets.
FutureBoxSequence build_future_boxes(const Trajectory& traj, double width, double length,
                                     double fallback_heading);

/**
 * SAT overlap check between the ego and every agent at every timestep.
 *
 * Records a CollisionEvent for each overlapping (t, agent) pair carrying
 * both trajectory center points and their distance. Throws
 * HorizonMismatchError when the trajectories do not share dt and length.
 */
CollisionSet detect_collisions(const FutureBoxSequence& ego_boxes, const Trajectory& ego_traj,
                               const std::vector<std::pair<const AgentTrack*, const Trajectory*>>& agents,
                               double beta);

/// Convenience: builds ego boxes and picks agent trajectories by policy,
/// then detects. Mode events above the threshold are unioned.
CollisionSet detect_collisions(const Trajectory& ego_traj, double ego_width, double ego_length,
                               double ego_fallback_heading, const std::vector<AgentTrack>& agents,
                               double beta, const ModePolicy& policy = {});

/// Hinge repulsion: sum over events of max(0, beta - center_distance),
/// using the stored distances.
double ntps_loss(const CollisionSet& collisions);

/// Hinge repulsion evaluated against `ego_traj` with the event set held
/// fixed: distances are recomputed from the trajectory points.
double ntps_loss_at(const Trajectory& ego_traj, const CollisionSet& collisions);

/// Recompute each event's ego point and center distance from `ego_traj`,
/// keeping membership and agent points fixed.
void refresh_event_distances(CollisionSet& collisions, const Trajectory& ego_traj);

/**
 * Gradient of the hinge loss with respect to the ego trajectory points,
 * with the collision set held fixed. Each event with 0 < d < beta adds
 * -(ego_point - agent_point) / d at its step; contributions have unit
 * magnitude. Distances are taken from `ego_traj` at the event steps.
 *
 * Throws DegenerateDistanceError when any active event distance is below
 * kDegenerateDistance.
 */
std::vector<Point2> ntps_gradient(const Trajectory& ego_traj, const CollisionSet& collisions);

}  // namespace pgs
