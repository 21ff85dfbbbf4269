#pragma once
/**
 * @file simulate.hpp
 * @brief Desk-scale closed-loop harness: kinematic ego, speed-dependent
 *        aim-point PID tracking, scripted agents, three planner policies,
 *        and simplified run metrics.
 *
 * The loop plans at the scenario's trajectory cadence (2 Hz by default)
 * and controls/steps at 20 Hz. Agents replay their scripted trajectories
 * and ignore the ego. All randomness flows from one explicit seed.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include "pgs/geometry.hpp"
#include "pgs/lanes.hpp"
#include "pgs/losses.hpp"
#include "pgs/rng.hpp"
#include "pgs/scenario.hpp"
#include "pgs/trajectory.hpp"

namespace pgs {

struct EgoState {
    Pose2 pose;
    double speed = 0.0;  // meters/second, >= 0
    double width = 2.0;
    double length = 4.5;
    double wheelbase = 2.8;
};

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
};

struct PIDConfig {
    double near_aim = 4.0;         // meters, low-speed look-ahead
    double far_aim = 10.0;         // meters, high-speed look-ahead
    double speed_threshold = 6.5;  // meters/second; at the threshold the far aim is used
    PidGains lateral{1.0, 0.0, 0.1};
    PidGains longitudinal{0.5, 0.05, 0.0};
    double integral_clamp = 1.0;
};

/// Actuation limits for the kinematic bicycle.
struct VehicleLimits {
    double max_steer_angle = 35.0 * kPi / 180.0;  // radians at |steer| = 1
    double max_accel = 3.0;        // meters/second^2 at full throttle
    double max_brake_decel = 6.0;  // meters/second^2 at full brake
};

/// steer in [-1, 1] (negative steers left), throttle and brake in [0, 1].
struct Control {
    double steer = 0.0;
    double throttle = 0.0;
    double brake = 0.0;
};

/// Integrator and derivative memory carried between control steps.
struct PIDState {
    double lat_integral = 0.0;
    double lat_prev_error = 0.0;
    bool lat_has_prev = false;
    double lon_integral = 0.0;
    double lon_prev_error = 0.0;
    bool lon_has_prev = false;
};

enum class PlannerType { Replay, CenterlineFollow, PgsFull };

struct PlannerKind {
    PlannerType type = PlannerType::CenterlineFollow;
    double noise_sigma = 0.0;  // per-point lateral noise for Replay, meters
};

struct StepTrace {
    double time = 0.0;
    EgoState ego;
    Control control;
    Trajectory planned;
    std::optional<LaneSlot> chosen_lane;
    std::vector<std::uint8_t> collision_flags;  // one per agent
};

struct Metrics {
    int collisions = 0;
    double lane_departure_fraction = 0.0;  // steps with centerline distance > 0.5 * W
    double route_completion = 0.0;         // arc-length fraction of the route
    bool success = false;                  // completion >= 0.95 and no collisions
    double mean_speed = 0.0;
};

struct SimConfig {
    double dt_sim = 0.05;        // seconds per integration step (20 Hz)
    double replan_period = 0.5;  // seconds between plans (2 Hz)
    double max_time = 0.0;       // seconds; 0 derives a timeout from the expert duration
    double route_end_tolerance = 0.5;  // remaining route arc that counts as arrival
    PIDConfig pid;
    VehicleLimits limits;
};

/**
 * Look-ahead point on the tracked path: the ego position is projected
 * onto the path and the point near_aim (below the speed threshold) or
 * far_aim (at or above it) meters further along is returned, clamped to
 * the path end.
 */
Point2 pid_aim_point(const Polyline& path, const EgoState& ego, const PIDConfig& cfg);

/// Lateral PID on the heading error to the aim point and longitudinal PID
/// on the speed error. Outputs are clamped to their ranges; `state`
/// carries the integrals and previous errors across calls.
Control pid_control(const EgoState& ego, const Point2& aim, double target_speed,
                    const PIDConfig& cfg, PIDState& state, double dt);

/// Kinematic bicycle, explicit Euler. Speed never goes negative. Turn
/// radius is wheelbase / tan(|steer| * max_steer_angle); negative steer
/// turns left (counter-clockwise).
EgoState step_ego(const EgoState& ego, const Control& control, double dt,
                  const VehicleLimits& limits = {});

struct WorldSnapshot {
    const ScenarioSpec* scenario = nullptr;
    Pose2 ego_pose;
    double ego_speed = 0.0;
    double time = 0.0;
};

struct PlanResult {
    Trajectory trajectory;
    std::optional<LaneSlot> chosen_lane;
};

/// Relevant lanes plus the rule-based slot scores used for lane
/// selection: the free distance ahead of the ego along each candidate
/// centerline, normalized by the scoring look-ahead. Absent slots keep
/// their score position with a zero score.
struct LaneScores {
    RelevantLaneSet relevant;
    std::array<double, 3> scores{0.0, 0.0, 0.0};  // (left, current, right)
    std::array<double, 3> free_distance{0.0, 0.0, 0.0};  // meters
};

LaneScores score_relevant_lanes(const ScenarioSpec& scenario, const Pose2& ego_pose,
                                double time);

/**
 * One planning step.
 *
 * Replay slices the expert trajectory at the current time, optionally
 * adding seeded per-point lateral noise. CenterlineFollow filters the
 * relevant lanes, scores each candidate by the free distance ahead of the
 * ego (first SAT intrusion of any agent's predicted boxes along the
 * candidate centerline) and emits a constant-speed trajectory along the
 * winner. PgsFull additionally refines that trajectory with the
 * supervision-driven optimizer.
 *
 * Throws NoCandidatesError when the lane filter comes back empty and the
 * planner is not Replay.
 */
PlanResult plan(const WorldSnapshot& world, const PlannerKind& kind, double horizon,
                double dt_plan, Rng& rng);

struct RunResult {
    Metrics metrics;
    std::vector<StepTrace> trace;
};

/// Closed-loop run: plan at the replan cadence, control and integrate at
/// dt_sim, SAT-check the ego against every scripted agent each step, and
/// stop on route end, collision, or timeout. Deterministic given the
/// scenario, planner, and config.
RunResult run(const ScenarioSpec& scenario, const PlannerKind& kind, const SimConfig& cfg = {});

/// Agent pose along its scripted (top-mode) trajectory at `time`,
/// linearly interpolated and held at the final point.
Pose2 agent_pose_at(const AgentTrack& agent, double time);

}  // namespace pgs
