#include "pgs/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pgs/errors.hpp"
#include "pgs/ntps.hpp"

namespace pgs {

Point2 pid_aim_point(const Polyline& path, const EgoState& ego, const PIDConfig& cfg) {
    const Projection proj = project_point(path, ego.pose.position);
    const double look = ego.speed < cfg.speed_threshold ? cfg.near_aim : cfg.far_aim;
    return point_at_arc_length(path, proj.arc_length + look);
}

namespace {

double pid_step(const PidGains& gains, double error, double& integral, double& prev_error,
                bool& has_prev, double integral_clamp, double dt) {
    integral = std::clamp(integral + error * dt, -integral_clamp, integral_clamp);
    const double derivative = has_prev ? (error - prev_error) / dt : 0.0;
    prev_error = error;
    has_prev = true;
    return gains.kp * error + gains.ki * integral + gains.kd * derivative;
}

}  // namespace

Control pid_control(const EgoState& ego, const Point2& aim, double target_speed,
                    const PIDConfig& cfg, PIDState& state, double dt) {
    Control out;

    const Point2 rel = aim - ego.pose.position;
    double heading_error = 0.0;
    if (rel.norm() > 1e-9) {
        heading_error = normalize_angle(std::atan2(rel.y, rel.x) - ego.pose.heading);
    }
    const double lat = pid_step(cfg.lateral, heading_error, state.lat_integral,
                                state.lat_prev_error, state.lat_has_prev, cfg.integral_clamp, dt);
    // Left-negative steering convention: an aim point to the left of the
    // heading (positive bearing error) maps to negative steer.
    out.steer = std::clamp(-lat, -1.0, 1.0);

    const double speed_error = target_speed - ego.speed;
    const double lon = pid_step(cfg.longitudinal, speed_error, state.lon_integral,
                                state.lon_prev_error, state.lon_has_prev, cfg.integral_clamp, dt);
    if (lon >= 0.0) {
        out.throttle = std::clamp(lon, 0.0, 1.0);
    } else {
        out.brake = std::clamp(-lon, 0.0, 1.0);
    }
    return out;
}

EgoState step_ego(const EgoState& ego, const Control& control, double dt,
                  const VehicleLimits& limits) {
    EgoState next = ego;
    const double steer_angle =
        std::clamp(control.steer, -1.0, 1.0) * limits.max_steer_angle;
    // Negative steer turns left; world headings are counter-clockwise.
    const double heading_rate = -ego.speed * std::tan(steer_angle) / ego.wheelbase;
    const double accel = std::clamp(control.throttle, 0.0, 1.0) * limits.max_accel -
                         std::clamp(control.brake, 0.0, 1.0) * limits.max_brake_decel;

    next.pose.position.x += ego.speed * std::cos(ego.pose.heading) * dt;
    next.pose.position.y += ego.speed * std::sin(ego.pose.heading) * dt;
    next.pose.heading = normalize_angle(ego.pose.heading + heading_rate * dt);
    next.speed = std::max(0.0, ego.speed + accel * dt);
    return next;
}

Pose2 agent_pose_at(const AgentTrack& agent, double time) {
    const Trajectory& script = top_mode(agent).trajectory;
    const std::vector<double> headings =
        headings_from_offsets(script, agent.initial_pose.heading);
    const double u = std::max(0.0, (time - script.t0) / script.dt);
    const auto idx = static_cast<std::size_t>(u);
    if (idx + 1 >= script.points.size()) {
        return {script.points.back(), headings.back()};
    }
    const double frac = u - static_cast<double>(idx);
    const Point2 pos = script.points[idx] + (script.points[idx + 1] - script.points[idx]) * frac;
    return {pos, headings[idx]};
}

namespace {

constexpr double kFreeDistanceLookahead = 50.0;  // meters
constexpr double kFreeDistanceStep = 1.0;        // meters between probes

/// Future boxes of every agent over the plan window, used as static
/// obstacles by the free-distance scorer.
std::vector<OrientedBox> agent_window_boxes(const ScenarioSpec& sc, std::size_t plan_index,
                                            std::size_t n_points) {
    std::vector<OrientedBox> out;
    for (const AgentTrack& agent : sc.agents) {
        const Trajectory slice =
            slice_clamped(top_mode(agent).trajectory, plan_index, n_points);
        const FutureBoxSequence boxes =
            build_future_boxes(slice, agent.width, agent.length, agent.initial_pose.heading);
        out.insert(out.end(), boxes.boxes.begin(), boxes.boxes.end());
    }
    return out;
}

double free_distance_along(const Polyline& path, double s0, double ego_width, double ego_length,
                           const std::vector<OrientedBox>& obstacles) {
    const double len = polyline_length(path);
    const double reach = std::min(len, s0 + kFreeDistanceLookahead);
    for (double s = s0; s <= reach; s += kFreeDistanceStep) {
        const OrientedBox probe{point_at_arc_length(path, s), 0.5 * ego_width, 0.5 * ego_length,
                                tangent_at_arc_length(path, s)};
        for (const OrientedBox& obstacle : obstacles) {
            if (sat_overlap(probe, obstacle)) return s - s0;
        }
    }
    return reach - s0;
}

}  // namespace

LaneScores score_relevant_lanes(const ScenarioSpec& scenario, const Pose2& ego_pose,
                                double time) {
    LaneScores out;
    out.relevant = filter_relevant_lanes(scenario.lanes, ego_pose, lane_filter_width(scenario));
    const auto plan_index =
        static_cast<std::size_t>(std::lround(time / scenario.meta.dt_plan));
    const auto n_points = static_cast<std::size_t>(scenario.meta.horizon_steps) + 1;
    const std::vector<OrientedBox> obstacles =
        agent_window_boxes(scenario, plan_index, n_points);
    const double horizon = scenario.meta.horizon_steps * scenario.meta.dt_plan;
    const double needed_length =
        kFreeDistanceLookahead + scenario.ego.speed * horizon + 20.0;
    for (LaneSlot slot : {LaneSlot::Left, LaneSlot::Current, LaneSlot::Right}) {
        const auto& cand = out.relevant.slot(slot);
        if (!cand) continue;
        const Polyline ext = extended_centerline(scenario, cand->lane_id, needed_length);
        const double s0 = project_point(ext, ego_pose.position).arc_length;
        const double free =
            free_distance_along(ext, s0, scenario.ego.width, scenario.ego.length, obstacles);
        out.free_distance[static_cast<int>(slot)] = free;
        out.scores[static_cast<int>(slot)] = free / kFreeDistanceLookahead;
    }
    return out;
}

PlanResult plan(const WorldSnapshot& world, const PlannerKind& kind, double horizon,
                double dt_plan, Rng& rng) {
    const ScenarioSpec& sc = *world.scenario;
    const auto horizon_steps = static_cast<std::size_t>(std::lround(horizon / dt_plan));
    const std::size_t n_points = horizon_steps + 1;
    const auto plan_index = static_cast<std::size_t>(std::lround(world.time / dt_plan));

    if (kind.type == PlannerType::Replay) {
        Trajectory traj = slice_clamped(sc.ego.expert_trajectory, plan_index, n_points);
        traj.t0 = world.time;
        if (kind.noise_sigma > 0.0) {
            const std::vector<double> headings =
                headings_from_offsets(traj, world.ego_pose.heading);
            for (std::size_t i = 0; i < traj.points.size(); ++i) {
                const Point2 normal{-std::sin(headings[i]), std::cos(headings[i])};
                traj.points[i] += normal * rng.gaussian(0.0, kind.noise_sigma);
            }
        }
        return {traj, std::nullopt};
    }

    const RelevantLaneSet relevant =
        filter_relevant_lanes(sc.lanes, world.ego_pose, lane_filter_width(sc));
    if (relevant.empty()) {
        throw NoCandidatesError("lane filter returned no candidates at the ego pose");
    }

    const std::vector<OrientedBox> obstacles = agent_window_boxes(sc, plan_index, n_points);
    const double cruise = sc.ego.speed;
    const double needed_length = kFreeDistanceLookahead + cruise * horizon + 20.0;

    // Preference order breaks free-distance ties toward lane keeping.
    const LaneSlot order[] = {LaneSlot::Current, LaneSlot::Left, LaneSlot::Right};
    std::optional<LaneSlot> chosen;
    Polyline chosen_path;
    double chosen_s0 = 0.0;
    double best_score = -1.0;
    for (LaneSlot slot : order) {
        const auto& cand = relevant.slot(slot);
        if (!cand) continue;
        Polyline ext = extended_centerline(sc, cand->lane_id, needed_length);
        const double s0 = project_point(ext, world.ego_pose.position).arc_length;
        const double score =
            free_distance_along(ext, s0, sc.ego.width, sc.ego.length, obstacles);
        if (score > best_score) {
            best_score = score;
            chosen = slot;
            chosen_path = std::move(ext);
            chosen_s0 = s0;
        }
    }

    Trajectory traj;
    traj.dt = dt_plan;
    traj.t0 = world.time;
    traj.points.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        traj.points.push_back(
            point_at_arc_length(chosen_path, chosen_s0 + cruise * dt_plan * i));
    }

    if (kind.type == PlannerType::PgsFull) {
        const std::vector<AgentTrack> agents = agents_for_window(sc, plan_index, n_points);
        // The repulsion direction is undefined for exactly coincident
        // points; nudge those laterally before optimizing.
        for (std::size_t i = 0; i < traj.points.size(); ++i) {
            for (const AgentTrack& agent : agents) {
                for (const auto& mode : agent.modes) {
                    if (distance(traj.points[i], mode.trajectory.points[i]) < 1e-9) {
                        traj.points[i].y += 1e-6;
                    }
                }
            }
        }
        const OptimizeResult refined = optimize_trajectory(
            traj, chosen_path, traj, agents, LossWeights{}, OptimizerConfig{},
            sc.thresholds.w_snap, sc.thresholds.beta, sc.ego.width, sc.ego.length,
            world.ego_pose.heading);
        traj = refined.trajectory;
    }
    return {traj, chosen};
}

namespace {

double min_centerline_distance(const ScenarioSpec& sc, const Point2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Lane& lane : sc.lanes) {
        best = std::min(best, project_point(lane.centerline, p).distance);
    }
    return best;
}

}  // namespace

RunResult run(const ScenarioSpec& scenario, const PlannerKind& kind, const SimConfig& cfg) {
    RunResult result;
    Rng rng(scenario.meta.seed);

    EgoState ego;
    ego.pose = scenario.ego.pose;
    ego.speed = scenario.ego.speed;
    ego.width = scenario.ego.width;
    ego.length = scenario.ego.length;
    ego.wheelbase = scenario.ego.wheelbase;

    const Polyline route = route_polyline(scenario);
    const double route_len = polyline_length(route);
    const double dt_plan = scenario.meta.dt_plan;
    const double horizon = scenario.meta.horizon_steps * dt_plan;
    const double expert_duration =
        (static_cast<double>(scenario.ego.expert_trajectory.points.size()) - 1.0) * dt_plan;
    const double max_time =
        cfg.max_time > 0.0 ? cfg.max_time : std::max(30.0, 2.5 * expert_duration);

    PIDState pid_state;
    PlanResult current_plan;
    double next_replan = 0.0;

    std::size_t departures = 0;
    double speed_sum = 0.0;
    double max_arc = 0.0;
    int collisions = 0;
    std::vector<std::uint8_t> prev_flags(scenario.agents.size(), 0);

    for (int step = 0;; ++step) {
        const double time = step * cfg.dt_sim;
        if (time > max_time) break;

        if (time >= next_replan - 1e-9) {
            const WorldSnapshot world{&scenario, ego.pose, ego.speed, time};
            current_plan = plan(world, kind, horizon, dt_plan, rng);
            next_replan += cfg.replan_period;
        }

        const Polyline path = trajectory_polyline(current_plan.trajectory);
        Point2 aim = ego.pose.position;
        double target_speed = 0.0;
        if (!path.points.empty()) {
            aim = pid_aim_point(path, ego, cfg.pid);
            const double plan_time =
                (static_cast<double>(current_plan.trajectory.points.size()) - 1.0) * dt_plan;
            if (plan_time > 0.0) target_speed = polyline_length(path) / plan_time;
        }
        const Control control = pid_control(ego, aim, target_speed, cfg.pid, pid_state, cfg.dt_sim);

        // Collision flags at the current instant.
        const OrientedBox ego_box{ego.pose.position, 0.5 * ego.width, 0.5 * ego.length,
                                  ego.pose.heading};
        std::vector<std::uint8_t> flags(scenario.agents.size(), 0);
        bool any_collision = false;
        for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
            const AgentTrack& agent = scenario.agents[i];
            const Pose2 pose = agent_pose_at(agent, time);
            const OrientedBox agent_box{pose.position, 0.5 * agent.width, 0.5 * agent.length,
                                        pose.heading};
            flags[i] = sat_overlap(ego_box, agent_box) ? 1 : 0;
            if (flags[i] && !prev_flags[i]) ++collisions;
            any_collision = any_collision || flags[i] != 0;
        }
        prev_flags = flags;

        StepTrace row;
        row.time = time;
        row.ego = ego;
        row.control = control;
        row.planned = current_plan.trajectory;
        row.chosen_lane = current_plan.chosen_lane;
        row.collision_flags = flags;
        result.trace.push_back(std::move(row));

        speed_sum += ego.speed;
        if (min_centerline_distance(scenario, ego.pose.position) >
            0.5 * scenario.meta.default_lane_width) {
            ++departures;
        }
        max_arc = std::max(max_arc, project_point(route, ego.pose.position).arc_length);

        if (any_collision) break;
        if (route_len - max_arc < cfg.route_end_tolerance) break;

        ego = step_ego(ego, control, cfg.dt_sim, cfg.limits);
    }

    const auto steps = static_cast<double>(result.trace.size());
    result.metrics.collisions = collisions;
    result.metrics.lane_departure_fraction = steps > 0.0 ? departures / steps : 0.0;
    result.metrics.route_completion =
        route_len > 0.0 ? std::clamp(max_arc / route_len, 0.0, 1.0) : 0.0;
    result.metrics.mean_speed = steps > 0.0 ? speed_sum / steps : 0.0;
    result.metrics.success =
        result.metrics.route_completion >= 0.95 && result.metrics.collisions == 0;
    return result;
}

}  // namespace pgs
