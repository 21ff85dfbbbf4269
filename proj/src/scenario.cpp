#include "pgs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "pgs/errors.hpp"
#include "pgs/rng.hpp"

namespace pgs {

double lane_filter_width(const ScenarioSpec& scenario) {
    return scenario.thresholds.lane_filter_width.value_or(scenario.meta.default_lane_width);
}

void finalize_scenario(ScenarioSpec& scenario) {
    scenario.ego.pose.heading = normalize_angle(scenario.ego.pose.heading);
    for (AgentTrack& agent : scenario.agents) {
        agent.initial_pose.heading = normalize_angle(agent.initial_pose.heading);
    }
    for (Lane& lane : scenario.lanes) {
        if (polyline_valid(lane.centerline)) {
            lane.centerline = densify(lane.centerline, scenario.thresholds.densify_spacing);
        }
    }
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

void validate_trajectory(const Trajectory& traj, double dt_plan, const std::string& name) {
    require(!traj.points.empty(), name + ": trajectory must have at least one point");
    require(traj.dt > 0.0, name + ": trajectory dt must be positive");
    require(traj.dt == dt_plan, name + ": trajectory dt must equal meta.dt_plan");
    for (const Point2& p : traj.points) {
        require(std::isfinite(p.x) && std::isfinite(p.y),
                name + ": trajectory coordinates must be finite");
    }
}

}  // namespace

void validate_scenario(const ScenarioSpec& scenario) {
    require(scenario.meta.dt_plan > 0.0, "meta.dt_plan must be positive");
    require(scenario.meta.horizon_steps > 0, "meta.horizon_steps must be positive");
    require(scenario.meta.default_lane_width > 0.0, "meta.default_lane_width must be positive");
    require(scenario.thresholds.w_snap > 0.0, "thresholds.w_snap must be positive");
    require(scenario.thresholds.beta > 0.0, "thresholds.beta must be positive");
    require(scenario.thresholds.densify_spacing > 0.0,
            "thresholds.densify_spacing must be positive");
    if (scenario.thresholds.lane_filter_width) {
        require(*scenario.thresholds.lane_filter_width > 0.0,
                "thresholds.lane_filter_width must be positive");
    }

    std::set<std::string> lane_ids;
    for (const Lane& lane : scenario.lanes) {
        require(!lane.id.empty(), "lane id must be non-empty");
        require(lane_ids.insert(lane.id).second, "duplicate lane id '" + lane.id + "'");
        require(lane.width > 0.0, "lane '" + lane.id + "': width must be positive");
        require(polyline_valid(lane.centerline),
                "lane '" + lane.id +
                    "': centerline must have >= 2 finite points with vertex spacing >= 1e-9");
    }
    for (const Lane& lane : scenario.lanes) {
        for (const std::string& succ : lane.successors) {
            require(lane_ids.count(succ) > 0,
                    "lane '" + lane.id + "': unknown successor lane id '" + succ + "'");
        }
    }

    require(std::isfinite(scenario.ego.pose.position.x) &&
                std::isfinite(scenario.ego.pose.position.y) &&
                std::isfinite(scenario.ego.pose.heading),
            "ego.pose must be finite");
    require(scenario.ego.width > 0.0 && scenario.ego.length > 0.0,
            "ego dims must be positive");
    require(scenario.ego.wheelbase > 0.0, "ego.wheelbase must be positive");
    require(scenario.ego.speed >= 0.0, "ego.speed must be non-negative");
    require(!scenario.ego.route.empty(), "ego.route must list at least one lane id");
    for (const std::string& id : scenario.ego.route) {
        require(lane_ids.count(id) > 0, "ego.route references missing lane id '" + id + "'");
    }
    validate_trajectory(scenario.ego.expert_trajectory, scenario.meta.dt_plan,
                        "ego.expert_trajectory");
    require(scenario.ego.expert_trajectory.points.size() >=
                static_cast<std::size_t>(scenario.meta.horizon_steps),
            "ego.expert_trajectory must cover at least horizon_steps points");

    std::set<std::string> agent_ids;
    for (const AgentTrack& agent : scenario.agents) {
        require(!agent.id.empty(), "agent id must be non-empty");
        require(agent_ids.insert(agent.id).second, "duplicate agent id '" + agent.id + "'");
        require(agent.width > 0.0 && agent.length > 0.0,
                "agent '" + agent.id + "': dims must be positive");
        require(!agent.modes.empty(), "agent '" + agent.id + "': needs at least one mode");
        const std::size_t horizon = agent.modes.front().trajectory.points.size();
        for (const auto& mode : agent.modes) {
            require(std::isfinite(mode.score), "agent '" + agent.id + "': mode score must be finite");
            validate_trajectory(mode.trajectory, scenario.meta.dt_plan, "agent '" + agent.id + "'");
            require(mode.trajectory.points.size() == horizon,
                    "agent '" + agent.id + "': all modes must share the trajectory horizon");
        }
    }
}

const Lane* find_lane(const ScenarioSpec& scenario, const std::string& id) {
    for (const Lane& lane : scenario.lanes) {
        if (lane.id == id) return &lane;
    }
    return nullptr;
}

namespace {

void append_polyline(Polyline& dst, const Polyline& src) {
    for (const Point2& p : src.points) {
        if (dst.points.empty() || distance(dst.points.back(), p) >= kMinVertexSpacing) {
            dst.points.push_back(p);
        }
    }
}

}  // namespace

Polyline route_polyline(const ScenarioSpec& scenario) {
    Polyline out;
    for (const std::string& id : scenario.ego.route) {
        const Lane* lane = find_lane(scenario, id);
        if (lane == nullptr) {
            throw ValidationError("ego.route references missing lane id '" + id + "'");
        }
        append_polyline(out, lane->centerline);
    }
    return out;
}

Polyline extended_centerline(const ScenarioSpec& scenario, const std::string& lane_id,
                             double min_length) {
    const Lane* lane = find_lane(scenario, lane_id);
    if (lane == nullptr) {
        throw ValidationError("unknown lane id '" + lane_id + "'");
    }
    Polyline out;
    append_polyline(out, lane->centerline);
    std::unordered_set<std::string> visited{lane->id};

    const auto& route = scenario.ego.route;
    while (polyline_length(out) < min_length && !lane->successors.empty()) {
        // Prefer the successor that continues the route.
        const std::string* next_id = nullptr;
        const auto it = std::find(route.begin(), route.end(), lane->id);
        if (it != route.end() && it + 1 != route.end()) {
            const auto& succ = lane->successors;
            if (std::find(succ.begin(), succ.end(), *(it + 1)) != succ.end()) {
                next_id = &*(it + 1);
            }
        }
        if (next_id == nullptr) next_id = &lane->successors.front();
        if (!visited.insert(*next_id).second) break;
        lane = find_lane(scenario, *next_id);
        if (lane == nullptr) break;
        append_polyline(out, lane->centerline);
    }
    return out;
}

std::vector<AgentTrack> agents_for_window(const ScenarioSpec& scenario, std::size_t start,
                                          std::size_t n_points) {
    std::vector<AgentTrack> out = scenario.agents;
    for (AgentTrack& agent : out) {
        for (auto& mode : agent.modes) {
            mode.trajectory = slice_clamped(mode.trajectory, start, n_points);
        }
    }
    return out;
}

std::optional<ScenarioKind> parse_scenario_kind(const std::string& name) {
    if (name == "straight3") return ScenarioKind::Straight3;
    if (name == "curve") return ScenarioKind::Curve;
    if (name == "intersection") return ScenarioKind::Intersection;
    if (name == "overtake") return ScenarioKind::Overtake;
    if (name == "merge") return ScenarioKind::Merge;
    return std::nullopt;
}

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Straight3: return "straight3";
        case ScenarioKind::Curve: return "curve";
        case ScenarioKind::Intersection: return "intersection";
        case ScenarioKind::Overtake: return "overtake";
        case ScenarioKind::Merge: return "merge";
    }
    return "straight3";
}

namespace {

constexpr double kExpertNoiseSigma = 0.15;  // lateral noise on experts, meters

Lane make_straight_lane(const std::string& id, double y, double x0, double x1, double width) {
    Lane lane;
    lane.id = id;
    lane.width = width;
    lane.centerline.points = {{x0, y}, {x1, y}};
    return lane;
}

/// Expert that follows `path` at cruise speed with seeded lateral noise;
/// extends `extra_steps` past the path end (holding the endpoint).
Trajectory route_follow_expert(const Polyline& path, double cruise, double dt, double sigma,
                               Rng& rng, int extra_steps = 3) {
    const double len = polyline_length(path);
    const int steps = static_cast<int>(std::ceil(len / (cruise * dt))) + extra_steps;
    Trajectory out;
    out.dt = dt;
    out.t0 = 0.0;
    out.points.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        const double s = std::min(len, cruise * dt * i);
        const Point2 base = point_at_arc_length(path, s);
        const double heading = tangent_at_arc_length(path, s);
        const Point2 normal{-std::sin(heading), std::cos(heading)};
        out.points.push_back(base + normal * rng.gaussian(0.0, sigma));
    }
    return out;
}

/// Stationary script matching the expert horizon.
Trajectory parked_script(const Point2& where, double dt, std::size_t n_points) {
    Trajectory out;
    out.dt = dt;
    out.points.assign(n_points, where);
    return out;
}

/// Script through the given waypoints at fixed speed, then holding a
/// terminal crawl speed along the final direction; padded to n_points.
Trajectory waypoint_script(const std::vector<Point2>& waypoints, double speed,
                           double terminal_speed, double dt, std::size_t n_points) {
    Polyline path;
    path.points = waypoints;
    const double len = polyline_length(path);
    Trajectory out;
    out.dt = dt;
    out.points.reserve(n_points);
    double s = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        if (s <= len) {
            out.points.push_back(point_at_arc_length(path, s));
            s += (s + speed * dt <= len ? speed : terminal_speed) * dt;
        } else {
            const double heading = tangent_at_arc_length(path, len);
            const Point2 dir{std::cos(heading), std::sin(heading)};
            out.points.push_back(out.points.back() + dir * (terminal_speed * dt));
        }
    }
    return out;
}

ScenarioSpec base_scenario(std::uint64_t seed) {
    ScenarioSpec sc;
    sc.meta.seed = seed;
    sc.ego.pose = {{0.0, 0.0}, 0.0};
    sc.ego.speed = 5.0;
    return sc;
}

ScenarioSpec gen_straight3(std::uint64_t seed) {
    ScenarioSpec sc = base_scenario(seed);
    const double w = sc.meta.default_lane_width;
    sc.lanes = {
        make_straight_lane("lane_left", w, -10.0, 90.0, w),
        make_straight_lane("lane_center", 0.0, -10.0, 90.0, w),
        make_straight_lane("lane_right", -w, -10.0, 90.0, w),
    };
    sc.ego.route = {"lane_center"};
    Rng rng(seed);
    Polyline ahead;
    ahead.points = {{0.0, 0.0}, {100.0, 0.0}};
    sc.ego.expert_trajectory =
        route_follow_expert(ahead, sc.ego.speed, sc.meta.dt_plan, kExpertNoiseSigma, rng);
    return sc;
}

ScenarioSpec gen_curve(std::uint64_t seed) {
    ScenarioSpec sc = base_scenario(seed);
    const double w = sc.meta.default_lane_width;
    Lane entry = make_straight_lane("lane_entry", 0.0, -10.0, 30.0, w);
    entry.successors = {"lane_arc"};
    Lane arc;
    arc.id = "lane_arc";
    arc.width = w;
    const double radius = 30.0;
    const Point2 center{30.0, radius};
    for (int i = 0; i <= 18; ++i) {  // quarter turn to the left
        const double ang = -0.5 * kPi + (0.5 * kPi) * i / 18.0;
        arc.centerline.points.push_back(
            {center.x + radius * std::cos(ang), center.y + radius * std::sin(ang)});
    }
    sc.lanes = {entry, arc};
    sc.ego.route = {"lane_entry", "lane_arc"};
    Rng rng(seed);
    sc.ego.expert_trajectory = route_follow_expert(route_polyline(sc), sc.ego.speed,
                                                   sc.meta.dt_plan, kExpertNoiseSigma, rng);
    return sc;
}

ScenarioSpec gen_intersection(std::uint64_t seed) {
    ScenarioSpec sc = base_scenario(seed);
    const double w = sc.meta.default_lane_width;
    Lane in = make_straight_lane("lane_in", 0.0, -40.0, 0.0, w);
    in.successors = {"lane_out"};
    Lane out = make_straight_lane("lane_out", 0.0, 0.0, 40.0, w);
    Lane cross;
    cross.id = "lane_cross";
    cross.width = w;
    cross.centerline.points = {{0.0, -40.0}, {0.0, 40.0}};
    sc.lanes = {in, out, cross};
    sc.ego.pose = {{-30.0, 0.0}, 0.0};
    sc.ego.route = {"lane_in", "lane_out"};

    Rng rng(seed);
    sc.ego.expert_trajectory = route_follow_expert(route_polyline(sc), sc.ego.speed,
                                                   sc.meta.dt_plan, kExpertNoiseSigma, rng);
    const std::size_t horizon = sc.ego.expert_trajectory.points.size();

    // Northbound crosser timed to clear the junction well before the ego
    // arrives (through the origin at t = 3 s; the ego gets there at 6 s).
    AgentTrack crosser;
    crosser.id = "npc_cross";
    crosser.initial_pose = {{0.0, -18.0}, 0.5 * kPi};
    crosser.speed = 6.0;
    AgentTrack::Mode mode;
    mode.score = 1.0;
    mode.trajectory =
        waypoint_script({{0.0, -18.0}, {0.0, 50.0}}, crosser.speed, crosser.speed,
                        sc.meta.dt_plan, horizon);
    crosser.modes = {mode};
    sc.agents = {crosser};
    return sc;
}

ScenarioSpec gen_overtake(std::uint64_t seed) {
    ScenarioSpec sc = base_scenario(seed);
    const double w = sc.meta.default_lane_width;
    sc.lanes = {
        make_straight_lane("lane_left", w, -10.0, 110.0, w),
        make_straight_lane("lane_center", 0.0, -10.0, 110.0, w),
        make_straight_lane("lane_right", -w, -10.0, 110.0, w),
    };
    sc.ego.route = {"lane_center"};

    Rng rng(seed);
    Polyline ahead;
    ahead.points = {{0.0, 0.0}, {120.0, 0.0}};
    // The expert ignores the stopped vehicle and drives straight through it.
    sc.ego.expert_trajectory =
        route_follow_expert(ahead, sc.ego.speed, sc.meta.dt_plan, kExpertNoiseSigma, rng);
    const std::size_t horizon = sc.ego.expert_trajectory.points.size();

    AgentTrack parked;  // stopped slightly right of the lane center
    parked.id = "npc_parked";
    parked.initial_pose = {{40.0, -0.6}, 0.0};
    parked.speed = 0.0;
    AgentTrack::Mode stay;
    stay.score = 1.0;
    stay.trajectory = parked_script({40.0, -0.6}, sc.meta.dt_plan, horizon);
    parked.modes = {stay};
    sc.agents = {parked};
    return sc;
}

ScenarioSpec gen_merge(std::uint64_t seed) {
    ScenarioSpec sc = base_scenario(seed);
    const double w = sc.meta.default_lane_width;
    sc.lanes = {
        make_straight_lane("lane_left", w, -10.0, 110.0, w),
        make_straight_lane("lane_center", 0.0, -10.0, 110.0, w),
        make_straight_lane("lane_right", -w, -10.0, 110.0, w),
    };
    sc.ego.route = {"lane_center"};

    Rng rng(seed);
    Polyline ahead;
    ahead.points = {{0.0, 0.0}, {120.0, 0.0}};
    sc.ego.expert_trajectory =
        route_follow_expert(ahead, sc.ego.speed, sc.meta.dt_plan, kExpertNoiseSigma, rng);
    const std::size_t horizon = sc.ego.expert_trajectory.points.size();

    // Converges from the left lane into the ego lane, then crawls ahead.
    AgentTrack merger;
    merger.id = "npc_merge";
    merger.initial_pose = {{25.0, w}, 0.0};
    merger.speed = 4.0;
    AgentTrack::Mode merge_mode;
    merge_mode.score = 0.8;
    merge_mode.trajectory =
        waypoint_script({{25.0, w}, {33.0, w}, {45.0, 0.0}, {50.0, 0.0}}, merger.speed, 2.0,
                        sc.meta.dt_plan, horizon);
    AgentTrack::Mode keep_mode;  // low-score alternative: stays in its lane
    keep_mode.score = 0.2;
    keep_mode.trajectory =
        waypoint_script({{25.0, w}, {110.0, w}}, merger.speed, merger.speed, sc.meta.dt_plan,
                        horizon);
    merger.modes = {merge_mode, keep_mode};
    sc.agents = {merger};
    return sc;
}

}  // namespace

ScenarioSpec generate_synthetic(ScenarioKind kind, std::uint64_t seed) {
    ScenarioSpec sc;
    switch (kind) {
        case ScenarioKind::Straight3: sc = gen_straight3(seed); break;
        case ScenarioKind::Curve: sc = gen_curve(seed); break;
        case ScenarioKind::Intersection: sc = gen_intersection(seed); break;
        case ScenarioKind::Overtake: sc = gen_overtake(seed); break;
        case ScenarioKind::Merge: sc = gen_merge(seed); break;
    }
    finalize_scenario(sc);
    validate_scenario(sc);
    return sc;
}

}  // namespace pgs
