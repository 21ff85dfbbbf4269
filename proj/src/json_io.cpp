#include "pgs/json_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "pgs/errors.hpp"

namespace pgs {

namespace {

template <typename T>
T get_field(const Json& j, const char* key, const std::string& context) {
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ParseError("field '" + context + "." + key + "': " + e.what());
    }
}

Json points_to_json(const std::vector<Point2>& points) {
    Json out = Json::array();
    for (const Point2& p : points) out.push_back(Json::array({p.x, p.y}));
    return out;
}

std::vector<Point2> points_from_json(const Json& j, const std::string& context) {
    std::vector<Point2> out;
    if (!j.is_array()) throw ParseError("field '" + context + "': expected an array of [x, y]");
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& entry = j[i];
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number()) {
            throw ParseError("field '" + context + "[" + std::to_string(i) +
                             "]': expected [x, y] numbers");
        }
        out.push_back({entry[0].get<double>(), entry[1].get<double>()});
    }
    return out;
}

Json pose_to_json(const Pose2& pose) {
    return Json{{"x", pose.position.x}, {"y", pose.position.y}, {"heading", pose.heading}};
}

Pose2 pose_from_json(const Json& j, const std::string& context) {
    Pose2 pose;
    pose.position.x = get_field<double>(j, "x", context);
    pose.position.y = get_field<double>(j, "y", context);
    pose.heading = get_field<double>(j, "heading", context);
    return pose;
}

Trajectory trajectory_from_json_impl(const Json& j, const std::string& context) {
    Trajectory traj;
    traj.dt = get_field<double>(j, "dt", context);
    traj.t0 = j.value("t0", 0.0);
    traj.points = points_from_json(
        j.contains("points") ? j.at("points") : Json(), context + ".points");
    return traj;
}

}  // namespace

Json trajectory_to_json(const Trajectory& traj) {
    return Json{{"dt", traj.dt}, {"t0", traj.t0}, {"points", points_to_json(traj.points)}};
}

Trajectory trajectory_from_json(const Json& j) {
    if (j.is_object() && j.contains("trajectory")) {
        return trajectory_from_json_impl(j.at("trajectory"), "trajectory");
    }
    return trajectory_from_json_impl(j, "trajectory");
}

Json scenario_to_json(const ScenarioSpec& sc) {
    Json j;
    j["meta"] = {{"dt_plan", sc.meta.dt_plan},
                 {"horizon_steps", sc.meta.horizon_steps},
                 {"default_lane_width", sc.meta.default_lane_width},
                 {"seed", sc.meta.seed}};

    Json lanes = Json::array();
    for (const Lane& lane : sc.lanes) {
        lanes.push_back({{"id", lane.id},
                         {"width", lane.width},
                         {"centerline", points_to_json(lane.centerline.points)},
                         {"successors", lane.successors}});
    }
    j["lanes"] = std::move(lanes);

    j["ego"] = {{"pose", pose_to_json(sc.ego.pose)},
                {"width", sc.ego.width},
                {"length", sc.ego.length},
                {"speed", sc.ego.speed},
                {"wheelbase", sc.ego.wheelbase},
                {"command", sc.ego.command},
                {"route", sc.ego.route},
                {"expert_trajectory", trajectory_to_json(sc.ego.expert_trajectory)}};

    Json agents = Json::array();
    for (const AgentTrack& agent : sc.agents) {
        Json modes = Json::array();
        for (const auto& mode : agent.modes) {
            modes.push_back(
                {{"score", mode.score}, {"trajectory", trajectory_to_json(mode.trajectory)}});
        }
        agents.push_back({{"id", agent.id},
                          {"width", agent.width},
                          {"length", agent.length},
                          {"initial_pose", pose_to_json(agent.initial_pose)},
                          {"speed", agent.speed},
                          {"modes", std::move(modes)}});
    }
    j["agents"] = std::move(agents);

    Json thresholds = {{"w_snap", sc.thresholds.w_snap},
                       {"beta", sc.thresholds.beta},
                       {"densify_spacing", sc.thresholds.densify_spacing}};
    if (sc.thresholds.lane_filter_width) {
        thresholds["lane_filter_width"] = *sc.thresholds.lane_filter_width;
    }
    j["thresholds"] = std::move(thresholds);
    return j;
}

ScenarioSpec scenario_from_json(const Json& j) {
    ScenarioSpec sc;
    const Json& meta = j.contains("meta") ? j.at("meta") : Json::object();
    sc.meta.dt_plan = get_field<double>(meta, "dt_plan", "meta");
    sc.meta.horizon_steps = get_field<int>(meta, "horizon_steps", "meta");
    sc.meta.default_lane_width = get_field<double>(meta, "default_lane_width", "meta");
    sc.meta.seed = meta.value("seed", std::uint64_t{0});

    if (!j.contains("lanes") || !j.at("lanes").is_array()) {
        throw ParseError("field 'lanes': expected an array");
    }
    for (std::size_t i = 0; i < j.at("lanes").size(); ++i) {
        const Json& lj = j.at("lanes")[i];
        const std::string ctx = "lanes[" + std::to_string(i) + "]";
        Lane lane;
        lane.id = get_field<std::string>(lj, "id", ctx);
        lane.width = get_field<double>(lj, "width", ctx);
        lane.centerline.points = points_from_json(
            lj.contains("centerline") ? lj.at("centerline") : Json(), ctx + ".centerline");
        lane.successors = lj.value("successors", std::vector<std::string>{});
        sc.lanes.push_back(std::move(lane));
    }

    const Json& ego = j.contains("ego") ? j.at("ego") : Json::object();
    sc.ego.pose = pose_from_json(ego.contains("pose") ? ego.at("pose") : Json::object(),
                                 "ego.pose");
    sc.ego.width = get_field<double>(ego, "width", "ego");
    sc.ego.length = get_field<double>(ego, "length", "ego");
    sc.ego.speed = get_field<double>(ego, "speed", "ego");
    sc.ego.wheelbase = get_field<double>(ego, "wheelbase", "ego");
    sc.ego.command = ego.value("command", std::string{"LaneFollow"});
    sc.ego.route = get_field<std::vector<std::string>>(ego, "route", "ego");
    sc.ego.expert_trajectory = trajectory_from_json_impl(
        ego.contains("expert_trajectory") ? ego.at("expert_trajectory") : Json::object(),
        "ego.expert_trajectory");

    const Json agents = j.value("agents", Json::array());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Json& aj = agents[i];
        const std::string ctx = "agents[" + std::to_string(i) + "]";
        AgentTrack agent;
        agent.id = get_field<std::string>(aj, "id", ctx);
        agent.width = get_field<double>(aj, "width", ctx);
        agent.length = get_field<double>(aj, "length", ctx);
        agent.initial_pose = pose_from_json(
            aj.contains("initial_pose") ? aj.at("initial_pose") : Json::object(),
            ctx + ".initial_pose");
        agent.speed = aj.value("speed", 0.0);
        const Json modes = aj.value("modes", Json::array());
        for (std::size_t m = 0; m < modes.size(); ++m) {
            AgentTrack::Mode mode;
            const std::string mctx = ctx + ".modes[" + std::to_string(m) + "]";
            mode.score = get_field<double>(modes[m], "score", mctx);
            mode.trajectory = trajectory_from_json_impl(
                modes[m].contains("trajectory") ? modes[m].at("trajectory") : Json::object(),
                mctx + ".trajectory");
            agent.modes.push_back(std::move(mode));
        }
        sc.agents.push_back(std::move(agent));
    }

    const Json& th = j.contains("thresholds") ? j.at("thresholds") : Json::object();
    sc.thresholds.w_snap = th.value("w_snap", kDefaultSnapThreshold);
    sc.thresholds.beta = th.value("beta", kDefaultCollisionMargin);
    sc.thresholds.densify_spacing = th.value("densify_spacing", 0.5);
    if (th.contains("lane_filter_width")) {
        sc.thresholds.lane_filter_width = th.at("lane_filter_width").get<double>();
    }
    return sc;
}

std::string canonical_json(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace

std::string scenario_hash(const ScenarioSpec& scenario) {
    const std::uint64_t h = fnv1a64(canonical_json(scenario_to_json(scenario)));
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

Json record_envelope(const ScenarioSpec& scenario) {
    return Json{{"tool_version", kToolVersion}, {"scenario_hash", scenario_hash(scenario)}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

ScenarioSpec load_scenario(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    ScenarioSpec sc = scenario_from_json(j);
    finalize_scenario(sc);
    validate_scenario(sc);
    return sc;
}

void save_scenario(const ScenarioSpec& scenario, const std::string& path) {
    write_text_file(path, canonical_json(scenario_to_json(scenario)));
}

Json candidate_to_json(const LaneCandidate& cand) {
    return Json{{"slot", to_string(cand.slot)},
                {"lane_id", cand.lane_id},
                {"d", cand.d},
                {"phi", cand.phi}};
}

Json relevant_lanes_to_json(const RelevantLaneSet& relevant) {
    Json j;
    j["left"] = relevant.left ? candidate_to_json(*relevant.left) : Json(nullptr);
    j["current"] = relevant.current ? candidate_to_json(*relevant.current) : Json(nullptr);
    j["right"] = relevant.right ? candidate_to_json(*relevant.right) : Json(nullptr);
    return j;
}

Json label_to_json(const TargetLaneLabel& label) {
    return Json{{"slot", to_string(label.slot)},
                {"mean_terminal_distance", label.mean_terminal_distance}};
}

Json spatial_target_to_json(const SpatialTarget& target) {
    Json flags = Json::array();
    for (const auto f : target.snapped) flags.push_back(f != 0);
    return Json{{"target", trajectory_to_json(target.target)},
                {"snapped", std::move(flags)},
                {"snap_threshold", target.snap_threshold}};
}

Json collision_set_to_json(const CollisionSet& collisions) {
    Json events = Json::array();
    for (const CollisionEvent& e : collisions.events) {
        events.push_back({{"t", e.t},
                          {"agent_id", e.agent_id},
                          {"ego_point", Json::array({e.ego_point.x, e.ego_point.y})},
                          {"agent_point", Json::array({e.agent_point.x, e.agent_point.y})},
                          {"center_distance", e.center_distance}});
    }
    return Json{{"beta", collisions.beta}, {"events", std::move(events)}};
}

Json breakdown_to_json(const LossBreakdown& breakdown) {
    return Json{{"mtps", breakdown.mtps},
                {"stps", breakdown.stps},
                {"ntps", breakdown.ntps},
                {"weighted_total", breakdown.weighted_total}};
}

Json weights_to_json(const LossWeights& weights) {
    return Json{{"w_mtps", weights.w_mtps}, {"w_stps", weights.w_stps}, {"w_ntps", weights.w_ntps}};
}

Json metrics_to_json(const Metrics& metrics) {
    return Json{{"collisions", metrics.collisions},
                {"lane_departure_fraction", metrics.lane_departure_fraction},
                {"route_completion", metrics.route_completion},
                {"success", metrics.success},
                {"mean_speed", metrics.mean_speed}};
}

Json step_trace_to_json(const StepTrace& row) {
    Json j;
    j["time"] = row.time;
    j["ego"] = {{"x", row.ego.pose.position.x},
                {"y", row.ego.pose.position.y},
                {"heading", row.ego.pose.heading},
                {"speed", row.ego.speed}};
    j["control"] = {{"steer", row.control.steer},
                    {"throttle", row.control.throttle},
                    {"brake", row.control.brake}};
    j["planned"] = trajectory_to_json(row.planned);
    j["chosen_lane"] = row.chosen_lane ? Json(to_string(*row.chosen_lane)) : Json(nullptr);
    Json flags = Json::array();
    for (const auto f : row.collision_flags) flags.push_back(f != 0);
    j["collision_flags"] = std::move(flags);
    return j;
}

StepTrace step_trace_from_json(const Json& j) {
    StepTrace row;
    row.time = get_field<double>(j, "time", "trace");
    const Json& ego = j.contains("ego") ? j.at("ego") : Json::object();
    row.ego.pose.position.x = get_field<double>(ego, "x", "trace.ego");
    row.ego.pose.position.y = get_field<double>(ego, "y", "trace.ego");
    row.ego.pose.heading = ego.value("heading", 0.0);
    row.ego.speed = ego.value("speed", 0.0);
    if (j.contains("control")) {
        const Json& c = j.at("control");
        row.control.steer = c.value("steer", 0.0);
        row.control.throttle = c.value("throttle", 0.0);
        row.control.brake = c.value("brake", 0.0);
    }
    if (j.contains("planned")) row.planned = trajectory_from_json_impl(j.at("planned"), "trace.planned");
    if (j.contains("chosen_lane") && j.at("chosen_lane").is_string()) {
        const std::string name = j.at("chosen_lane").get<std::string>();
        if (name == "left") row.chosen_lane = LaneSlot::Left;
        if (name == "current") row.chosen_lane = LaneSlot::Current;
        if (name == "right") row.chosen_lane = LaneSlot::Right;
    }
    for (const Json& f : j.value("collision_flags", Json::array())) {
        row.collision_flags.push_back(f.get<bool>() ? 1 : 0);
    }
    return row;
}

Json finite_diff_report_to_json(const FiniteDiffReport& report) {
    return Json{{"max_rel_error", report.max_rel_error},
                {"max_abs_error", report.max_abs_error},
                {"worst_point", report.worst_point},
                {"worst_axis", report.worst_axis},
                {"checked", report.checked},
                {"skipped", report.skipped}};
}

Json gradient_to_json(const std::vector<Point2>& gradient) {
    return points_to_json(gradient);
}

Json supervision_record_to_json(const SupervisionRecord& record) {
    return Json{{"relevant_lanes", relevant_lanes_to_json(record.relevant_lanes)},
                {"target_lane", label_to_json(record.target_lane)},
                {"lane_scores", record.lane_scores},
                {"spatial_target", spatial_target_to_json(record.spatial_target)},
                {"collision_set", collision_set_to_json(record.collision_set)},
                {"losses", breakdown_to_json(record.losses)},
                {"scenario_hash", record.scenario_hash}};
}

std::string trace_payload(const ScenarioSpec& scenario, const std::vector<StepTrace>& trace) {
    std::ostringstream out;
    out << record_envelope(scenario).dump() << "\n";
    for (const StepTrace& row : trace) {
        out << step_trace_to_json(row).dump() << "\n";
    }
    return out.str();
}

}  // namespace pgs
