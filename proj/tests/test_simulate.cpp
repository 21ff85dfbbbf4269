#include <doctest.h>

#include <cmath>

#include "pgs/errors.hpp"
#include "pgs/json_io.hpp"
#include "pgs/scenario.hpp"
#include "pgs/simulate.hpp"

using namespace pgs;

namespace {

Polyline long_straight_path() {
    Polyline raw;
    raw.points = {{-20.0, 0.0}, {400.0, 0.0}};
    return densify(raw, 0.5);
}

EgoState make_ego(const Point2& pos, double heading, double speed) {
    EgoState ego;
    ego.pose = {pos, heading};
    ego.speed = speed;
    return ego;
}

}  // namespace

TEST_CASE("aim point distance switches at the speed threshold") {
    const Polyline path = long_straight_path();
    const PIDConfig cfg;

    const Point2 slow = pid_aim_point(path, make_ego({0, 0}, 0.0, 3.0), cfg);
    CHECK(slow.x == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(slow.y == doctest::Approx(0.0));

    const Point2 fast = pid_aim_point(path, make_ego({0, 0}, 0.0, 8.0), cfg);
    CHECK(fast.x == doctest::Approx(10.0).epsilon(1e-12));

    // The boundary speed uses the far aim point.
    const Point2 at_threshold = pid_aim_point(path, make_ego({0, 0}, 0.0, 6.5), cfg);
    CHECK(at_threshold.x == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("aim point clamps to the path end") {
    Polyline path;
    path.points = {{0, 0}, {10, 0}};
    const Point2 aim = pid_aim_point(path, make_ego({9, 0.5}, 0.0, 3.0), PIDConfig{});
    CHECK(aim.x == doctest::Approx(10.0));
    CHECK(aim.y == doctest::Approx(0.0));
}

TEST_CASE("pid_control is quiet at zero error and steers left negatively") {
    const PIDConfig cfg;
    PIDState state;
    const EgoState ego = make_ego({0, 0}, 0.0, 5.0);

    Control c;
    for (int i = 0; i < 50; ++i) c = pid_control(ego, {10, 0}, 5.0, cfg, state, 0.05);
    CHECK(c.steer == doctest::Approx(0.0));
    CHECK(c.throttle == doctest::Approx(0.0));
    CHECK(c.brake == doctest::Approx(0.0));

    PIDState fresh;
    const Point2 left_aim{10.0 * std::cos(kPi / 6), 10.0 * std::sin(kPi / 6)};
    const Control turn = pid_control(ego, left_aim, 5.0, cfg, fresh, 0.05);
    CHECK(turn.steer < 0.0);

    PIDState fresh2;
    const Point2 right_aim{10.0 * std::cos(-kPi / 6), -10.0 * std::sin(kPi / 6)};
    CHECK(pid_control(ego, right_aim, 5.0, cfg, fresh2, 0.05).steer > 0.0);
}

TEST_CASE("step_ego fixed point and braking clamp") {
    const EgoState still = make_ego({1, 2}, 0.5, 0.0);
    const EgoState next = step_ego(still, {0, 0, 0}, 0.05);
    CHECK(next.pose.position.x == still.pose.position.x);
    CHECK(next.pose.position.y == still.pose.position.y);
    CHECK(next.pose.heading == still.pose.heading);
    CHECK(next.speed == 0.0);

    EgoState moving = make_ego({0, 0}, 0.0, 9.0);
    for (int i = 0; i < 100; ++i) moving = step_ego(moving, {0, 0, 1.0}, 0.05);
    CHECK(moving.speed == 0.0);
}

TEST_CASE("constant steer traces the analytic circle radius") {
    const VehicleLimits limits;
    const double steer = 0.3;
    const double speed = 5.0;
    const double radius = 2.8 / std::tan(steer * limits.max_steer_angle);

    EgoState ego = make_ego({0, 0}, 0.0, speed);
    const double dt = 0.005;
    const double period = 2.0 * kPi * radius / speed;
    const int steps = static_cast<int>(period / dt);
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    for (int i = 0; i < steps; ++i) {
        ego = step_ego(ego, {steer, 0, 0}, dt, limits);
        min_x = std::min(min_x, ego.pose.position.x);
        max_x = std::max(max_x, ego.pose.position.x);
        min_y = std::min(min_y, ego.pose.position.y);
        max_y = std::max(max_y, ego.pose.position.y);
    }
    const double diameter_x = max_x - min_x;
    const double diameter_y = max_y - min_y;
    CHECK(std::abs(diameter_x - 2.0 * radius) / (2.0 * radius) < 0.01);
    CHECK(std::abs(diameter_y - 2.0 * radius) / (2.0 * radius) < 0.01);
    // Positive steer turns clockwise (to the right).
    CHECK(min_y < -radius * 0.5);
}

TEST_CASE("step response settles below 0.2 m within 5 seconds") {
    const Polyline path = long_straight_path();
    const SimConfig cfg;
    EgoState ego = make_ego({0.0, 1.0}, 0.0, 5.0);  // 1 m lateral offset
    PIDState state;
    double worst_after_settle = 0.0;
    for (int i = 0; i < 200; ++i) {  // 10 s at 20 Hz
        const Point2 aim = pid_aim_point(path, ego, cfg.pid);
        const Control control = pid_control(ego, aim, 5.0, cfg.pid, state, cfg.dt_sim);
        ego = step_ego(ego, control, cfg.dt_sim, cfg.limits);
        const double t = (i + 1) * cfg.dt_sim;
        if (t >= 5.0) worst_after_settle = std::max(worst_after_settle, std::abs(ego.pose.position.y));
    }
    CHECK(worst_after_settle < 0.2);
}

TEST_CASE("planner picks the current lane on an empty road") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 0);
    Rng rng(sc.meta.seed);
    const WorldSnapshot world{&sc, sc.ego.pose, sc.ego.speed, 0.0};
    const PlanResult plan_result =
        plan(world, {PlannerType::CenterlineFollow, 0.0}, 3.0, sc.meta.dt_plan, rng);
    REQUIRE(plan_result.chosen_lane.has_value());
    CHECK(*plan_result.chosen_lane == LaneSlot::Current);
    CHECK(plan_result.trajectory.points.size() == 7);
    for (const Point2& p : plan_result.trajectory.points) {
        CHECK(std::abs(p.y) < 1e-9);
    }
}

TEST_CASE("planner overtakes a stopped vehicle through the left lane") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Overtake, 0);
    Rng rng(sc.meta.seed);
    const WorldSnapshot world{&sc, sc.ego.pose, sc.ego.speed, 0.0};
    const PlanResult plan_result =
        plan(world, {PlannerType::CenterlineFollow, 0.0}, 3.0, sc.meta.dt_plan, rng);
    REQUIRE(plan_result.chosen_lane.has_value());
    CHECK(*plan_result.chosen_lane == LaneSlot::Left);
}

TEST_CASE("replay planner with zero noise returns the expert slice") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 3);
    Rng rng(sc.meta.seed);
    const WorldSnapshot world{&sc, sc.ego.pose, sc.ego.speed, 0.0};
    const PlanResult plan_result =
        plan(world, {PlannerType::Replay, 0.0}, 3.0, sc.meta.dt_plan, rng);
    REQUIRE(plan_result.trajectory.points.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(plan_result.trajectory.points[i].x == sc.ego.expert_trajectory.points[i].x);
        CHECK(plan_result.trajectory.points[i].y == sc.ego.expert_trajectory.points[i].y);
    }
    CHECK_FALSE(plan_result.chosen_lane.has_value());
}

TEST_CASE("planner throws when no lane qualifies") {
    ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 0);
    sc.ego.pose.position.y = 40.0;  // far off the map
    Rng rng(0);
    const WorldSnapshot world{&sc, sc.ego.pose, sc.ego.speed, 0.0};
    CHECK_THROWS_AS(plan(world, {PlannerType::CenterlineFollow, 0.0}, 3.0, sc.meta.dt_plan, rng),
                    NoCandidatesError);
}

TEST_CASE("closed-loop straight road run succeeds without incident") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 1);
    const RunResult result = run(sc, {PlannerType::CenterlineFollow, 0.0});
    CHECK(result.metrics.collisions == 0);
    CHECK(result.metrics.lane_departure_fraction == 0.0);
    CHECK(result.metrics.route_completion >= 0.95);
    CHECK(result.metrics.success);
    CHECK(result.metrics.mean_speed > 2.0);
}

TEST_CASE("replaying a deliberately colliding expert records the collision") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Overtake, 2);
    const RunResult result = run(sc, {PlannerType::Replay, 0.0});
    CHECK(result.metrics.collisions >= 1);
    CHECK_FALSE(result.metrics.success);
}

TEST_CASE("identical runs produce identical traces") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Merge, 5);
    const PlannerKind noisy{PlannerType::Replay, 0.3};
    const RunResult a = run(sc, noisy);
    const RunResult b = run(sc, noisy);
    CHECK(trace_payload(sc, a.trace) == trace_payload(sc, b.trace));
}

TEST_CASE("kinematic consistency and metric bounds hold on every trace row") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Curve, 7);
    const SimConfig cfg;
    const RunResult result = run(sc, {PlannerType::PgsFull, 0.0}, cfg);

    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        const StepTrace& prev = result.trace[i - 1];
        const StepTrace& cur = result.trace[i];
        const double moved = distance(prev.ego.pose.position, cur.ego.pose.position);
        const double bound =
            prev.ego.speed * cfg.dt_sim + 0.5 * cfg.limits.max_accel * cfg.dt_sim * cfg.dt_sim;
        CHECK(moved <= bound + 1e-9);
    }
    CHECK(result.metrics.collisions >= 0);
    CHECK(result.metrics.lane_departure_fraction >= 0.0);
    CHECK(result.metrics.lane_departure_fraction <= 1.0);
    CHECK(result.metrics.route_completion >= 0.0);
    CHECK(result.metrics.route_completion <= 1.0);
    CHECK(result.metrics.mean_speed >= 0.0);
}

TEST_CASE("full planner stays within half a lane width after settling") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 4);
    const RunResult result = run(sc, {PlannerType::PgsFull, 0.0});
    const Polyline route = route_polyline(sc);
    for (const StepTrace& row : result.trace) {
        if (row.time < 5.0) continue;
        CHECK(project_point(route, row.ego.pose.position).distance <=
              0.5 * sc.meta.default_lane_width);
    }
    CHECK(result.metrics.success);
}

TEST_CASE("agent poses interpolate their scripts and hold the endpoint") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Overtake, 0);
    const AgentTrack& parked = sc.agents.front();
    const Pose2 early = agent_pose_at(parked, 0.0);
    const Pose2 late = agent_pose_at(parked, 1e4);
    CHECK(early.position.x == doctest::Approx(40.0));
    CHECK(late.position.x == doctest::Approx(40.0));

    const ScenarioSpec merge = generate_synthetic(ScenarioKind::Merge, 0);
    const AgentTrack& merger = merge.agents.front();
    const Pose2 mid = agent_pose_at(merger, 0.25);  // halfway through step 0
    const Trajectory& script = merger.modes.front().trajectory;
    CHECK(mid.position.x ==
          doctest::Approx(0.5 * (script.points[0].x + script.points[1].x)));
}
