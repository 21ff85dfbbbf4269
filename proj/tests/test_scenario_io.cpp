#include <doctest.h>

#include <cstdio>
#include <string>

#include "pgs/errors.hpp"
#include "pgs/json_io.hpp"
#include "pgs/plot.hpp"
#include "pgs/scenario.hpp"
#include "pgs/supervision.hpp"

using namespace pgs;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("/tmp/pgs_io_test_") + name;
}

}  // namespace

TEST_CASE("generators are deterministic per kind and seed") {
    for (ScenarioKind kind : {ScenarioKind::Straight3, ScenarioKind::Curve,
                              ScenarioKind::Intersection, ScenarioKind::Overtake,
                              ScenarioKind::Merge}) {
        const ScenarioSpec a = generate_synthetic(kind, 0);
        const ScenarioSpec b = generate_synthetic(kind, 0);
        CHECK(canonical_json(scenario_to_json(a)) == canonical_json(scenario_to_json(b)));
        const ScenarioSpec c = generate_synthetic(kind, 1);
        CHECK(canonical_json(scenario_to_json(a)) != canonical_json(scenario_to_json(c)));
    }
}

TEST_CASE("straight3 lays out three parallel centerlines one lane width apart") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 0);
    REQUIRE(sc.lanes.size() == 3);
    double ys[3] = {0, 0, 0};
    for (const Lane& lane : sc.lanes) {
        REQUIRE(polyline_valid(lane.centerline));
        const double y = lane.centerline.points.front().y;
        for (const Point2& p : lane.centerline.points) CHECK(p.y == doctest::Approx(y));
        if (lane.id == "lane_left") ys[0] = y;
        if (lane.id == "lane_center") ys[1] = y;
        if (lane.id == "lane_right") ys[2] = y;
    }
    CHECK(ys[0] - ys[1] == doctest::Approx(3.5));
    CHECK(ys[1] - ys[2] == doctest::Approx(3.5));
}

TEST_CASE("centerlines are densified to the configured spacing") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Curve, 0);
    for (const Lane& lane : sc.lanes) {
        for (std::size_t i = 1; i < lane.centerline.points.size(); ++i) {
            CHECK(distance(lane.centerline.points[i - 1], lane.centerline.points[i]) <=
                  sc.thresholds.densify_spacing + 1e-9);
        }
    }
}

TEST_CASE("save/load round trip preserves the scenario") {
    const std::string path = temp_path("roundtrip.json");
    for (ScenarioKind kind : {ScenarioKind::Straight3, ScenarioKind::Overtake,
                              ScenarioKind::Merge, ScenarioKind::Intersection}) {
        const ScenarioSpec original = generate_synthetic(kind, 13);
        save_scenario(original, path);
        const ScenarioSpec loaded = load_scenario(path);
        CHECK(canonical_json(scenario_to_json(loaded)) ==
              canonical_json(scenario_to_json(original)));
        CHECK(scenario_hash(loaded) == scenario_hash(original));

        // Saving the loaded value again is byte-stable.
        const std::string again = temp_path("roundtrip2.json");
        save_scenario(loaded, again);
        CHECK(read_text_file(again) == read_text_file(path));
        std::remove(again.c_str());
    }
    std::remove(path.c_str());
}

TEST_CASE("validation names the missing route lane id") {
    ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 0);
    sc.ego.route = {"lane_center", "lane_ghost"};
    try {
        validate_scenario(sc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("lane_ghost") != std::string::npos);
    }
}

TEST_CASE("validation rejects violated invariants by name") {
    ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 0);
    sc.lanes[0].width = -1.0;
    try {
        validate_scenario(sc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("width") != std::string::npos);
    }

    ScenarioSpec short_expert = generate_synthetic(ScenarioKind::Straight3, 0);
    short_expert.ego.expert_trajectory.points.resize(3);
    CHECK_THROWS_AS(validate_scenario(short_expert), ValidationError);

    ScenarioSpec bad_dt = generate_synthetic(ScenarioKind::Straight3, 0);
    bad_dt.agents = generate_synthetic(ScenarioKind::Overtake, 0).agents;
    bad_dt.agents[0].modes[0].trajectory.dt = 0.25;
    CHECK_THROWS_AS(validate_scenario(bad_dt), ValidationError);
}

TEST_CASE("malformed numeric fields raise ParseError with the field path") {
    const std::string path = temp_path("malformed.json");
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Straight3, 0);
    Json j = scenario_to_json(sc);
    j["ego"]["speed"] = "fast";
    write_text_file(path, j.dump());
    try {
        load_scenario(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("ego.speed") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("unparseable JSON raises ParseError") {
    const std::string path = temp_path("broken.json");
    write_text_file(path, "{not json");
    CHECK_THROWS_AS(load_scenario(path), ParseError);
    std::remove(path.c_str());
}

TEST_CASE("trajectory serialization round trips and unwraps records") {
    Trajectory traj;
    traj.dt = 0.5;
    traj.t0 = 1.5;
    traj.points = {{0.25, -1.125}, {1.0 / 3.0, 2.0}};
    const Json j = trajectory_to_json(traj);
    const Trajectory back = trajectory_from_json(j);
    CHECK(back.dt == traj.dt);
    CHECK(back.t0 == traj.t0);
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[1].x == traj.points[1].x);  // full precision survives

    Json wrapped;
    wrapped["trajectory"] = j;
    CHECK(trajectory_from_json(wrapped).points.size() == 2);
}

TEST_CASE("scenario hash changes with content") {
    const ScenarioSpec a = generate_synthetic(ScenarioKind::Straight3, 0);
    ScenarioSpec b = a;
    b.ego.speed += 0.5;
    CHECK(scenario_hash(a) != scenario_hash(b));
    CHECK(record_envelope(a).at("tool_version").get<std::string>() == kToolVersion);
}

TEST_CASE("extended centerline follows the route successors") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Curve, 0);
    const Polyline ext = extended_centerline(sc, "lane_entry", 80.0);
    CHECK(polyline_length(ext) > 60.0);
    // Runs through the arc lane's terminal point.
    const Point2 end = ext.points.back();
    const Lane* arc = find_lane(sc, "lane_arc");
    REQUIRE(arc != nullptr);
    CHECK(end.x == doctest::Approx(arc->centerline.points.back().x));
    CHECK(end.y == doctest::Approx(arc->centerline.points.back().y));
}

TEST_CASE("supervision record is internally consistent with its scenario") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Overtake, 0);
    const Trajectory& pred = sc.ego.expert_trajectory;  // deliberately colliding
    const LossWeights weights{1.0, 0.3, 1.0};
    const SupervisionRecord record = build_supervision_record(sc, pred, weights);

    CHECK(record.scenario_hash == scenario_hash(sc));
    CHECK(record.target_lane.slot == LaneSlot::Current);
    CHECK(record.spatial_target.target.points.size() == pred.points.size());
    CHECK_FALSE(record.collision_set.events.empty());  // expert hits the parked car
    CHECK(record.losses.ntps > 0.0);
    const double recombined = weights.w_mtps * record.losses.mtps +
                              weights.w_stps * record.losses.stps +
                              weights.w_ntps * record.losses.ntps;
    CHECK(record.losses.weighted_total == recombined);

    // Current lane is blocked by the parked vehicle; the side lanes are free.
    CHECK(record.lane_scores[1] < record.lane_scores[0]);
    CHECK(record.lane_scores[1] < record.lane_scores[2]);

    const Json j = supervision_record_to_json(record);
    CHECK(j.at("scenario_hash").get<std::string>() == record.scenario_hash);
    CHECK(j.contains("spatial_target"));
    CHECK(j.contains("collision_set"));
    CHECK(j.contains("losses"));
}

TEST_CASE("step trace rows round trip through JSON") {
    StepTrace row;
    row.time = 1.25;
    row.ego.pose = {{3.5, -2.0}, 0.7};
    row.ego.speed = 4.25;
    row.control = {-0.3, 0.5, 0.0};
    row.planned.dt = 0.5;
    row.planned.t0 = 1.0;
    row.planned.points = {{3.5, -2.0}, {5.0, -1.5}};
    row.chosen_lane = LaneSlot::Left;
    row.collision_flags = {0, 1};

    const StepTrace back = step_trace_from_json(step_trace_to_json(row));
    CHECK(back.time == row.time);
    CHECK(back.ego.pose.position.x == row.ego.pose.position.x);
    CHECK(back.ego.pose.heading == row.ego.pose.heading);
    CHECK(back.ego.speed == row.ego.speed);
    CHECK(back.control.steer == row.control.steer);
    REQUIRE(back.planned.points.size() == 2);
    CHECK(back.planned.points[1].y == row.planned.points[1].y);
    REQUIRE(back.chosen_lane.has_value());
    CHECK(*back.chosen_lane == LaneSlot::Left);
    REQUIRE(back.collision_flags.size() == 2);
    CHECK(back.collision_flags[1] == 1);
}

TEST_CASE("svg rendering emits a well-formed document") {
    const ScenarioSpec sc = generate_synthetic(ScenarioKind::Overtake, 0);
    const std::string svg = render_svg(sc);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("polygon") != std::string::npos);
}
