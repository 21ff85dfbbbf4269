// Command-line surface for the supervision library and the closed-loop
// harness. Every command reads a scenario file, writes a result file, and
// exits 0 on success, 1 on validation/parse failures, 2 on runtime errors.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgs/errors.hpp"
#include "pgs/json_io.hpp"
#include "pgs/losses.hpp"
#include "pgs/plot.hpp"
#include "pgs/scenario.hpp"
#include "pgs/simulate.hpp"

namespace {

using namespace pgs;

constexpr double kDefaultGradcheckStep = 1e-5;

std::vector<AgentTrack> agents_for_horizon(const ScenarioSpec& sc, const Trajectory& pred) {
    const auto start = static_cast<std::size_t>(std::lround(pred.t0 / sc.meta.dt_plan));
    return agents_for_window(sc, start, pred.points.size());
}

struct LabeledLane {
    RelevantLaneSet relevant;
    TargetLaneLabel label;
    Polyline centerline;  // extended centerline of the labeled lane
};

LabeledLane label_scenario_lane(const ScenarioSpec& sc) {
    LabeledLane out;
    out.relevant = filter_relevant_lanes(sc.lanes, sc.ego.pose, lane_filter_width(sc));
    out.label = label_target_lane(out.relevant, sc.ego.expert_trajectory);
    const LaneCandidate& cand = *out.relevant.slot(out.label.slot);
    const double need = polyline_length(route_polyline(sc)) + 60.0;
    out.centerline = extended_centerline(sc, cand.lane_id, need);
    return out;
}

void write_record(const std::string& path, const Json& payload) {
    write_text_file(path, canonical_json(payload));
}

int cmd_labels(const std::string& scenario_path, const std::string& out_path) {
    const ScenarioSpec sc = load_scenario(scenario_path);
    const LabeledLane labeled = label_scenario_lane(sc);
    Json out = record_envelope(sc);
    out["relevant_lanes"] = relevant_lanes_to_json(labeled.relevant);
    out["target_lane"] = label_to_json(labeled.label);
    write_record(out_path, out);
    return 0;
}

int cmd_snap(const std::string& scenario_path, std::optional<double> w,
             const std::string& out_path) {
    const ScenarioSpec sc = load_scenario(scenario_path);
    const LabeledLane labeled = label_scenario_lane(sc);
    const double snap_w = w.value_or(sc.thresholds.w_snap);
    const SpatialTarget target =
        generate_spatial_target(sc.ego.expert_trajectory, labeled.centerline, snap_w);
    Json out = record_envelope(sc);
    out["target_lane"] = label_to_json(labeled.label);
    out["spatial_target"] = spatial_target_to_json(target);
    write_record(out_path, out);
    return 0;
}

int cmd_ntps(const std::string& scenario_path, const std::string& pred_path,
             std::optional<double> beta, const std::string& out_path) {
    const ScenarioSpec sc = load_scenario(scenario_path);
    Json pred_json;
    try {
        pred_json = Json::parse(read_text_file(pred_path));
    } catch (const Json::exception& e) {
        throw ParseError(pred_path + ": " + std::string(e.what()));
    }
    const Trajectory pred = trajectory_from_json(pred_json);
    const double margin = beta.value_or(sc.thresholds.beta);
    const CollisionSet set =
        detect_collisions(pred, sc.ego.width, sc.ego.length, sc.ego.pose.heading,
                          agents_for_horizon(sc, pred), margin);
    Json out = record_envelope(sc);
    out["collision_set"] = collision_set_to_json(set);
    out["loss"] = ntps_loss(set);
    out["gradient"] = gradient_to_json(ntps_gradient(pred, set));
    write_record(out_path, out);
    return 0;
}

int cmd_loss(const std::string& scenario_path, const std::string& pred_path,
             const std::optional<std::vector<double>>& weight_values, bool class_weighted,
             const std::optional<std::string>& out_path) {
    const ScenarioSpec sc = load_scenario(scenario_path);
    Json pred_json;
    try {
        pred_json = Json::parse(read_text_file(pred_path));
    } catch (const Json::exception& e) {
        throw ParseError(pred_path + ": " + std::string(e.what()));
    }
    const Trajectory pred = trajectory_from_json(pred_json);

    LossWeights weights;
    if (weight_values) {
        if (weight_values->size() != 3) {
            throw ValidationError("--weights expects three comma-separated values");
        }
        weights = {(*weight_values)[0], (*weight_values)[1], (*weight_values)[2]};
    }
    const std::optional<ClassWeights> class_weights =
        class_weighted ? std::optional<ClassWeights>(kInverseFrequencyWeights) : std::nullopt;

    const SupervisionRecord record =
        build_supervision_record(sc, pred, weights, class_weights);
    Json out = record_envelope(sc);
    out.update(supervision_record_to_json(record));
    out["weights"] = weights_to_json(weights);
    if (out_path) {
        write_record(*out_path, out);
    } else {
        std::cout << canonical_json(out);
    }
    return 0;
}

int cmd_optimize(const std::string& scenario_path, const std::string& lane_choice,
                 std::optional<double> w, std::optional<double> beta, double step_size,
                 int max_iters, const std::string& out_path) {
    const ScenarioSpec sc = load_scenario(scenario_path);
    const RelevantLaneSet relevant =
        filter_relevant_lanes(sc.lanes, sc.ego.pose, lane_filter_width(sc));

    LaneSlot slot;
    if (lane_choice == "auto") {
        slot = label_target_lane(relevant, sc.ego.expert_trajectory).slot;
    } else if (lane_choice == "left") {
        slot = LaneSlot::Left;
    } else if (lane_choice == "current") {
        slot = LaneSlot::Current;
    } else if (lane_choice == "right") {
        slot = LaneSlot::Right;
    } else {
        throw ValidationError("--lane must be one of auto|left|current|right");
    }
    const auto& cand = relevant.slot(slot);
    if (!cand) {
        throw ValidationError(std::string("requested lane slot '") + to_string(slot) +
                              "' is absent at the ego pose");
    }
    const Polyline centerline =
        extended_centerline(sc, cand->lane_id, polyline_length(route_polyline(sc)) + 60.0);

    OptimizerConfig cfg;
    cfg.step_size = step_size;
    cfg.max_iters = max_iters;
    const Trajectory& expert = sc.ego.expert_trajectory;
    const OptimizeResult res = optimize_trajectory(
        expert, centerline, expert, agents_for_horizon(sc, expert), LossWeights{}, cfg,
        w.value_or(sc.thresholds.w_snap), beta.value_or(sc.thresholds.beta), sc.ego.width,
        sc.ego.length, sc.ego.pose.heading);

    Json out = record_envelope(sc);
    out["chosen_lane"] = to_string(slot);
    out["trajectory"] = trajectory_to_json(res.trajectory);
    out["final_loss"] = breakdown_to_json(res.final_loss);
    out["iterations"] = res.iterations;
    out["loss_history"] = res.loss_history;
    write_record(out_path, out);
    return 0;
}

PlannerKind parse_planner(const std::string& name, double noise) {
    if (name == "replay") return {PlannerType::Replay, noise};
    if (name == "centerline") return {PlannerType::CenterlineFollow, 0.0};
    if (name == "pgs") return {PlannerType::PgsFull, 0.0};
    throw ValidationError("--planner must be one of replay|centerline|pgs");
}

int cmd_simulate(const std::string& scenario_path, const std::string& planner, double noise,
                 const std::string& metrics_path, const std::optional<std::string>& trace_path) {
    const ScenarioSpec sc = load_scenario(scenario_path);
    const PlannerKind kind = parse_planner(planner, noise);
    const RunResult result = run(sc, kind);
    Json out = record_envelope(sc);
    out["planner"] = planner;
    out["metrics"] = metrics_to_json(result.metrics);
    write_record(metrics_path, out);
    if (trace_path) {
        write_text_file(*trace_path, trace_payload(sc, result.trace));
    }
    return 0;
}

int cmd_simulate_batch(const std::string& batch_dir, const std::string& planner, double noise,
                       const std::string& out_dir) {
    const PlannerKind kind = parse_planner(planner, noise);
    std::vector<std::filesystem::path> inputs;
    for (const auto& entry : std::filesystem::directory_iterator(batch_dir)) {
        if (entry.path().extension() == ".json") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());  // output ordering by filename
    std::filesystem::create_directories(out_dir);
    for (const auto& path : inputs) {
        const ScenarioSpec sc = load_scenario(path.string());
        const RunResult result = run(sc, kind);
        Json out = record_envelope(sc);
        out["planner"] = planner;
        out["metrics"] = metrics_to_json(result.metrics);
        const auto out_path =
            std::filesystem::path(out_dir) / (path.stem().string() + ".metrics.json");
        write_record(out_path.string(), out);
        std::cout << path.filename().string() << ": success="
                  << (result.metrics.success ? "true" : "false")
                  << " collisions=" << result.metrics.collisions << "\n";
    }
    return 0;
}

int cmd_gradcheck(double h) {
    Json out;
    out["tool_version"] = kToolVersion;
    out["h"] = h;
    bool all_pass = true;

    MtpsInput mtps;
    mtps.scores = {0.8, -0.3, 0.1};
    mtps.label = {LaneSlot::Current, 0.0};
    const FiniteDiffReport rm = finite_diff_check(mtps, h);
    out["checks"]["mtps"] = finite_diff_report_to_json(rm);
    out["checks"]["mtps"]["pass"] = rm.max_rel_error < 1e-6;
    all_pass = all_pass && rm.max_rel_error < 1e-6;

    MtpsInput weighted = mtps;
    weighted.label = {LaneSlot::Left, 0.0};
    weighted.class_weights = kInverseFrequencyWeights;
    const FiniteDiffReport rw = finite_diff_check(weighted, h);
    out["checks"]["mtps_weighted"] = finite_diff_report_to_json(rw);
    out["checks"]["mtps_weighted"]["pass"] = rw.max_rel_error < 1e-6;
    all_pass = all_pass && rw.max_rel_error < 1e-6;

    Polyline centerline;
    centerline.points = {{-10.0, 0.0}, {60.0, 0.0}};
    centerline = densify(centerline, 0.5);
    Trajectory gt;
    gt.dt = 0.5;
    for (int i = 0; i < 8; ++i) gt.points.push_back({2.5 * i, 0.0});
    Trajectory pred = gt;
    for (Point2& p : pred.points) p.y += 1.2;
    StpsInput stps{pred, generate_spatial_target(gt, centerline, 2.0)};
    const FiniteDiffReport rs = finite_diff_check(stps, h);
    out["checks"]["stps"] = finite_diff_report_to_json(rs);
    out["checks"]["stps"]["pass"] = rs.max_rel_error < 1e-6;
    all_pass = all_pass && rs.max_rel_error < 1e-6;

    Trajectory ego;
    ego.dt = 0.5;
    ego.points = {{0, 0}, {5, 0}, {10, 0}, {17, 0}, {21, 0}, {28, 0}, {33, 0}, {38, 0}};
    AgentTrack agent;
    agent.id = "parked";
    agent.width = 2.0;
    agent.length = 4.5;
    agent.initial_pose = {{20.0, 1.5}, 0.0};
    Trajectory script;
    script.dt = 0.5;
    script.points.assign(8, {20.0, 1.5});
    agent.modes = {{1.0, script}};
    const CollisionSet set = detect_collisions(ego, 2.0, 4.5, 0.0, {agent}, 4.0);
    const FiniteDiffReport rn = finite_diff_check(ego, set, h);
    out["checks"]["ntps"] = finite_diff_report_to_json(rn);
    out["checks"]["ntps"]["pass"] = rn.max_rel_error < 1e-5;
    all_pass = all_pass && rn.max_rel_error < 1e-5;

    std::cout << canonical_json(out);
    return all_pass ? 0 : 2;
}

int cmd_gen(const std::string& kind_name, std::uint64_t seed, const std::string& out_path) {
    const auto kind = parse_scenario_kind(kind_name);
    if (!kind) {
        throw ValidationError(
            "unknown scenario kind '" + kind_name +
            "' (expected straight3|curve|intersection|overtake|merge)");
    }
    save_scenario(generate_synthetic(*kind, seed), out_path);
    return 0;
}

int cmd_plot(const std::string& input_path, const std::optional<std::string>& scenario_path,
             const std::string& out_path) {
    const std::string content = read_text_file(input_path);

    // Scenario files are single JSON objects with a "lanes" field; trace
    // files are line-delimited records.
    Json first_line;
    const std::size_t newline = content.find('\n');
    try {
        first_line = Json::parse(content.substr(0, newline));
    } catch (const Json::exception&) {
        first_line = Json();
    }

    if (!first_line.is_object() || !first_line.contains("tool_version") ||
        first_line.contains("lanes")) {
        Json whole;
        try {
            whole = Json::parse(content);
        } catch (const Json::exception& e) {
            throw ParseError(input_path + ": " + std::string(e.what()));
        }
        ScenarioSpec sc = scenario_from_json(whole);
        finalize_scenario(sc);
        validate_scenario(sc);
        write_text_file(out_path, render_svg(sc));
        return 0;
    }

    std::vector<StepTrace> trace;
    std::size_t pos = newline == std::string::npos ? content.size() : newline + 1;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        const std::string line = content.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        try {
            trace.push_back(step_trace_from_json(Json::parse(line)));
        } catch (const Json::exception& e) {
            throw ParseError(input_path + ": " + std::string(e.what()));
        }
    }
    ScenarioSpec sc;
    if (scenario_path) {
        sc = load_scenario(*scenario_path);
    }
    write_text_file(out_path, render_svg(sc, &trace));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lane-supervision toolkit: lane labeling, trajectory snapping, collision "
                 "supervision, trajectory optimization, and a closed-loop simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, pred_path, planner = "centerline";
    std::string metrics_path, kind_name, lane_choice = "auto", input_path;
    std::optional<std::string> trace_path, maybe_out, overlay_scenario, batch_dir;
    std::optional<double> snap_w, beta;
    std::optional<std::vector<double>> weight_values;
    bool class_weighted = false;
    double noise = 0.0, h = kDefaultGradcheckStep, step_size = 0.1;
    int max_iters = 200;
    std::uint64_t seed = 0;

    auto* labels = app.add_subcommand("labels", "Relevant lanes and the target-lane label");
    labels->add_option("scenario", scenario_path)->required();
    labels->add_option("--out", out_path)->required();

    auto* snap = app.add_subcommand("snap", "Centerline-snapped spatial target trajectory");
    snap->add_option("scenario", scenario_path)->required();
    snap->add_option("--w", snap_w, "Snap threshold in meters");
    snap->add_option("--out", out_path)->required();

    auto* ntps = app.add_subcommand("ntps", "Collision set, hinge loss, and gradient");
    ntps->add_option("scenario", scenario_path)->required();
    ntps->add_option("--pred", pred_path, "Trajectory JSON file")->required();
    ntps->add_option("--beta", beta, "Hinge margin in meters");
    ntps->add_option("--out", out_path)->required();

    auto* loss = app.add_subcommand("loss", "Weighted combination of the three losses");
    loss->add_option("scenario", scenario_path)->required();
    loss->add_option("--pred", pred_path)->required();
    loss->add_option("--weights", weight_values, "w_mtps,w_stps,w_ntps")->delimiter(',');
    loss->add_flag("--class-weighted", class_weighted,
                   "Apply inverse-frequency class weights to the lane loss");
    loss->add_option("--out", maybe_out);

    auto* optimize = app.add_subcommand("optimize", "Gradient-descent trajectory refinement");
    optimize->add_option("scenario", scenario_path)->required();
    optimize->add_option("--lane", lane_choice, "auto|left|current|right");
    optimize->add_option("--w", snap_w);
    optimize->add_option("--beta", beta);
    optimize->add_option("--step", step_size, "Step size in meters per unit gradient");
    optimize->add_option("--iters", max_iters);
    optimize->add_option("--out", out_path)->required();

    auto* simulate = app.add_subcommand("simulate", "Closed-loop run with metrics and trace");
    simulate->add_option("scenario", scenario_path);
    simulate->add_option("--planner", planner, "replay|centerline|pgs")->required();
    simulate->add_option("--noise", noise, "Replay lateral noise sigma in meters");
    simulate->add_option("--metrics", metrics_path)->required();
    simulate->add_option("--trace", trace_path);
    simulate->add_option("--batch", batch_dir,
                         "Run every scenario .json in a directory; --metrics names the output "
                         "directory");

    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient validation");
    gradcheck->set_help_flag("--help", "Print help");  // frees -h for the step option
    gradcheck->add_option("--h", h, "Perturbation step");

    auto* gen = app.add_subcommand("gen", "Generate a synthetic scenario");
    gen->add_option("kind", kind_name, "straight3|curve|intersection|overtake|merge")
        ->required();
    gen->add_option("--seed", seed);
    gen->add_option("--out", out_path)->required();

    auto* plot = app.add_subcommand("plot", "Render a scenario or trace to SVG");
    plot->add_option("input", input_path, "Scenario or trace file")->required();
    plot->add_option("--scenario", overlay_scenario, "Scenario overlay for trace plots");
    plot->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (labels->parsed()) return cmd_labels(scenario_path, out_path);
        if (snap->parsed()) return cmd_snap(scenario_path, snap_w, out_path);
        if (ntps->parsed()) return cmd_ntps(scenario_path, pred_path, beta, out_path);
        if (loss->parsed()) {
            return cmd_loss(scenario_path, pred_path, weight_values, class_weighted, maybe_out);
        }
        if (optimize->parsed()) {
            return cmd_optimize(scenario_path, lane_choice, snap_w, beta, step_size, max_iters,
                                out_path);
        }
        if (simulate->parsed()) {
            if (batch_dir) return cmd_simulate_batch(*batch_dir, planner, noise, metrics_path);
            if (scenario_path.empty()) {
                throw ValidationError("simulate requires a scenario path or --batch");
            }
            return cmd_simulate(scenario_path, planner, noise, metrics_path, trace_path);
        }
        if (gradcheck->parsed()) return cmd_gradcheck(h);
        if (gen->parsed()) return cmd_gen(kind_name, seed, out_path);
        if (plot->parsed()) return cmd_plot(input_path, overlay_scenario, out_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
