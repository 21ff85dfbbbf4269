#include "pgs/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "pgs/errors.hpp"

namespace pgs {

LossBreakdown combine_losses(double mtps, double stps, double ntps, const LossWeights& weights) {
    LossBreakdown out;
    out.mtps = mtps;
    out.stps = stps;
    out.ntps = ntps;
    out.weighted_total = weights.w_mtps * mtps + weights.w_stps * stps + weights.w_ntps * ntps;
    return out;
}

LossBreakdown total_pgs_loss(const std::optional<MtpsInput>& mtps_in,
                             const std::optional<StpsInput>& stps_in,
                             const std::optional<CollisionSet>& ntps_in,
                             const LossWeights& weights) {
    if (!mtps_in && !stps_in && !ntps_in) {
        throw std::invalid_argument("total_pgs_loss requires at least one component");
    }
    const double mtps =
        mtps_in ? mtps_loss(mtps_in->scores, mtps_in->label, mtps_in->class_weights) : 0.0;
    const double stps = stps_in ? stps_loss(stps_in->pred, stps_in->spatial_target) : 0.0;
    const double ntps = ntps_in ? ntps_loss(*ntps_in) : 0.0;
    return combine_losses(mtps, stps, ntps, weights);
}

OptimizeResult optimize_trajectory(const Trajectory& init, const Polyline& target_centerline,
                                   const Trajectory& gt, const std::vector<AgentTrack>& agents,
                                   const LossWeights& weights, const OptimizerConfig& cfg,
                                   double snap_threshold, double beta, double ego_width,
                                   double ego_length, double ego_fallback_heading,
                                   const ModePolicy& mode_policy) {
    if (init.points.size() != gt.points.size() || init.dt != gt.dt) {
        throw LengthMismatchError("optimizer init and gt trajectories must share dt and length");
    }

    const SpatialTarget spatial = generate_spatial_target(gt, target_centerline, snap_threshold);

    auto detect = [&](const Trajectory& traj) {
        return detect_collisions(traj, ego_width, ego_length, ego_fallback_heading, agents, beta,
                                 mode_policy);
    };
    auto objective = [&](const Trajectory& traj, const CollisionSet& collisions) {
        return weights.w_stps * stps_loss(traj, spatial) +
               weights.w_ntps * ntps_loss_at(traj, collisions);
    };

    Trajectory current = init;
    CollisionSet collisions = detect(current);

    OptimizeResult result;
    result.trajectory = current;
    double best_loss = objective(current, collisions);
    double prev_loss = best_loss;
    result.loss_history.push_back(best_loss);

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const std::vector<Point2> stps_grad = stps_gradient(current, spatial);
        const std::vector<Point2> ntps_grad = ntps_gradient(current, collisions);
        for (std::size_t t = 0; t < current.points.size(); ++t) {
            const Point2 g = stps_grad[t] * weights.w_stps + ntps_grad[t] * weights.w_ntps;
            current.points[t] -= g * cfg.step_size;
        }

        if (iter % cfg.refresh_collisions_every == 0) {
            collisions = detect(current);
        } else {
            refresh_event_distances(collisions, current);
        }

        const double loss = objective(current, collisions);
        result.loss_history.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            result.trajectory = current;
        }
        result.iterations = iter;
        if (std::abs(loss - prev_loss) < cfg.convergence_tol) break;
        prev_loss = loss;
    }

    const CollisionSet final_set = detect(result.trajectory);
    result.final_loss = combine_losses(0.0, stps_loss(result.trajectory, spatial),
                                       ntps_loss(final_set), weights);
    return result;
}

namespace {

struct ErrorAccumulator {
    FiniteDiffReport report;

    void record(double analytic, double numeric, std::size_t point, int axis) {
        const double abs_err = std::abs(analytic - numeric);
        const double denom = std::max(std::abs(analytic), std::abs(numeric));
        const double rel_err = denom < 1e-12 ? 0.0 : abs_err / denom;
        ++report.checked;
        if (rel_err > report.max_rel_error) {
            report.max_rel_error = rel_err;
            report.worst_point = point;
            report.worst_axis = axis;
        }
        report.max_abs_error = std::max(report.max_abs_error, abs_err);
    }
};

}  // namespace

FiniteDiffReport finite_diff_check(const MtpsInput& input, double h) {
    ErrorAccumulator acc;
    const auto analytic = mtps_score_gradient(input.scores, input.label, input.class_weights);
    for (int i = 0; i < 3; ++i) {
        auto scores = input.scores;
        scores[i] = input.scores[i] + h;
        const double plus = mtps_loss(scores, input.label, input.class_weights);
        scores[i] = input.scores[i] - h;
        const double minus = mtps_loss(scores, input.label, input.class_weights);
        acc.record(analytic[i], (plus - minus) / (2.0 * h), static_cast<std::size_t>(i), 0);
    }
    return acc.report;
}

FiniteDiffReport finite_diff_check(const StpsInput& input, double h) {
    ErrorAccumulator acc;
    const auto analytic = stps_gradient(input.pred, input.spatial_target);
    Trajectory perturbed = input.pred;
    for (std::size_t t = 0; t < input.pred.points.size(); ++t) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? perturbed.points[t].x : perturbed.points[t].y;
            const double base = coord;
            const double target = axis == 0 ? input.spatial_target.target.points[t].x
                                            : input.spatial_target.target.points[t].y;
            if (std::abs(base - target) < 10.0 * h) {
                ++acc.report.skipped;  // within 10h of the L1 kink
                continue;
            }
            coord = base + h;
            const double plus = stps_loss(perturbed, input.spatial_target);
            coord = base - h;
            const double minus = stps_loss(perturbed, input.spatial_target);
            coord = base;
            const double grad = axis == 0 ? analytic[t].x : analytic[t].y;
            acc.record(grad, (plus - minus) / (2.0 * h), t, axis);
        }
    }
    return acc.report;
}

FiniteDiffReport finite_diff_check(const Trajectory& ego_traj, const CollisionSet& collisions,
                                   double h) {
    ErrorAccumulator acc;
    const auto analytic = ntps_gradient(ego_traj, collisions);

    // Points whose events sit within 10h of the hinge boundary or of zero
    // distance have an ill-defined difference quotient.
    std::vector<bool> near_kink(ego_traj.points.size(), false);
    for (const CollisionEvent& event : collisions.events) {
        const double d = distance(ego_traj.points[event.t], event.agent_point);
        if (std::abs(d - collisions.beta) < 10.0 * h || d < 10.0 * h) {
            near_kink[event.t] = true;
        }
    }

    Trajectory perturbed = ego_traj;
    for (std::size_t t = 0; t < ego_traj.points.size(); ++t) {
        if (near_kink[t]) {
            acc.report.skipped += 2;
            continue;
        }
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? perturbed.points[t].x : perturbed.points[t].y;
            const double base = coord;
            coord = base + h;
            const double plus = ntps_loss_at(perturbed, collisions);
            coord = base - h;
            const double minus = ntps_loss_at(perturbed, collisions);
            coord = base;
            const double grad = axis == 0 ? analytic[t].x : analytic[t].y;
            acc.record(grad, (plus - minus) / (2.0 * h), t, axis);
        }
    }
    return acc.report;
}

}  // namespace pgs
