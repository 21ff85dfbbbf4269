#include "pgs/ntps.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pgs/errors.hpp"

namespace pgs {

const AgentTrack::Mode& top_mode(const AgentTrack& agent) {
    if (agent.modes.empty()) {
        throw ValidationError("agent '" + agent.id + "' has no predicted modes");
    }
    const AgentTrack::Mode* best = &agent.modes.front();
    for (const auto& mode : agent.modes) {
        if (mode.score > best->score) best = &mode;
    }
    return *best;
}

FutureBoxSequence build_future_boxes(const Trajectory& traj, double width, double length,
                                     double fallback_heading) {
    FutureBoxSequence out;
    const std::vector<double> headings = headings_from_offsets(traj, fallback_heading);
    out.boxes.reserve(traj.points.size());
    for (std::size_t t = 0; t < traj.points.size(); ++t) {
        out.boxes.push_back({traj.points[t], 0.5 * width, 0.5 * length, headings[t]});
    }
    return out;
}

CollisionSet detect_collisions(
    const FutureBoxSequence& ego_boxes, const Trajectory& ego_traj,
    const std::vector<std::pair<const AgentTrack*, const Trajectory*>>& agents, double beta) {
    const std::size_t horizon = ego_traj.points.size();
    if (ego_boxes.boxes.size() != horizon) {
        throw HorizonMismatchError("ego box count does not match the ego trajectory length");
    }
    CollisionSet out;
    out.beta = beta;
    for (const auto& [agent, traj] : agents) {
        if (traj->points.size() != horizon || traj->dt != ego_traj.dt) {
            throw HorizonMismatchError("agent trajectory does not share dt and horizon with ego");
        }
        const FutureBoxSequence agent_boxes =
            build_future_boxes(*traj, agent->width, agent->length, agent->initial_pose.heading);
        for (std::size_t t = 0; t < horizon; ++t) {
            if (!sat_overlap(ego_boxes.boxes[t], agent_boxes.boxes[t])) continue;
            CollisionEvent event;
            event.t = t;
            event.agent_id = agent->id;
            event.ego_point = ego_traj.points[t];
            event.agent_point = traj->points[t];
            event.center_distance = distance(event.ego_point, event.agent_point);
            out.events.push_back(std::move(event));
        }
    }
    std::sort(out.events.begin(), out.events.end(),
              [](const CollisionEvent& a, const CollisionEvent& b) {
                  return a.t != b.t ? a.t < b.t : a.agent_id < b.agent_id;
              });
    return out;
}

CollisionSet detect_collisions(const Trajectory& ego_traj, double ego_width, double ego_length,
                               double ego_fallback_heading, const std::vector<AgentTrack>& agents,
                               double beta, const ModePolicy& policy) {
    const FutureBoxSequence ego_boxes =
        build_future_boxes(ego_traj, ego_width, ego_length, ego_fallback_heading);

    // Union over checked modes; duplicate (t, agent) pairs keep the
    // smallest center distance.
    std::map<std::pair<std::size_t, std::string>, CollisionEvent> merged;
    for (const AgentTrack& agent : agents) {
        if (agent.modes.empty()) continue;
        std::vector<const Trajectory*> chosen;
        if (policy.all_above_threshold) {
            for (const auto& mode : agent.modes) {
                if (mode.score >= policy.score_threshold) chosen.push_back(&mode.trajectory);
            }
            if (chosen.empty()) chosen.push_back(&top_mode(agent).trajectory);
        } else {
            chosen.push_back(&top_mode(agent).trajectory);
        }
        for (const Trajectory* traj : chosen) {
            const CollisionSet partial =
                detect_collisions(ego_boxes, ego_traj, {{&agent, traj}}, beta);
            for (const CollisionEvent& event : partial.events) {
                const auto key = std::make_pair(event.t, event.agent_id);
                auto it = merged.find(key);
                if (it == merged.end() || event.center_distance < it->second.center_distance) {
                    merged[key] = event;
                }
            }
        }
    }

    CollisionSet out;
    out.beta = beta;
    out.events.reserve(merged.size());
    for (auto& [key, event] : merged) out.events.push_back(std::move(event));
    std::sort(out.events.begin(), out.events.end(),
              [](const CollisionEvent& a, const CollisionEvent& b) {
                  return a.t != b.t ? a.t < b.t : a.agent_id < b.agent_id;
              });
    return out;
}

double ntps_loss(const CollisionSet& collisions) {
    double sum = 0.0;
    for (const CollisionEvent& event : collisions.events) {
        sum += std::max(0.0, collisions.beta - event.center_distance);
    }
    return sum;
}

double ntps_loss_at(const Trajectory& ego_traj, const CollisionSet& collisions) {
    double sum = 0.0;
    for (const CollisionEvent& event : collisions.events) {
        const double d = distance(ego_traj.points[event.t], event.agent_point);
        sum += std::max(0.0, collisions.beta - d);
    }
    return sum;
}

void refresh_event_distances(CollisionSet& collisions, const Trajectory& ego_traj) {
    for (CollisionEvent& event : collisions.events) {
        event.ego_point = ego_traj.points[event.t];
        event.center_distance = distance(event.ego_point, event.agent_point);
    }
}

std::vector<Point2> ntps_gradient(const Trajectory& ego_traj, const CollisionSet& collisions) {
    std::vector<Point2> grad(ego_traj.points.size());
    for (const CollisionEvent& event : collisions.events) {
        const Point2 offset = ego_traj.points[event.t] - event.agent_point;
        const double d = offset.norm();
        if (d < kDegenerateDistance) {
            throw DegenerateDistanceError("collision event with near-zero center distance");
        }
        if (d < collisions.beta) {
            grad[event.t] -= offset * (1.0 / d);
        }
    }
    return grad;
}

}  // namespace pgs
