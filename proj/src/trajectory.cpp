#include "pgs/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace pgs {

bool trajectory_valid(const Trajectory& traj) {
    if (traj.points.empty() || !(traj.dt > 0.0)) return false;
    for (const Point2& p : traj.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    }
    return true;
}

std::vector<double> headings_from_offsets(const Trajectory& traj, double fallback) {
    const std::size_t n = traj.points.size();
    std::vector<double> headings(n, fallback);
    if (n == 0) return headings;

    double prev = fallback;
    for (std::size_t t = 0; t < n; ++t) {
        Point2 offset;
        if (t + 1 < n) {
            offset = traj.points[t + 1] - traj.points[t];
        } else if (n >= 2) {
            offset = traj.points[n - 1] - traj.points[n - 2];
        }
        if (offset.norm() >= kHeadingOffsetEpsilon) {
            prev = std::atan2(offset.y, offset.x);
        }
        headings[t] = prev;
    }
    return headings;
}

Polyline trajectory_polyline(const Trajectory& traj) {
    Polyline poly;
    for (const Point2& p : traj.points) {
        if (poly.points.empty() || distance(poly.points.back(), p) >= kMinVertexSpacing) {
            poly.points.push_back(p);
        }
    }
    if (poly.points.size() < 2) poly.points.clear();
    return poly;
}

Trajectory slice_clamped(const Trajectory& traj, std::size_t start, std::size_t count) {
    Trajectory out;
    out.dt = traj.dt;
    out.t0 = traj.t0 + static_cast<double>(start) * traj.dt;
    out.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t idx = std::min(start + i, traj.points.size() - 1);
        out.points.push_back(traj.points[idx]);
    }
    return out;
}

}  // namespace pgs
