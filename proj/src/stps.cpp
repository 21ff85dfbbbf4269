#include "pgs/stps.hpp"

#include <cmath>

#include "pgs/errors.hpp"

namespace pgs {

namespace {

void require_matched(const Trajectory& pred, const SpatialTarget& spatial_target) {
    if (pred.points.size() != spatial_target.target.points.size()) {
        throw LengthMismatchError("prediction and spatial target differ in length");
    }
    if (pred.dt != spatial_target.target.dt) {
        throw LengthMismatchError("prediction and spatial target differ in dt");
    }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

SpatialTarget generate_spatial_target(const Trajectory& gt, const Polyline& target_centerline,
                                      double snap_threshold) {
    SpatialTarget out;
    out.target = gt;
    out.snapped.assign(gt.points.size(), 0);
    out.snap_threshold = snap_threshold;
    for (std::size_t t = 0; t < gt.points.size(); ++t) {
        const NearestVertex nearest = nearest_point_discrete(target_centerline, gt.points[t]);
        if (nearest.distance <= snap_threshold) {
            out.target.points[t] = nearest.point;
            out.snapped[t] = 1;
        }
    }
    return out;
}

double stps_loss(const Trajectory& pred, const SpatialTarget& spatial_target) {
    require_matched(pred, spatial_target);
    const std::size_t n = pred.points.size();
    double sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sum += (pred.points[t] - spatial_target.target.points[t]).norm1();
    }
    return sum / static_cast<double>(n);
}

std::vector<Point2> stps_gradient(const Trajectory& pred, const SpatialTarget& spatial_target) {
    require_matched(pred, spatial_target);
    const std::size_t n = pred.points.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<Point2> grad(n);
    for (std::size_t t = 0; t < n; ++t) {
        const Point2 delta = pred.points[t] - spatial_target.target.points[t];
        grad[t] = {inv_n * sign(delta.x), inv_n * sign(delta.y)};
    }
    return grad;
}

}  // namespace pgs
