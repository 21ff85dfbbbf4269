#include "pgs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pgs {

bool polyline_valid(const Polyline& poly) {
    if (poly.points.size() < 2) return false;
    for (const Point2& p : poly.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    }
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        if (distance(poly.points[i - 1], poly.points[i]) < kMinVertexSpacing) return false;
    }
    return true;
}

double polyline_length(const Polyline& poly) {
    double total = 0.0;
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        total += distance(poly.points[i - 1], poly.points[i]);
    }
    return total;
}

NearestVertex nearest_point_discrete(const Polyline& poly, const Point2& p) {
    NearestVertex best;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.points.size(); ++i) {
        const double sq = (poly.points[i] - p).squared_norm();
        if (sq < best_sq) {
            best_sq = sq;
            best.point = poly.points[i];
            best.index = i;
        }
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

Projection project_point(const Polyline& poly, const Point2& p) {
    Projection best;
    double best_sq = std::numeric_limits<double>::infinity();
    double arc_before = 0.0;
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const Point2& a = poly.points[i - 1];
        const Point2& b = poly.points[i];
        const Point2 ab = b - a;
        const double len_sq = ab.squared_norm();
        double t = len_sq > 0.0 ? (p - a).dot(ab) / len_sq : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Point2 foot = a + ab * t;
        const double sq = (foot - p).squared_norm();
        if (sq < best_sq) {
            best_sq = sq;
            best.point = foot;
            best.arc_length = arc_before + t * std::sqrt(len_sq);
        }
        arc_before += std::sqrt(len_sq);
    }
    best.distance = std::sqrt(best_sq);
    return best;
}

Point2 point_at_arc_length(const Polyline& poly, double s) {
    if (s <= 0.0) return poly.points.front();
    double remaining = s;
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const Point2& a = poly.points[i - 1];
        const Point2& b = poly.points[i];
        const double seg = distance(a, b);
        if (remaining <= seg) {
            const double t = seg > 0.0 ? remaining / seg : 0.0;
            return a + (b - a) * t;
        }
        remaining -= seg;
    }
    return poly.points.back();
}

double tangent_at_arc_length(const Polyline& poly, double s) {
    double remaining = std::max(s, 0.0);
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const Point2 d = poly.points[i] - poly.points[i - 1];
        const double seg = d.norm();
        if (remaining <= seg || i + 1 == poly.points.size()) {
            return std::atan2(d.y, d.x);
        }
        remaining -= seg;
    }
    return 0.0;
}

Polyline densify(const Polyline& poly, double max_spacing) {
    Polyline out;
    out.points.reserve(poly.points.size());
    out.points.push_back(poly.points.front());
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const Point2& a = poly.points[i - 1];
        const Point2& b = poly.points[i];
        const double seg = distance(a, b);
        // The 1e-9 slack keeps densification idempotent: segments already
        // at the target spacing are not re-split by rounding noise.
        const int pieces = std::max(1, static_cast<int>(std::ceil(seg / max_spacing - 1e-9)));
        for (int k = 1; k <= pieces; ++k) {
            const double t = static_cast<double>(k) / pieces;
            out.points.push_back(a + (b - a) * t);
        }
    }
    return out;
}

std::array<Point2, 4> box_corners(const OrientedBox& box) {
    const double c = std::cos(box.heading);
    const double s = std::sin(box.heading);
    const Point2 fwd{c * box.half_length, s * box.half_length};
    const Point2 left{-s * box.half_width, c * box.half_width};
    return {
        box.center + fwd + left,   // front-left
        box.center - fwd + left,   // rear-left
        box.center - fwd - left,   // rear-right
        box.center + fwd - left,   // front-right
    };
}

namespace {

struct Interval {
    double lo;
    double hi;
};

Interval project_corners(const std::array<Point2, 4>& corners, const Point2& axis) {
    double lo = corners[0].dot(axis);
    double hi = lo;
    for (std::size_t i = 1; i < 4; ++i) {
        const double v = corners[i].dot(axis);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

}  // namespace

bool sat_overlap(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = box_corners(a);
    const auto cb = box_corners(b);
    const std::array<Point2, 4> axes = {
        Point2{std::cos(a.heading), std::sin(a.heading)},
        Point2{-std::sin(a.heading), std::cos(a.heading)},
        Point2{std::cos(b.heading), std::sin(b.heading)},
        Point2{-std::sin(b.heading), std::cos(b.heading)},
    };
    for (const Point2& axis : axes) {
        const Interval pa = project_corners(ca, axis);
        const Interval pb = project_corners(cb, axis);
        if (pa.hi < pb.lo || pb.hi < pa.lo) {
            return false;  // separating axis found
        }
    }
    return true;
}

}  // namespace pgs
