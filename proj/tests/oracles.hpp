#pragma once
// Test-only oracles, kept independent of the library code paths they
// check: exhaustive scans, dense sampling, exact polygon predicates, and
// central differences.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pgs/geometry.hpp"
#include "pgs/trajectory.hpp"

namespace oracle {

using pgs::OrientedBox;
using pgs::Point2;
using pgs::Polyline;

// Exhaustive scan over all vertices.
inline std::pair<std::size_t, double> brute_force_nearest_vertex(const Polyline& poly,
                                                                 const Point2& p) {
    std::size_t best_idx = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.points.size(); ++i) {
        const double d = std::hypot(poly.points[i].x - p.x, poly.points[i].y - p.y);
        if (d < best) {
            best = d;
            best_idx = i;
        }
    }
    return {best_idx, best};
}

// Dense sampling along every segment (samples_per_segment points each).
inline double dense_sampling_distance(const Polyline& poly, const Point2& p,
                                      int samples_per_segment = 10000) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < poly.points.size(); ++i) {
        const Point2& a = poly.points[i - 1];
        const Point2& b = poly.points[i];
        for (int k = 0; k <= samples_per_segment; ++k) {
            const double t = static_cast<double>(k) / samples_per_segment;
            const double x = a.x + (b.x - a.x) * t;
            const double y = a.y + (b.y - a.y) * t;
            best = std::min(best, std::hypot(x - p.x, y - p.y));
        }
    }
    return best;
}

// Exact point-in-oriented-box test via the box local frame.
inline bool point_in_box(const Point2& p, const OrientedBox& box, double tol = 0.0) {
    const double c = std::cos(box.heading);
    const double s = std::sin(box.heading);
    const double dx = p.x - box.center.x;
    const double dy = p.y - box.center.y;
    const double u = dx * c + dy * s;   // longitudinal
    const double v = -dx * s + dy * c;  // lateral
    return std::abs(u) <= box.half_length + tol && std::abs(v) <= box.half_width + tol;
}

inline std::array<Point2, 4> oracle_corners(const OrientedBox& box) {
    const double c = std::cos(box.heading);
    const double s = std::sin(box.heading);
    std::array<Point2, 4> out;
    const double su[4] = {+1, -1, -1, +1};
    const double sv[4] = {+1, +1, -1, -1};
    for (int i = 0; i < 4; ++i) {
        const double u = su[i] * box.half_length;
        const double v = sv[i] * box.half_width;
        out[i] = {box.center.x + u * c - v * s, box.center.y + u * s + v * c};
    }
    return out;
}

// Dense point sampling: grid over box a plus points along every edge of
// both boxes, each tested against the other box.
inline bool sampling_overlap(const OrientedBox& a, const OrientedBox& b, int grid = 120,
                             int edge_samples = 2000) {
    const double ca = std::cos(a.heading), sa = std::sin(a.heading);
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            const double u = (-1.0 + 2.0 * i / grid) * a.half_length;
            const double v = (-1.0 + 2.0 * j / grid) * a.half_width;
            const Point2 p{a.center.x + u * ca - v * sa, a.center.y + u * sa + v * ca};
            if (point_in_box(p, b)) return true;
        }
    }
    const auto sample_edges = [&](const OrientedBox& box, const OrientedBox& other) {
        const auto corners = oracle_corners(box);
        for (int e = 0; e < 4; ++e) {
            const Point2& p0 = corners[e];
            const Point2& p1 = corners[(e + 1) % 4];
            for (int k = 0; k <= edge_samples; ++k) {
                const double t = static_cast<double>(k) / edge_samples;
                const Point2 p{p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t};
                if (point_in_box(p, other)) return true;
            }
        }
        return false;
    };
    if (sample_edges(a, b) || sample_edges(b, a)) return true;
    // Containment with no boundary contact.
    return point_in_box(a.center, b) || point_in_box(b.center, a);
}

// Sutherland-Hodgman clip of polygon `subject` by the convex `clip`
// polygon (counter-clockwise). Returns the intersection polygon.
inline std::vector<Point2> clip_polygon(std::vector<Point2> subject,
                                        const std::array<Point2, 4>& clip) {
    for (int e = 0; e < 4 && !subject.empty(); ++e) {
        const Point2& a = clip[e];
        const Point2& b = clip[(e + 1) % 4];
        const double ex = b.x - a.x;
        const double ey = b.y - a.y;
        const auto inside = [&](const Point2& p) {
            return ex * (p.y - a.y) - ey * (p.x - a.x) >= 0.0;
        };
        const auto intersect = [&](const Point2& p, const Point2& q) {
            const double dpx = q.x - p.x, dpy = q.y - p.y;
            const double denom = ex * dpy - ey * dpx;
            const double t = (ey * (p.x - a.x) - ex * (p.y - a.y)) / denom;
            return Point2{p.x + dpx * t, p.y + dpy * t};
        };
        std::vector<Point2> out;
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const Point2& cur = subject[i];
            const Point2& nxt = subject[(i + 1) % subject.size()];
            const bool cur_in = inside(cur);
            const bool nxt_in = inside(nxt);
            if (cur_in) out.push_back(cur);
            if (cur_in != nxt_in) out.push_back(intersect(cur, nxt));
        }
        subject = std::move(out);
    }
    return subject;
}

// Polygon-clipping overlap decision: nonempty intersection polygon.
inline bool clipping_overlap(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = oracle_corners(a);
    const auto cb = oracle_corners(b);
    std::vector<Point2> subject(ca.begin(), ca.end());
    return !clip_polygon(std::move(subject), cb).empty();
}

// Signed penetration (positive) or separation (negative) margin from the
// four edge-normal projections, computed directly from corners.
inline double overlap_margin(const OrientedBox& a, const OrientedBox& b) {
    const auto ca = oracle_corners(a);
    const auto cb = oracle_corners(b);
    const double axes[4][2] = {
        {std::cos(a.heading), std::sin(a.heading)},
        {-std::sin(a.heading), std::cos(a.heading)},
        {std::cos(b.heading), std::sin(b.heading)},
        {-std::sin(b.heading), std::cos(b.heading)},
    };
    double min_overlap = std::numeric_limits<double>::infinity();
    double max_gap = -std::numeric_limits<double>::infinity();
    for (const auto& axis : axes) {
        double alo = 1e300, ahi = -1e300, blo = 1e300, bhi = -1e300;
        for (int i = 0; i < 4; ++i) {
            const double pa = ca[i].x * axis[0] + ca[i].y * axis[1];
            const double pb = cb[i].x * axis[0] + cb[i].y * axis[1];
            alo = std::min(alo, pa);
            ahi = std::max(ahi, pa);
            blo = std::min(blo, pb);
            bhi = std::max(bhi, pb);
        }
        const double overlap = std::min(ahi, bhi) - std::max(alo, blo);
        min_overlap = std::min(min_overlap, overlap);
        max_gap = std::max(max_gap, -overlap);
    }
    return max_gap > 0.0 ? -max_gap : min_overlap;
}

// Central difference of a scalar function of one coordinate.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct RigidTransform {
    double angle = 0.0;
    Point2 shift;

    Point2 apply(const Point2& p) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {p.x * c - p.y * s + shift.x, p.x * s + p.y * c + shift.y};
    }
    Polyline apply(const Polyline& poly) const {
        Polyline out;
        for (const Point2& p : poly.points) out.points.push_back(apply(p));
        return out;
    }
    pgs::Trajectory apply(const pgs::Trajectory& traj) const {
        pgs::Trajectory out = traj;
        for (Point2& p : out.points) p = apply(p);
        return out;
    }
    OrientedBox apply(const OrientedBox& box) const {
        return {apply(box.center), box.half_width, box.half_length,
                pgs::normalize_angle(box.heading + angle)};
    }
};

}  // namespace oracle
