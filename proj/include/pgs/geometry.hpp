#pragma once
/**
 * @file geometry.hpp
 * @brief Foundational 2D primitives: points, poses, polylines, oriented
 *        boxes, and the separating-axis overlap test.
 *
 * Frame convention: +x east, +y north, headings in radians measured
 * counter-clockwise from +x and normalized to (-pi, pi]. All operations
 * here are pure functions over immutable values.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace pgs {

inline constexpr double kPi = 3.14159265358979323846;

/// Minimum separation between consecutive polyline vertices.
inline constexpr double kMinVertexSpacing = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Point2 operator+(const Point2& r) const { return {x + r.x, y + r.y}; }
    constexpr Point2 operator-(const Point2& r) const { return {x - r.x, y - r.y}; }
    constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
    friend constexpr Point2 operator*(double s, const Point2& p) { return {p.x * s, p.y * s}; }
    Point2& operator+=(const Point2& r) { x += r.x; y += r.y; return *this; }
    Point2& operator-=(const Point2& r) { x -= r.x; y -= r.y; return *this; }

    constexpr double dot(const Point2& r) const { return x * r.x + y * r.y; }
    /// Scalar 2D cross product: this.x * r.y - this.y * r.x.
    constexpr double cross(const Point2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
    constexpr double squared_norm() const { return x * x + y * y; }
    /// L1 norm |x| + |y|.
    double norm1() const { return std::abs(x) + std::abs(y); }
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Wrap an angle to (-pi, pi].
inline double normalize_angle(double angle) {
    double r = std::remainder(angle, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

struct Pose2 {
    Point2 position;
    double heading = 0.0;  // radians in (-pi, pi]
};

/// Ordered 2D centerline points. Valid polylines have >= 2 points and
/// consecutive vertices separated by at least kMinVertexSpacing.
struct Polyline {
    std::vector<Point2> points;
};

bool polyline_valid(const Polyline& poly);

/// Total arc length over all segments.
double polyline_length(const Polyline& poly);

struct NearestVertex {
    Point2 point;
    std::size_t index = 0;
    double distance = 0.0;
};

/// Vertex of `poly` minimizing Euclidean distance to `p`.
/// Ties are broken by lowest index.
NearestVertex nearest_point_discrete(const Polyline& poly, const Point2& p);

struct Projection {
    Point2 point;
    double arc_length = 0.0;  // measured from the polyline start
    double distance = 0.0;
};

/// Closest point on any segment of `poly` (continuous projection).
Projection project_point(const Polyline& poly, const Point2& p);

/// Point at arc length `s` from the polyline start, clamped to [0, length].
Point2 point_at_arc_length(const Polyline& poly, double s);

/// Heading of the segment containing arc length `s` (end segment for s
/// beyond the last vertex).
double tangent_at_arc_length(const Polyline& poly, double s);

/// Insert evenly spaced vertices so consecutive spacing <= max_spacing.
/// Original vertices are preserved.
Polyline densify(const Polyline& poly, double max_spacing);

/**
 * Side of a displacement relative to a heading, as the scalar cross
 * product rel.x * sin(heading) - rel.y * cos(heading).
 *
 * Negative means the displacement points to the LEFT of the heading,
 * positive means RIGHT, zero means collinear.
 */
inline double signed_side(const Point2& rel, double heading) {
    return rel.x * std::sin(heading) - rel.y * std::cos(heading);
}

/// Rectangle footprint with heading along the length axis.
struct OrientedBox {
    Point2 center;
    double half_width = 0.0;   // lateral half-extent, > 0
    double half_length = 0.0;  // longitudinal half-extent, > 0
    double heading = 0.0;
};

/// Four corners in counter-clockwise order starting at front-left.
std::array<Point2, 4> box_corners(const OrientedBox& box);

/**
 * Separating-axis overlap test for two oriented boxes.
 *
 * Projects both corner sets onto the 4 distinct edge normals and reports
 * separation on the first axis with disjoint projection intervals.
 * Touching boxes (zero penetration) count as overlapping.
 */
bool sat_overlap(const OrientedBox& a, const OrientedBox& b);

}  // namespace pgs
