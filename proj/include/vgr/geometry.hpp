#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace vgr {

// Global coincidence tolerance in image units. All geometric predicates
// treat points closer than this as identical.
inline constexpr double kCoincidenceTol = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2&) const = default;

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline double dist2(Vec2 a, Vec2 b) { return (a - b).norm2(); }

struct Aabb {
    Vec2 lo{1e300, 1e300};
    Vec2 hi{-1e300, -1e300};

    void extend(Vec2 p) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    void extend(const Aabb& b) { extend(b.lo); extend(b.hi); }
    Aabb expanded(double m) const { return {{lo.x - m, lo.y - m}, {hi.x + m, hi.y + m}}; }
    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    bool overlaps(const Aabb& b) const {
        return lo.x <= b.hi.x && hi.x >= b.lo.x && lo.y <= b.hi.y && hi.y >= b.lo.y;
    }
    bool empty() const { return lo.x > hi.x; }
};

// Cubic Bezier segment. Control points b[0]..b[3]; curve parameter in [0,1].
struct CubicBezier {
    Vec2 b[4];

    Vec2 eval(double t) const;
    Vec2 derivative(double t) const;         // d/dt, unnormalized
    Vec2 second_derivative(double t) const;
    void split(double t, CubicBezier& left, CubicBezier& right) const;
    CubicBezier slice(double t0, double t1) const;  // restriction to [t0,t1], reparameterized
    Aabb control_bounds() const;
    double control_polygon_length() const;
};

// Chain of C0-connected cubic segments. Global parameter t runs over
// [0, segments.size()], segment i covering [i, i+1]. The parameter
// direction defines the curve orientation (and with it the left/right
// sides used by boundary conditions).
struct BezierSpline {
    std::vector<CubicBezier> segments;

    // Builds a spline from 3n+1 control points, dropping zero-length segments.
    static BezierSpline from_control_points(const std::vector<Vec2>& pts);

    double t_max() const { return static_cast<double>(segments.size()); }
    bool empty() const { return segments.empty(); }
    Vec2 start() const { return segments.front().b[0]; }
    Vec2 end() const { return segments.back().b[3]; }
    bool closed() const { return !empty() && dist(start(), end()) <= kCoincidenceTol; }

    Vec2 eval(double t) const;
    Vec2 tangent(double t) const;            // one-sided at segment joints
    Vec2 second_derivative(double t) const;
    BezierSpline reversed() const;
};

// Piecewise-linear approximation of a curve. params[i] is the source-curve
// parameter of vertices[i]; strictly increasing.
struct Polyline {
    std::vector<Vec2> vertices;
    std::vector<double> params;

    size_t segment_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    double arclength() const;
    Aabb bounds() const;
    Vec2 point_at_param(double t) const;     // linear interpolation between bracketing vertices
    Polyline slice(double ta, double tb) const;
    Polyline reversed() const;
};

struct PolylineHit {
    double t_a = 0.0;   // parameter on first curve
    double t_b = 0.0;   // parameter on second curve
    Vec2 point;
};

struct ClosestPointResult {
    double t = 0.0;
    Vec2 point;
    double distance = 0.0;
};

// Right-oriented unit normal of the curve at t (rotate the unit tangent by
// the matrix ((0,1),(-1,0))). Empty when the tangent is shorter than 1e-12,
// which signals a cusp; callers fall back to averaged neighbor tangents.
std::optional<Vec2> curve_normal(const CubicBezier& curve, double t);

// Adaptive flattening: recursive top-down subdivision of each exact cubic,
// splitting at the curve point farthest from the current chord until that
// distance drops below epsilon. Distance is the maximum of the perpendicular
// distance to the chord and the signed along-chord overshoot beyond either
// endpoint. The farthest point is located on the exact curve by recursive
// interval clipping (depth 32).
Polyline discretize(const BezierSpline& spline, double epsilon);

// All transversal segment-segment intersections between two polylines,
// mapped back to source parameters and sorted by t_a. Pass the same polyline
// twice for self-intersection (adjacent segments are skipped). Overlapping
// collinear segments report their two overlap endpoints.
std::vector<PolylineHit> intersect_polylines(const Polyline& a, const Polyline& b);

// Total signed angle subtended by a closed loop of polylines around p.
// |result| > pi means p is enclosed (result is approximately 2*pi*k).
// Empty when p lies within kCoincidenceTol of the loop.
std::optional<double> winding_angle(const std::vector<const Polyline*>& loop, Vec2 p);
std::optional<double> winding_angle(const std::vector<Vec2>& loop, Vec2 p);

// Global closest point on the polyline; ties broken by smaller t.
ClosestPointResult closest_point(const Polyline& polyline, Vec2 p);

// Closest point on one segment ab, clamped to the segment.
Vec2 closest_point_on_segment(Vec2 a, Vec2 b, Vec2 p, double* s_out = nullptr);

}  // namespace vgr
