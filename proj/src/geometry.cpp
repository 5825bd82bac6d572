#include "vgr/geometry.hpp"

#include <algorithm>
#include <array>
#include <cassert>

namespace vgr {

// ---------------------------------------------------------------- CubicBezier

Vec2 CubicBezier::eval(double t) const {
    // de Casteljau, numerically stable over [0,1]
    Vec2 p01 = b[0] * (1 - t) + b[1] * t;
    Vec2 p12 = b[1] * (1 - t) + b[2] * t;
    Vec2 p23 = b[2] * (1 - t) + b[3] * t;
    Vec2 p012 = p01 * (1 - t) + p12 * t;
    Vec2 p123 = p12 * (1 - t) + p23 * t;
    return p012 * (1 - t) + p123 * t;
}

Vec2 CubicBezier::derivative(double t) const {
    Vec2 d0 = (b[1] - b[0]) * 3.0;
    Vec2 d1 = (b[2] - b[1]) * 3.0;
    Vec2 d2 = (b[3] - b[2]) * 3.0;
    Vec2 q0 = d0 * (1 - t) + d1 * t;
    Vec2 q1 = d1 * (1 - t) + d2 * t;
    return q0 * (1 - t) + q1 * t;
}

Vec2 CubicBezier::second_derivative(double t) const {
    Vec2 s0 = (b[2] - b[1] * 2.0 + b[0]) * 6.0;
    Vec2 s1 = (b[3] - b[2] * 2.0 + b[1]) * 6.0;
    return s0 * (1 - t) + s1 * t;
}

void CubicBezier::split(double t, CubicBezier& left, CubicBezier& right) const {
    Vec2 p01 = b[0] * (1 - t) + b[1] * t;
    Vec2 p12 = b[1] * (1 - t) + b[2] * t;
    Vec2 p23 = b[2] * (1 - t) + b[3] * t;
    Vec2 p012 = p01 * (1 - t) + p12 * t;
    Vec2 p123 = p12 * (1 - t) + p23 * t;
    Vec2 mid = p012 * (1 - t) + p123 * t;
    left = {{b[0], p01, p012, mid}};
    right = {{mid, p123, p23, b[3]}};
}

CubicBezier CubicBezier::slice(double t0, double t1) const {
    CubicBezier l, r, out;
    split(t0, l, r);
    double local = (t0 < 1.0) ? (t1 - t0) / (1.0 - t0) : 0.0;
    r.split(local, out, l);
    return out;
}

Aabb CubicBezier::control_bounds() const {
    Aabb box;
    for (const Vec2& p : b) box.extend(p);
    return box;
}

double CubicBezier::control_polygon_length() const {
    return dist(b[0], b[1]) + dist(b[1], b[2]) + dist(b[2], b[3]);
}

// ---------------------------------------------------------------- BezierSpline

BezierSpline BezierSpline::from_control_points(const std::vector<Vec2>& pts) {
    if (pts.size() < 4 || (pts.size() - 1) % 3 != 0)
        throw std::invalid_argument("spline requires 3n+1 control points");
    BezierSpline s;
    for (size_t i = 0; i + 3 < pts.size(); i += 3) {
        CubicBezier seg{{pts[i], pts[i + 1], pts[i + 2], pts[i + 3]}};
        // Zero-length segments would produce zero tangents in traversal
        // angle measurements; drop them.
        if (seg.control_polygon_length() <= kCoincidenceTol) continue;
        s.segments.push_back(seg);
    }
    return s;
}

static void locate(const BezierSpline& s, double t, size_t& seg, double& local) {
    double tm = s.t_max();
    t = std::clamp(t, 0.0, tm);
    seg = std::min(static_cast<size_t>(t), s.segments.size() - 1);
    local = t - static_cast<double>(seg);
}

Vec2 BezierSpline::eval(double t) const {
    size_t seg; double local;
    locate(*this, t, seg, local);
    return segments[seg].eval(local);
}

Vec2 BezierSpline::tangent(double t) const {
    size_t seg; double local;
    locate(*this, t, seg, local);
    return segments[seg].derivative(local);
}

Vec2 BezierSpline::second_derivative(double t) const {
    size_t seg; double local;
    locate(*this, t, seg, local);
    return segments[seg].second_derivative(local);
}

BezierSpline BezierSpline::reversed() const {
    BezierSpline out;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it)
        out.segments.push_back({{it->b[3], it->b[2], it->b[1], it->b[0]}});
    return out;
}

// ---------------------------------------------------------------- Polyline

double Polyline::arclength() const {
    double len = 0.0;
    for (size_t i = 0; i + 1 < vertices.size(); ++i) len += dist(vertices[i], vertices[i + 1]);
    return len;
}

Aabb Polyline::bounds() const {
    Aabb box;
    for (const Vec2& p : vertices) box.extend(p);
    return box;
}

Vec2 Polyline::point_at_param(double t) const {
    if (vertices.empty()) return {};
    if (t <= params.front()) return vertices.front();
    if (t >= params.back()) return vertices.back();
    auto it = std::upper_bound(params.begin(), params.end(), t);
    size_t i = static_cast<size_t>(it - params.begin());
    double span = params[i] - params[i - 1];
    double w = span > 0 ? (t - params[i - 1]) / span : 0.0;
    return vertices[i - 1] * (1 - w) + vertices[i] * w;
}

Polyline Polyline::slice(double ta, double tb) const {
    Polyline out;
    out.vertices.push_back(point_at_param(ta));
    out.params.push_back(ta);
    for (size_t i = 0; i < vertices.size(); ++i) {
        if (params[i] > ta + 1e-12 && params[i] < tb - 1e-12) {
            out.vertices.push_back(vertices[i]);
            out.params.push_back(params[i]);
        }
    }
    out.vertices.push_back(point_at_param(tb));
    out.params.push_back(tb);
    return out;
}

Polyline Polyline::reversed() const {
    Polyline out;
    out.vertices.assign(vertices.rbegin(), vertices.rend());
    for (auto it = params.rbegin(); it != params.rend(); ++it) out.params.push_back(-*it);
    return out;
}

// ---------------------------------------------------------------- normal

std::optional<Vec2> curve_normal(const CubicBezier& curve, double t) {
    Vec2 d = curve.derivative(t);
    double n = d.norm();
    if (n < 1e-12) return std::nullopt;
    Vec2 u = d / n;
    return Vec2{u.y, -u.x};
}

// ---------------------------------------------------------------- discretize

namespace {

// Scalar cubic in Bernstein form; the convex hull of the coefficients
// bounds the polynomial, which drives the interval clipping below.
struct ScalarCubic {
    double c[4];

    double eval(double t) const {
        double c01 = c[0] * (1 - t) + c[1] * t;
        double c12 = c[1] * (1 - t) + c[2] * t;
        double c23 = c[2] * (1 - t) + c[3] * t;
        double a = c01 * (1 - t) + c12 * t;
        double b = c12 * (1 - t) + c23 * t;
        return a * (1 - t) + b * t;
    }
    void split(double t, ScalarCubic& l, ScalarCubic& r) const {
        double c01 = c[0] * (1 - t) + c[1] * t;
        double c12 = c[1] * (1 - t) + c[2] * t;
        double c23 = c[2] * (1 - t) + c[3] * t;
        double a = c01 * (1 - t) + c12 * t;
        double b = c12 * (1 - t) + c23 * t;
        double m = a * (1 - t) + b * t;
        l = {{c[0], c01, a, m}};
        r = {{m, b, c23, c[3]}};
    }
};

// Chord-distance measure of Fig-10 style flattening: max of |perpendicular
// offset| and the along-chord overshoot beyond either endpoint.
double chord_distance(double perp, double along, double len) {
    return std::max({std::abs(perp), along - len, -along});
}

double chord_distance_bound(const ScalarCubic& perp, const ScalarCubic& along, double len) {
    double p = 0.0, smax = -1e300, smin = 1e300;
    for (int i = 0; i < 4; ++i) {
        p = std::max(p, std::abs(perp.c[i]));
        smax = std::max(smax, along.c[i]);
        smin = std::min(smin, along.c[i]);
    }
    return std::max({p, smax - len, -smin});
}

// Farthest curve point from the chord, located by recursive interval
// subdivision on the exact cubic (depth 32, i.e. relative interval width
// 2^-32), pruning subintervals whose Bernstein bound cannot beat the
// current best.
void farthest_from_chord(const ScalarCubic& perp, const ScalarCubic& along, double len,
                         double lo, double hi, int depth,
                         double& best_d, double& best_t) {
    if (chord_distance_bound(perp, along, len) <= best_d) return;
    double mid = 0.5 * (lo + hi);
    double d = chord_distance(perp.eval(0.5), along.eval(0.5), len);
    if (d > best_d) { best_d = d; best_t = mid; }
    if (depth >= 32) return;
    ScalarCubic pl, pr, al, ar;
    perp.split(0.5, pl, pr);
    along.split(0.5, al, ar);
    farthest_from_chord(pl, al, len, lo, mid, depth + 1, best_d, best_t);
    farthest_from_chord(pr, ar, len, mid, hi, depth + 1, best_d, best_t);
}

void flatten_recursive(const CubicBezier& curve, double t0, double t1, double epsilon,
                       int depth, Polyline& out) {
    Vec2 p0 = curve.b[0], p3 = curve.b[3];
    Vec2 chord = p3 - p0;
    double len = chord.norm();

    double best_d = 0.0, best_t = 0.5;
    if (len <= kCoincidenceTol) {
        // Degenerate chord (closed or collapsed segment): split at the point
        // farthest from p0.
        for (int i = 1; i < 8; ++i) {
            double t = i / 8.0;
            double d = dist(curve.eval(t), p0);
            if (d > best_d) { best_d = d; best_t = t; }
        }
    } else {
        Vec2 dir = chord / len;
        Vec2 nrm{-dir.y, dir.x};
        ScalarCubic perp, along;
        for (int i = 0; i < 4; ++i) {
            perp.c[i] = dot(curve.b[i] - p0, nrm);
            along.c[i] = dot(curve.b[i] - p0, dir);
        }
        best_d = -1e300;
        farthest_from_chord(perp, along, len, 0.0, 1.0, 0, best_d, best_t);
    }

    if (best_d < epsilon || depth >= 24 || best_t <= 1e-9 || best_t >= 1.0 - 1e-9) {
        out.vertices.push_back(p3);
        out.params.push_back(t1);
        return;
    }
    CubicBezier left, right;
    curve.split(best_t, left, right);
    double tm = t0 + best_t * (t1 - t0);
    flatten_recursive(left, t0, tm, epsilon, depth + 1, out);
    flatten_recursive(right, tm, t1, epsilon, depth + 1, out);
}

}  // namespace

Polyline discretize(const BezierSpline& spline, double epsilon) {
    if (epsilon <= 0) throw std::invalid_argument("discretize: epsilon must be positive");
    Polyline out;
    if (spline.empty()) return out;
    out.vertices.push_back(spline.segments[0].b[0]);
    out.params.push_back(0.0);
    for (size_t i = 0; i < spline.segments.size(); ++i)
        flatten_recursive(spline.segments[i], static_cast<double>(i),
                          static_cast<double>(i + 1), epsilon, 0, out);
    return out;
}

// ---------------------------------------------------------------- intersection

namespace {

struct SegmentHit {
    double s = 0.0, u = 0.0;  // fractions along segment a and b
    Vec2 point;
};

// Transversal intersection of segments [a0,a1] and [b0,b1]. Collinear
// overlaps append up to two hits (the overlap interval endpoints).
void segment_intersections(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, std::vector<SegmentHit>& hits) {
    Vec2 r = a1 - a0, q = b1 - b0;
    double denom = cross(r, q);
    Vec2 d = b0 - a0;
    double scale = std::max({r.norm(), q.norm(), 1e-30});
    if (std::abs(denom) > 1e-14 * scale * scale) {
        double s = cross(d, q) / denom;
        double u = cross(d, r) / denom;
        const double eps = 1e-12;
        if (s >= -eps && s <= 1 + eps && u >= -eps && u <= 1 + eps) {
            s = std::clamp(s, 0.0, 1.0);
            u = std::clamp(u, 0.0, 1.0);
            hits.push_back({s, u, a0 + r * s});
        }
        return;
    }
    // Parallel. Only collinear segments can overlap.
    if (std::abs(cross(d, r)) > kCoincidenceTol * scale) return;
    double rr = r.norm2();
    if (rr < 1e-30) return;
    double u0 = dot(b0 - a0, r) / rr;
    double u1 = dot(b1 - a0, r) / rr;
    double lo = std::max(0.0, std::min(u0, u1));
    double hi = std::min(1.0, std::max(u0, u1));
    if (lo > hi) return;
    for (double s : {lo, hi}) {
        Vec2 p = a0 + r * s;
        double ub = (std::abs(u1 - u0) > 1e-30) ? (s - u0) / (u1 - u0) : 0.0;
        hits.push_back({s, std::clamp(ub, 0.0, 1.0), p});
        if (lo == hi) break;
    }
}

}  // namespace

std::vector<PolylineHit> intersect_polylines(const Polyline& a, const Polyline& b) {
    std::vector<PolylineHit> out;
    bool self = (&a == &b);
    size_t na = a.segment_count(), nb = b.segment_count();
    std::vector<SegmentHit> hits;
    for (size_t i = 0; i < na; ++i) {
        Aabb abox;
        abox.extend(a.vertices[i]);
        abox.extend(a.vertices[i + 1]);
        size_t jstart = self ? i + 2 : 0;
        for (size_t j = jstart; j < nb; ++j) {
            // Skip the wrap-around adjacency of closed polylines.
            if (self && i == 0 && j == nb - 1 &&
                dist(a.vertices.front(), a.vertices.back()) <= kCoincidenceTol)
                continue;
            Aabb bbox;
            bbox.extend(b.vertices[j]);
            bbox.extend(b.vertices[j + 1]);
            if (!abox.overlaps(bbox.expanded(kCoincidenceTol))) continue;
            hits.clear();
            segment_intersections(a.vertices[i], a.vertices[i + 1],
                                  b.vertices[j], b.vertices[j + 1], hits);
            for (const SegmentHit& h : hits) {
                double ta = a.params[i] + h.s * (a.params[i + 1] - a.params[i]);
                double tb = b.params[j] + h.u * (b.params[j + 1] - b.params[j]);
                // Shared interior vertices of one polyline are not crossings.
                if (self && std::abs(ta - tb) < 1e-9) continue;
                out.push_back({ta, tb, h.point});
            }
        }
    }
    // Consecutive segments sharing a vertex report the junction twice; dedupe.
    std::sort(out.begin(), out.end(), [](const PolylineHit& x, const PolylineHit& y) {
        return x.t_a != y.t_a ? x.t_a < y.t_a : x.t_b < y.t_b;
    });
    auto last = std::unique(out.begin(), out.end(), [](const PolylineHit& x, const PolylineHit& y) {
        return std::abs(x.t_a - y.t_a) < 1e-9 && std::abs(x.t_b - y.t_b) < 1e-9;
    });
    out.erase(last, out.end());
    return out;
}

// ---------------------------------------------------------------- winding

std::optional<double> winding_angle(const std::vector<const Polyline*>& loop, Vec2 p) {
    double total = 0.0;
    for (const Polyline* pl : loop) {
        for (size_t i = 0; i + 1 < pl->vertices.size(); ++i) {
            Vec2 a = pl->vertices[i] - p;
            Vec2 b = pl->vertices[i + 1] - p;
            Vec2 seg_near = closest_point_on_segment(pl->vertices[i], pl->vertices[i + 1], p);
            if (dist(seg_near, p) <= kCoincidenceTol) return std::nullopt;
            total += std::atan2(cross(a, b), dot(a, b));
        }
    }
    return total;
}

std::optional<double> winding_angle(const std::vector<Vec2>& loop, Vec2 p) {
    Polyline pl;
    pl.vertices = loop;
    pl.params.resize(loop.size(), 0.0);
    return winding_angle(std::vector<const Polyline*>{&pl}, p);
}

// ---------------------------------------------------------------- closest point

Vec2 closest_point_on_segment(Vec2 a, Vec2 b, Vec2 p, double* s_out) {
    Vec2 d = b - a;
    double dd = d.norm2();
    double s = dd > 0 ? std::clamp(dot(p - a, d) / dd, 0.0, 1.0) : 0.0;
    if (s_out) *s_out = s;
    return a + d * s;
}

ClosestPointResult closest_point(const Polyline& polyline, Vec2 p) {
    ClosestPointResult best;
    best.distance = 1e300;
    for (size_t i = 0; i + 1 < polyline.vertices.size(); ++i) {
        double s;
        Vec2 q = closest_point_on_segment(polyline.vertices[i], polyline.vertices[i + 1], p, &s);
        double d = dist(q, p);
        if (d < best.distance - 1e-15) {
            best.distance = d;
            best.point = q;
            best.t = polyline.params[i] + s * (polyline.params[i + 1] - polyline.params[i]);
        }
    }
    return best;
}

}  // namespace vgr
