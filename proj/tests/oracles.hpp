#pragma once

// Independent reference computations used by the tests. These deliberately
// avoid the library's own evaluation paths: Bezier values come from pure
// midpoint subdivision, derivatives from expanded monomial coefficients,
// containment from ray-crossing parity, and PDE quantities from finite
// differences.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "vgr/geometry.hpp"

namespace oracle {

using vgr::Vec2;

// Evaluates a cubic Bezier by pure midpoint subdivision (no de Casteljau at
// arbitrary t): bisect the control polygon k times toward t, then return the
// first control point of the remaining stub.
inline Vec2 bezier_eval_subdivision(std::array<Vec2, 4> b, double t, int depth = 48) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < depth; ++i) {
        std::array<Vec2, 4> left, right;
        Vec2 m01 = (b[0] + b[1]) * 0.5;
        Vec2 m12 = (b[1] + b[2]) * 0.5;
        Vec2 m23 = (b[2] + b[3]) * 0.5;
        Vec2 m012 = (m01 + m12) * 0.5;
        Vec2 m123 = (m12 + m23) * 0.5;
        Vec2 mid = (m012 + m123) * 0.5;
        left = {b[0], m01, m012, mid};
        right = {mid, m123, m23, b[3]};
        double tm = 0.5 * (lo + hi);
        if (t <= tm) {
            b = left;
            hi = tm;
        } else {
            b = right;
            lo = tm;
        }
    }
    return b[0];
}

// Monomial coefficients of a cubic Bezier per coordinate:
// p(t) = c0 + c1 t + c2 t^2 + c3 t^3.
inline std::array<Vec2, 4> bezier_monomials(const std::array<Vec2, 4>& b) {
    std::array<Vec2, 4> c;
    c[0] = b[0];
    c[1] = (b[1] - b[0]) * 3.0;
    c[2] = (b[0] - b[1] * 2.0 + b[2]) * 3.0;
    c[3] = (b[3] - b[0]) + (b[1] - b[2]) * 3.0;
    return c;
}

inline Vec2 bezier_derivative_monomial(const std::array<Vec2, 4>& b, double t) {
    auto c = bezier_monomials(b);
    return c[1] + c[2] * (2.0 * t) + c[3] * (3.0 * t * t);
}

// Max distance from uniformly sampled curve points to the polyline.
inline double max_sample_distance(const vgr::BezierSpline& spline, const vgr::Polyline& poly,
                                  int samples = 1000) {
    double worst = 0.0;
    for (int i = 0; i <= samples; ++i) {
        double t = spline.t_max() * i / samples;
        Vec2 p = spline.eval(t);
        double best = 1e300;
        for (size_t s = 0; s + 1 < poly.vertices.size(); ++s) {
            Vec2 q = vgr::closest_point_on_segment(poly.vertices[s], poly.vertices[s + 1], p);
            best = std::min(best, vgr::dist(q, p));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// Brute-force all-pairs segment intersection count between two polylines
// (self mode skips adjacent segments).
inline int brute_force_intersections(const vgr::Polyline& a, const vgr::Polyline& b, bool self) {
    int count = 0;
    for (size_t i = 0; i + 1 < a.vertices.size(); ++i) {
        for (size_t j = self ? i + 2 : 0; j + 1 < b.vertices.size(); ++j) {
            Vec2 r = a.vertices[i + 1] - a.vertices[i];
            Vec2 q = b.vertices[j + 1] - b.vertices[j];
            double denom = vgr::cross(r, q);
            if (std::abs(denom) < 1e-14) continue;
            Vec2 d = b.vertices[j] - a.vertices[i];
            double s = vgr::cross(d, q) / denom;
            double u = vgr::cross(d, r) / denom;
            if (s > 1e-9 && s < 1 - 1e-9 && u > 1e-9 && u < 1 - 1e-9) ++count;
        }
    }
    return count;
}

// Integer winding number by horizontal ray-crossing with signs.
inline int winding_number_raycast(const std::vector<Vec2>& loop, Vec2 p) {
    int winding = 0;
    size_t n = loop.size();
    for (size_t i = 0; i + 1 < n; ++i) {
        Vec2 a = loop[i], b = loop[i + 1];
        if (a.y <= p.y) {
            if (b.y > p.y && vgr::cross(b - a, p - a) > 0) ++winding;
        } else {
            if (b.y <= p.y && vgr::cross(b - a, p - a) < 0) --winding;
        }
    }
    return winding;
}

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

}  // namespace oracle
