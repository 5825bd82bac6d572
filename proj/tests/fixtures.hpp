#pragma once

// Shared scene/mesh fixtures for unit and acceptance tests.

#include <random>
#include <vector>

#include "oracles.hpp"
#include "vgr/ferguson.hpp"
#include "vgr/scene.hpp"

namespace fixtures {

using vgr::ColorRGB;
using vgr::Vec2;

// Random fold-free 1x1 gradient mesh over roughly the unit square: jittered
// corners, near-axis tangent handles, random corner colors with moderate
// color handles. Rejects folded candidates by sampling the Jacobian sign.
inline vgr::GradientMesh random_mesh(std::mt19937_64& g) {
    auto u = [&](double lo, double hi) { return oracle::uniform(g, lo, hi); };
    for (int attempt = 0; attempt < 100; ++attempt) {
        vgr::GradientMesh m;
        m.rows = m.cols = 1;
        m.nodes.resize(4);
        // node(i,j): u along i, v along j; u maps to x, v to y
        for (int i = 0; i <= 1; ++i)
            for (int j = 0; j <= 1; ++j) {
                vgr::MeshNode n;
                n.pos = {i + u(-0.12, 0.12), j + u(-0.12, 0.12)};
                n.du_pos = {u(0.7, 1.3), u(-0.25, 0.25)};
                n.dv_pos = {u(-0.25, 0.25), u(0.7, 1.3)};
                n.color = {u(0.1, 0.9), u(0.1, 0.9), u(0.1, 0.9)};
                n.du_color = {u(-0.5, 0.5), u(-0.5, 0.5), u(-0.5, 0.5)};
                n.dv_color = {u(-0.5, 0.5), u(-0.5, 0.5), u(-0.5, 0.5)};
                m.node(i, j) = n;
            }
        vgr::FergusonPatch p = vgr::FergusonPatch::from_mesh(m, 0, 0);
        bool ok = true;
        for (int a = 0; a <= 20 && ok; ++a)
            for (int b = 0; b <= 20 && ok; ++b)
                if (p.jacobian_det(a / 20.0, b / 20.0) < 1e-3) ok = false;
        if (ok) return m;
    }
    throw std::runtime_error("random_mesh: could not generate a fold-free mesh");
}

// Four-segment cubic circle; positive radius counterclockwise.
inline vgr::BezierSpline circle_spline(Vec2 center, double r) {
    const double k = 0.5522847498307936;
    double s = r < 0 ? -1.0 : 1.0;
    double a = std::abs(r);
    Vec2 q[12] = {
        {a, 0},   {a, s * a * k},   {a * k, s * a},   {0, s * a},
        {-a * k, s * a},  {-a, s * a * k},  {-a, 0},  {-a, -s * a * k},
        {-a * k, -s * a}, {0, -s * a},      {a * k, -s * a}, {a, -s * a * k},
    };
    std::vector<Vec2> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(center + q[i]);
    pts.push_back(center + q[0]);
    return vgr::BezierSpline::from_control_points(pts);
}

// Closed axis-aligned square as a 4-segment spline, counterclockwise.
inline vgr::BezierSpline square_spline(Vec2 lo, Vec2 hi) {
    auto lerped = [](Vec2 a, Vec2 b) {
        return std::vector<Vec2>{a, a + (b - a) / 3.0, a + (b - a) * (2.0 / 3.0)};
    };
    Vec2 c[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
    std::vector<Vec2> pts;
    for (int i = 0; i < 4; ++i) {
        auto part = lerped(c[i], c[(i + 1) % 4]);
        pts.insert(pts.end(), part.begin(), part.end());
    }
    pts.push_back(c[0]);
    return vgr::BezierSpline::from_control_points(pts);
}

inline vgr::BezierSpline line_spline(Vec2 a, Vec2 b) {
    return vgr::BezierSpline::from_control_points({a, a + (b - a) / 3.0, a + (b - a) * (2.0 / 3.0), b});
}

inline vgr::DiffusionCurve dirichlet_curve(vgr::BezierSpline spline, ColorRGB left, ColorRGB right) {
    return {std::move(spline), vgr::BoundaryCondition::dirichlet(vgr::ColorRamp::constant(left)),
            vgr::BoundaryCondition::dirichlet(vgr::ColorRamp::constant(right))};
}

}  // namespace fixtures
