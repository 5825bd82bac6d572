#include <doctest.h>

#include <array>
#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vgr/ferguson.hpp"

using namespace vgr;

namespace {

// Direct Eq.-style oracle: f(u,v) = t(u)^T C^T Q C t(v) with the monomial
// basis, computed independently of the Hermite-basis evaluation path.
double surface_oracle(const std::array<std::array<double, 4>, 4>& q, double u, double v) {
    const double C[4][4] = {{1, 0, -3, 2}, {0, 0, 3, -2}, {0, 1, -2, 1}, {0, 0, -1, 1}};
    double tu[4] = {1, u, u * u, u * u * u};
    double tv[4] = {1, v, v * v, v * v * v};
    double cu[4] = {0, 0, 0, 0}, cv[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            cu[i] += C[i][k] * tu[k];
            cv[i] += C[i][k] * tv[k];
        }
    double sum = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sum += cu[i] * q[i][j] * cv[j];
    return sum;
}

FergusonPatch constant_patch(ColorRGB c) {
    std::array<Vec2, 4> pos{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    std::array<Vec2, 4> du{{{1, 0}, {1, 0}, {1, 0}, {1, 0}}};
    std::array<Vec2, 4> dv{{{0, 1}, {0, 1}, {0, 1}, {0, 1}}};
    std::array<ColorRGB, 4> col{{c, c, c, c}};
    std::array<ColorRGB, 4> zero{};
    return FergusonPatch::from_corners(pos, du, dv, col, zero, zero);
}

FergusonPatch identity_patch(const std::array<ColorRGB, 4>& colors,
                             const std::array<ColorRGB, 4>& du_color = {},
                             const std::array<ColorRGB, 4>& dv_color = {}) {
    std::array<Vec2, 4> pos{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    std::array<Vec2, 4> du{{{1, 0}, {1, 0}, {1, 0}, {1, 0}}};
    std::array<Vec2, 4> dv{{{0, 1}, {0, 1}, {0, 1}, {0, 1}}};
    return FergusonPatch::from_corners(pos, du, dv, colors, du_color, dv_color);
}

FergusonPatch scaled_patch(double s, const std::array<ColorRGB, 4>& colors) {
    std::array<Vec2, 4> pos{{{0, 0}, {0, s}, {s, 0}, {s, s}}};
    std::array<Vec2, 4> du{{{s, 0}, {s, 0}, {s, 0}, {s, 0}}};
    std::array<Vec2, 4> dv{{{0, s}, {0, s}, {0, s}, {0, s}}};
    return FergusonPatch::from_corners(pos, du, dv, colors, {}, {});
}

FergusonPatch random_patch(std::mt19937_64& g) {
    return FergusonPatch::from_mesh(fixtures::random_mesh(g), 0, 0);
}

}  // namespace

TEST_CASE("surface evaluation") {
    FergusonPatch c = constant_patch({0.3, 0.6, 0.9});
    for (double u : {0.0, 0.25, 0.8, 1.0})
        for (double v : {0.0, 0.5, 1.0}) {
            CHECK((c.color(u, v) - ColorRGB{0.3, 0.6, 0.9}).max_abs() < 1e-15);
        }

    FergusonPatch id = identity_patch({ColorRGB{}, ColorRGB{}, ColorRGB{}, ColorRGB{}});
    Vec2 p = id.position(0.3, 0.7);
    CHECK(p.x == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(0.7).epsilon(1e-12));

    // corners (0,0,0),(1,0,0),(0,1,0),(1,1,0): center blends to (0.5,0.5,0)
    FergusonPatch bil = identity_patch(
        {ColorRGB{0, 0, 0}, ColorRGB{1, 0, 0}, ColorRGB{0, 1, 0}, ColorRGB{1, 1, 0}});
    ColorRGB mid = bil.color(0.5, 0.5);
    CHECK(mid.r == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.g == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.b == doctest::Approx(0.0));
}

TEST_CASE("surface evaluation matches the direct matrix-product oracle") {
    auto g = oracle::rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        GradientMesh mesh = fixtures::random_mesh(g);
        FergusonPatch p = FergusonPatch::from_mesh(mesh, 0, 0);
        // Rebuild the Q matrices the oracle needs straight from the mesh nodes.
        auto q_of = [&](auto get) {
            std::array<std::array<double, 4>, 4> q{};
            q[0][0] = get(mesh.node(0, 0), 0);
            q[0][1] = get(mesh.node(0, 1), 0);
            q[1][0] = get(mesh.node(1, 0), 0);
            q[1][1] = get(mesh.node(1, 1), 0);
            q[2][0] = get(mesh.node(0, 0), 1);
            q[2][1] = get(mesh.node(0, 1), 1);
            q[3][0] = get(mesh.node(1, 0), 1);
            q[3][1] = get(mesh.node(1, 1), 1);
            q[0][2] = get(mesh.node(0, 0), 2);
            q[0][3] = get(mesh.node(0, 1), 2);
            q[1][2] = get(mesh.node(1, 0), 2);
            q[1][3] = get(mesh.node(1, 1), 2);
            return q;
        };
        auto qx = q_of([](const MeshNode& n, int d) {
            return d == 0 ? n.pos.x : (d == 1 ? n.du_pos.x : n.dv_pos.x);
        });
        auto qr = q_of([](const MeshNode& n, int d) {
            return d == 0 ? n.color.r : (d == 1 ? n.du_color.r : n.dv_color.r);
        });
        for (int i = 0; i < 20; ++i) {
            double u = oracle::uniform(g, 0, 1), v = oracle::uniform(g, 0, 1);
            CHECK(p.position(u, v).x == doctest::Approx(surface_oracle(qx, u, v)).epsilon(1e-12));
            CHECK(p.color(u, v).r == doctest::Approx(surface_oracle(qr, u, v)).epsilon(1e-12));
        }
    }
}

TEST_CASE("preimage on the identity patch") {
    FergusonPatch id = identity_patch({});
    PreimageResult r = id.preimage({0.25, 0.75});
    REQUIRE(r.ok());
    CHECK(r.uv.u == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(r.uv.v == doctest::Approx(0.75).epsilon(1e-9));

    CHECK(id.preimage({5, 5}).status == PreimageStatus::not_in_patch);
    CHECK(id.preimage({-0.3, 0.5}).status == PreimageStatus::not_in_patch);
}

TEST_CASE("preimage round trip over random patches") {
    auto g = oracle::rng(43);
    for (int trial = 0; trial < 3; ++trial) {
        FergusonPatch p = random_patch(g);
        for (int i = 0; i < 100; ++i) {
            UV uv{oracle::uniform(g, 0, 1), oracle::uniform(g, 0, 1)};
            Vec2 x = p.position(uv.u, uv.v);
            PreimageResult r = p.preimage(x);
            REQUIRE(r.ok());
            CHECK(std::abs(r.uv.u - uv.u) < 1e-7);
            CHECK(std::abs(r.uv.v - uv.v) < 1e-7);
        }
    }
}

TEST_CASE("coordinate partials on linear maps") {
    FergusonPatch id = identity_patch({});
    auto cp = id.coordinate_partials(0.4, 0.6);
    REQUIRE(cp.has_value());
    CHECK(cp->u_x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cp->v_y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cp->u_y) < 1e-12);
    CHECK(std::abs(cp->v_x) < 1e-12);
    for (double second : {cp->u_xx, cp->v_xx, cp->u_yy, cp->v_yy, cp->u_xy, cp->v_xy})
        CHECK(std::abs(second) < 1e-12);

    FergusonPatch two = scaled_patch(2.0, {});
    auto cp2 = two.coordinate_partials(0.3, 0.3);
    REQUIRE(cp2.has_value());
    CHECK(cp2->u_x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cp2->v_y == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(cp2->u_xx) < 1e-12);
}

TEST_CASE("coordinate partials match finite differences of the preimage") {
    auto g = oracle::rng(47);
    FergusonPatch p = random_patch(g);
    const double h = 1e-4;
    auto uv_at = [&](Vec2 x) {
        PreimageResult r = p.preimage(x);
        REQUIRE(r.ok());
        return r.uv;
    };
    int tested = 0;
    for (int i = 0; i < 40 && tested < 12; ++i) {
        UV uv{oracle::uniform(g, 0.2, 0.8), oracle::uniform(g, 0.2, 0.8)};
        Vec2 x = p.position(uv.u, uv.v);
        auto cp = p.coordinate_partials(uv.u, uv.v);
        REQUIRE(cp.has_value());
        UV xp = uv_at({x.x + h, x.y}), xm = uv_at({x.x - h, x.y});
        UV yp = uv_at({x.x, x.y + h}), ym = uv_at({x.x, x.y - h});

        auto close = [](double got, double want) {
            double tol = std::max(1e-6, std::abs(want) * 1e-3);
            CHECK(std::abs(got - want) < tol);
        };
        close(cp->u_x, (xp.u - xm.u) / (2 * h));
        close(cp->v_x, (xp.v - xm.v) / (2 * h));
        close(cp->u_y, (yp.u - ym.u) / (2 * h));
        close(cp->v_y, (yp.v - ym.v) / (2 * h));
        close(cp->u_xx, (xp.u - 2 * uv.u + xm.u) / (h * h));
        close(cp->v_xx, (xp.v - 2 * uv.v + xm.v) / (h * h));
        close(cp->u_yy, (yp.u - 2 * uv.u + ym.u) / (h * h));
        close(cp->v_yy, (yp.v - 2 * uv.v + ym.v) / (h * h));
        ++tested;
    }
    CHECK(tested == 12);
}

TEST_CASE("color laplacian: trivial cases") {
    FergusonPatch c = constant_patch({0.2, 0.4, 0.6});
    auto lap = c.color_laplacian_at({0.3, 0.8});
    REQUIRE(lap.has_value());
    CHECK(lap->max_abs() < 1e-12);

    // c(x,y) = x is harmonic: corner colors equal x with matching handles.
    std::array<ColorRGB, 4> colors{
        {ColorRGB{0, 0, 0}, ColorRGB{0, 0, 0}, ColorRGB{1, 1, 1}, ColorRGB{1, 1, 1}}};
    std::array<ColorRGB, 4> du_color{
        {ColorRGB{1, 1, 1}, ColorRGB{1, 1, 1}, ColorRGB{1, 1, 1}, ColorRGB{1, 1, 1}}};
    FergusonPatch lin = identity_patch(colors, du_color, {});
    auto lap2 = lin.color_laplacian_at({0.37, 0.61});
    REQUIRE(lap2.has_value());
    CHECK(lap2->max_abs() < 1e-10);
}

TEST_CASE("color laplacian matches the 5-point finite-difference oracle") {
    // Identity geometry with a bilinear corner blend: Laplacian of the
    // bicubic Hermite blend, checked against finite differences of the
    // directly interpolated color.
    FergusonPatch bil = identity_patch(
        {ColorRGB{0, 0, 0}, ColorRGB{1, 0, 0}, ColorRGB{0, 1, 0}, ColorRGB{1, 1, 0}});
    auto color_at = [&](double x, double y) { return bil.color(x, y); };
    const double h = 1e-3;
    auto lap = bil.color_laplacian_at({0.5, 0.5});
    REQUIRE(lap.has_value());
    ColorRGB fd = (color_at(0.5 + h, 0.5) + color_at(0.5 - h, 0.5) + color_at(0.5, 0.5 + h) +
                   color_at(0.5, 0.5 - h) - color_at(0.5, 0.5) * 4.0) *
                  (1.0 / (h * h));
    CHECK((*lap - fd).max_abs() < 1e-3);
}

TEST_CASE("color laplacian error shrinks at O(h^2) on smooth random patches") {
    auto g = oracle::rng(53);
    FergusonPatch p = random_patch(g);
    auto fd_lap = [&](Vec2 x, double h) {
        auto c = [&](Vec2 q) {
            PreimageResult r = p.preimage(q);
            REQUIRE(r.ok());
            return p.color(r.uv.u, r.uv.v);
        };
        return (c({x.x + h, x.y}) + c({x.x - h, x.y}) + c({x.x, x.y + h}) + c({x.x, x.y - h}) -
                c(x) * 4.0) *
               (1.0 / (h * h));
    };
    double worst_coarse = 0, worst_fine = 0;
    for (int i = 0; i < 8; ++i) {
        UV uv{oracle::uniform(g, 0.3, 0.7), oracle::uniform(g, 0.3, 0.7)};
        Vec2 x = p.position(uv.u, uv.v);
        auto lap = p.color_laplacian_at(uv);
        REQUIRE(lap.has_value());
        worst_coarse = std::max(worst_coarse, (*lap - fd_lap(x, 2e-3)).max_abs());
        worst_fine = std::max(worst_fine, (*lap - fd_lap(x, 1e-3)).max_abs());
    }
    CHECK(worst_fine * 3.0 <= worst_coarse + 1e-12);
}

TEST_CASE("scaled patches: laplacian is the UV laplacian over s^2") {
    std::array<ColorRGB, 4> colors{
        {ColorRGB{0.1, 0.9, 0.3}, ColorRGB{0.7, 0.2, 0.5}, ColorRGB{0.4, 0.6, 0.8},
         ColorRGB{0.9, 0.1, 0.2}}};
    for (double s : {0.5, 2.0, 3.0}) {
        FergusonPatch unit = scaled_patch(1.0, colors);
        FergusonPatch scaled = scaled_patch(s, colors);
        UV uv{0.3, 0.65};
        auto base = unit.color_laplacian_at(uv);
        auto big = scaled.color_laplacian_at(uv);
        REQUIRE(base.has_value());
        REQUIRE(big.has_value());
        CHECK((*big * (s * s) - *base).max_abs() < 1e-9);
    }
}

TEST_CASE("mesh evaluation resolves sub-patches with row-major ties") {
    GradientMesh m;
    m.rows = 1;
    m.cols = 2;
    m.nodes.resize(6);
    for (int i = 0; i <= 1; ++i)
        for (int j = 0; j <= 2; ++j) {
            MeshNode n;
            n.pos = {double(i), double(j)};
            n.du_pos = {1, 0};
            n.dv_pos = {0, 1};
            n.color = {double(j) / 2.0, 0, 0};
            m.node(i, j) = n;
        }
    MeshEval eval(m);
    CHECK(eval.rows() == 1);
    CHECK(eval.cols() == 2);

    MeshSample left = eval.locate({0.5, 0.5});
    REQUIRE(left.ok());
    CHECK(left.patch_col == 0);
    MeshSample right = eval.locate({0.5, 1.5});
    REQUIRE(right.ok());
    CHECK(right.patch_col == 1);
    // Shared edge resolves to the lower (row, col).
    MeshSample shared = eval.locate({0.5, 1.0});
    REQUIRE(shared.ok());
    CHECK(shared.patch_col == 0);

    CHECK(!eval.color_at({3, 3}).has_value());
    auto c = eval.color_at({0.5, 1.0});
    REQUIRE(c.has_value());
    CHECK(c->r == doctest::Approx(0.5).epsilon(1e-9));
}
