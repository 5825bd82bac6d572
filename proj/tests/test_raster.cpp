#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vgr/pipeline.hpp"
#include "vgr/raster.hpp"

using namespace vgr;

namespace {

RasterGrids manual_grids(int w, int h, double spacing) {
    RasterGrids g;
    g.width = w;
    g.height = h;
    g.h = spacing;
    g.origin = {0, 0};
    size_t n = static_cast<size_t>(w) * h;
    g.type.assign(n, PixelType::outside);
    g.closed_h.assign(static_cast<size_t>(w - 1) * h, 0);
    g.closed_v.assign(static_cast<size_t>(w) * (h - 1), 0);
    g.source.assign(n, {});
    g.dirichlet.assign(n, {});
    g.color.assign(n, {});
    return g;
}

// All-Dirichlet ring with values from field(), relaxed interior.
RasterGrids dirichlet_box(int n, double spacing, ColorRGB (*field)(Vec2)) {
    RasterGrids g = manual_grids(n, n, spacing);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            bool ring = i == 0 || j == 0 || i == n - 1 || j == n - 1;
            size_t id = g.idx(i, j);
            g.type[id] = ring ? PixelType::dirichlet : PixelType::interior;
            if (ring) {
                g.dirichlet[id] = field(g.center(i, j));
                g.color[id] = g.dirichlet[id];
            }
        }
    return g;
}

Scene mesh_only_scene(std::mt19937_64& rng) {
    Scene s;
    s.domain = {{-0.25, -0.25}, {1.25, 1.25}};
    s.settings.epsilon = 0.002;
    s.meshes.push_back(fixtures::random_mesh(rng));
    return s;
}

}  // namespace

TEST_CASE("jacobi arithmetic on a cross of neighbors") {
    RasterGrids g = manual_grids(3, 3, 1.0);
    g.type[g.idx(1, 1)] = PixelType::interior;
    for (auto [i, j] : {std::pair{0, 1}, {2, 1}, {1, 0}, {1, 2}})
        g.type[g.idx(i, j)] = PixelType::dirichlet;
    std::vector<ColorRGB> src(9), dst(9);
    src[g.idx(0, 1)] = {1, 0, 0};
    src[g.idx(2, 1)] = {0, 1, 0};
    src[g.idx(1, 0)] = {0, 0, 1};
    src[g.idx(1, 2)] = {1, 1, 1};

    jacobi_step(g, src, dst);
    CHECK((dst[g.idx(1, 1)] - ColorRGB{0.5, 0.5, 0.5}).max_abs() < 1e-15);

    // With h^2 * f = (0.4, 0, 0) the update shifts the red channel.
    g.source[g.idx(1, 1)] = {0.4, 0, 0};
    jacobi_step(g, src, dst);
    CHECK((dst[g.idx(1, 1)] - ColorRGB{0.4, 0.5, 0.5}).max_abs() < 1e-15);
}

TEST_CASE("neumann pixel averages only across open flags") {
    RasterGrids g = manual_grids(3, 3, 1.0);
    g.type[g.idx(1, 1)] = PixelType::neumann;
    for (auto [i, j] : {std::pair{0, 1}, {2, 1}, {1, 0}, {1, 2}})
        g.type[g.idx(i, j)] = PixelType::dirichlet;
    // close the east interface (between (1,1) and (2,1))
    g.closed_h[1 * 2 + 1] = 1;
    std::vector<ColorRGB> src(9), dst(9);
    src[g.idx(0, 1)] = {1, 0, 0};
    src[g.idx(2, 1)] = {1, 1, 1};  // blocked
    src[g.idx(1, 0)] = {0, 1, 0};
    src[g.idx(1, 2)] = {0, 0, 1};
    jacobi_step(g, src, dst);
    CHECK((dst[g.idx(1, 1)] - ColorRGB{1.0 / 3, 1.0 / 3, 1.0 / 3}).max_abs() < 1e-15);

    // Fully sealed pixel keeps its value and is reported isolated.
    g.closed_h[1 * 2 + 0] = 1;
    g.closed_v[0 * 3 + 1] = 1;
    g.closed_v[1 * 3 + 1] = 1;
    src[g.idx(1, 1)] = {0.25, 0.5, 0.75};
    int isolated = 0;
    jacobi_step(g, src, dst, &isolated);
    CHECK(isolated == 1);
    CHECK((dst[g.idx(1, 1)] - ColorRGB{0.25, 0.5, 0.75}).max_abs() < 1e-15);
}

TEST_CASE("masks of an axis-aligned square patch match the brute-force oracle") {
    Scene scene;
    scene.domain = {{0, 0}, {1, 1}};
    scene.settings.epsilon = 1e-4;
    scene.diffusion_curves.push_back(fixtures::dirichlet_curve(
        fixtures::square_spline({0.25, 0.25}, {0.75, 0.75}), {0, 0, 1}, {1, 0, 0}));
    SceneGeometry geo = build_geometry(scene, 0.0, 1e-4, OverlapMode::average);
    REQUIRE(geo.patches.size() == 2);

    const Patch* square = nullptr;
    for (const auto& p : geo.patches)
        if (p.has_probe && p.probe.x > 0.25 && p.probe.x < 0.75 && p.probe.y > 0.25 &&
            p.probe.y < 0.75)
            square = &p;
    REQUIRE(square != nullptr);

    ImageGrid grid = make_image_grid(scene.domain, 16, 16);
    RasterGrids g = make_grids(grid, *square);
    rasterize_masks(*square, geo.graph, {}, g);

    int interior = 0, dirichlet = 0;
    for (int j = 0; j < g.height; ++j)
        for (int i = 0; i < g.width; ++i) {
            Vec2 p = g.center(i, j);
            bool inside = p.x > 0.25 && p.x < 0.75 && p.y > 0.25 && p.y < 0.75;
            PixelType t = g.type[g.idx(i, j)];
            if (!inside) {
                CHECK(t == PixelType::outside);
                continue;
            }
            // Oracle: boundary iff a 4-neighbor center leaves the square.
            double h = g.h;
            bool ring = p.x - h < 0.25 || p.x + h > 0.75 || p.y - h < 0.25 || p.y + h > 0.75;
            CHECK(t == (ring ? PixelType::dirichlet : PixelType::interior));
            if (t == PixelType::dirichlet) {
                ++dirichlet;
                // interior side is the curve's left (ccw square): blue
                CHECK((g.dirichlet[g.idx(i, j)] - ColorRGB{0, 0, 1}).max_abs() < 1e-12);
            } else {
                ++interior;
            }
        }
    CHECK(interior > 0);
    CHECK(dirichlet > 0);

    // Staggered flags closed exactly where the center-to-center segment
    // crosses a square side.
    for (int j = 0; j < g.height; ++j)
        for (int i = 0; i + 1 < g.width; ++i) {
            Vec2 a = g.center(i, j), b = g.center(i + 1, j);
            if (g.type[g.idx(i, j)] == PixelType::outside &&
                g.type[g.idx(i + 1, j)] == PixelType::outside)
                continue;
            bool crosses = (a.x < 0.25) != (b.x < 0.25) || (a.x < 0.75) != (b.x < 0.75);
            crosses = crosses && a.y > 0.25 && a.y < 0.75;
            CHECK(static_cast<bool>(g.closed_h[static_cast<size_t>(j) * (g.width - 1) + i]) ==
                  crosses);
        }
}

TEST_CASE("whole-domain patch: border ring is neumann, rest interior") {
    Scene scene;
    scene.domain = {{0, 0}, {1, 1}};
    SceneGeometry geo = build_geometry(scene, 0.0, 0.01, OverlapMode::average);
    REQUIRE(geo.patches.size() == 1);
    ImageGrid grid = make_image_grid(scene.domain, 16, 16);
    RasterGrids g = make_grids(grid, geo.patches[0]);
    rasterize_masks(geo.patches[0], geo.graph, {}, g);
    for (int j = 0; j < 16; ++j)
        for (int i = 0; i < 16; ++i) {
            bool ring = i == 0 || j == 0 || i == 15 || j == 15;
            CHECK(g.type[g.idx(i, j)] == (ring ? PixelType::neumann : PixelType::interior));
        }
}

TEST_CASE("mesh-sourced dirichlet pixels take the mesh color at the pixel center") {
    auto rng = oracle::rng(71);
    Scene scene = mesh_only_scene(rng);
    SceneGeometry geo = build_geometry(scene, 0.0, 0.002, OverlapMode::average);
    REQUIRE(geo.patches.size() == 2);
    std::vector<MeshEval> meshes;
    meshes.emplace_back(scene.meshes[0]);

    const Patch* mesh_patch = nullptr;
    for (const auto& p : geo.patches)
        if (!p.mesh_weights.empty()) mesh_patch = &p;
    REQUIRE(mesh_patch != nullptr);

    ImageGrid grid = make_image_grid(scene.domain, 96, 96);
    RasterGrids g = make_grids(grid, *mesh_patch);
    rasterize_masks(*mesh_patch, geo.graph, meshes, g);

    int checked = 0;
    for (int j = 0; j < g.height; ++j)
        for (int i = 0; i < g.width; ++i) {
            if (g.type[g.idx(i, j)] != PixelType::dirichlet) continue;
            auto c = meshes[0].color_at(g.center(i, j));
            if (!c) continue;  // center epsilon-outside; falls back to curve color
            CHECK((g.dirichlet[g.idx(i, j)] - *c).max_abs() < 1e-9);
            ++checked;
        }
    CHECK(checked > 20);
}

TEST_CASE("poisson band source balances to zero") {
    Scene scene;
    scene.domain = {{0, 0}, {1, 1}};
    scene.poisson_curves.push_back({fixtures::line_spline({0.2, 0.5}, {0.8, 0.5}),
                                    LaplacianProfile::constant({0.5, -0.25, 0.1}),
                                    LaplacianProfile::constant({-0.5, 0.25, -0.1}), 3.0});
    ImageGrid grid = make_image_grid(scene.domain, 64, 64);
    Image tex = rasterize_poisson_sources(scene, grid);

    ColorRGB total;
    double total_abs = 0;
    int nonzero = 0;
    for (const auto& f : tex.pixels) {
        total += f;
        total_abs += f.max_abs();
        nonzero += f.max_abs() > 0;
    }
    CHECK(nonzero > 0);
    CHECK(total.max_abs() <= 1e-12 * total_abs);

    // Band pixels hug the curve: nothing beyond band_width + 1 pixel.
    for (int j = 0; j < 64; ++j)
        for (int i = 0; i < 64; ++i) {
            if (tex.at(i, j).max_abs() == 0) continue;
            Vec2 p = grid.center(i, j);
            CHECK(std::abs(p.y - 0.5) <= 4.5 * grid.h);
            CHECK(p.x >= 0.2 - 4.5 * grid.h);
            CHECK(p.x <= 0.8 + 4.5 * grid.h);
        }
}

TEST_CASE("solve reproduces linear fields exactly (discrete)") {
    auto field = +[](Vec2 p) { return ColorRGB{0.25 + 0.5 * p.x, 0.1 + 0.3 * p.y, 0.5}; };
    RasterGrids g = dirichlet_box(32, 1.0 / 32, field);
    SolverConfig config;
    config.multigrid_levels = 3;
    config.residual_target = 1e-7;
    SolveStats st = solve(g, config);
    CHECK(st.converged);
    for (int j = 0; j < 32; ++j)
        for (int i = 0; i < 32; ++i)
            CHECK((g.color[g.idx(i, j)] - field(g.center(i, j))).max_abs() < 1e-3);

    // Jacobi fixed point: one more plain sweep barely moves the solution.
    std::vector<ColorRGB> dst(g.color.size());
    double change = jacobi_step(g, g.color, dst);
    CHECK(change <= config.residual_target * g.h * g.h);
}

TEST_CASE("solve: constant dirichlet boundary fills the interior") {
    auto field = +[](Vec2) { return ColorRGB{0.3, 0.6, 0.9}; };
    RasterGrids g = dirichlet_box(24, 1.0 / 24, field);
    SolveStats st = solve(g, {10000, 3, 1e-6});
    CHECK(st.converged);
    for (size_t k = 0; k < g.color.size(); ++k)
        CHECK((g.color[k] - ColorRGB{0.3, 0.6, 0.9}).max_abs() < 1e-6);
}

TEST_CASE("discrete maximum principle with f = 0") {
    auto rng = oracle::rng(73);
    RasterGrids g = manual_grids(20, 20, 1.0 / 20);
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < 20; ++j)
        for (int i = 0; i < 20; ++i) {
            bool ring = i == 0 || j == 0 || i == 19 || j == 19;
            size_t id = g.idx(i, j);
            g.type[id] = ring ? PixelType::dirichlet : PixelType::interior;
            if (ring) {
                double v = oracle::uniform(rng, 0.2, 0.8);
                g.dirichlet[id] = {v, v * 0.5, 1 - v};
                g.color[id] = g.dirichlet[id];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    SolveStats st = solve(g, {20000, 3, 1e-6});
    CHECK(st.converged);
    for (int j = 1; j < 19; ++j)
        for (int i = 1; i < 19; ++i) {
            double r = g.color[g.idx(i, j)].r;
            CHECK(r >= lo - 1e-6);
            CHECK(r <= hi + 1e-6);
        }
}

TEST_CASE("composite partitions the image") {
    Scene scene;
    scene.domain = {{0, 0}, {1, 1}};
    scene.settings.epsilon = 1e-3;
    scene.diffusion_curves.push_back(fixtures::dirichlet_curve(
        fixtures::circle_spline({0.5, 0.5}, 0.3), {0.2, 0.7, 0.2}, {0.9, 0.2, 0.2}));
    RenderOptions opt;
    opt.width = opt.height = 48;
    opt.iterations = 2000;
    RenderResult r = render_scene(scene, opt);
    CHECK(r.stats.patches == 2);
    CHECK(r.stats.unclaimed_pixels == 0);
    CHECK(r.stats.multi_claimed_pixels == 0);
}
