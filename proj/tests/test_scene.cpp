#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vgr/ferguson.hpp"
#include "vgr/scene.hpp"

using namespace vgr;

namespace {

const char* kMinimalScene = R"({
  "format": 1,
  "domain": [0, 0, 2, 1],
  "diffusion_curves": [
    { "control_points": [[0,0],[0.4,0.2],[0.6,0.2],[1,0]],
      "left": [1,0,0],
      "right": {"stops": [[0,[0,0,1]],[1,[0,1,0]]]} }
  ]
})";

GradientMesh unit_square_mesh() {
    // Identity geometry: u (rows) along x, v (cols) along y. Corner colors
    // red/green/blue/black.
    GradientMesh m;
    m.rows = m.cols = 1;
    m.nodes.resize(4);
    auto make = [](Vec2 pos, ColorRGB c) {
        MeshNode n;
        n.pos = pos;
        n.color = c;
        n.du_pos = {1, 0};
        n.dv_pos = {0, 1};
        return n;
    };
    m.node(0, 0) = make({0, 0}, {1, 0, 0});
    m.node(0, 1) = make({0, 1}, {0, 1, 0});
    m.node(1, 0) = make({1, 0}, {0, 0, 1});
    m.node(1, 1) = make({1, 1}, {0, 0, 0});
    return m;
}

}  // namespace

TEST_CASE("parse minimal scene applies defaults") {
    Scene s = parse_scene(kMinimalScene);
    CHECK(s.diffusion_curves.size() == 1);
    CHECK(s.meshes.empty());
    CHECK(s.settings.tau == 0.0);
    CHECK(s.settings.iterations == 10000);
    CHECK(s.settings.multigrid_levels == 4);
    CHECK(s.settings.overlap_mode == OverlapMode::average);
    CHECK(s.epsilon_or_default() == doctest::Approx(0.01));  // 1% of min extent
    CHECK(s.diffusion_curves[0].left.is_dirichlet());
    CHECK(s.diffusion_curves[0].right.color.ramp.stops.size() == 2);
}

TEST_CASE("parse errors carry positions, validation names the violation") {
    CHECK_THROWS_AS(parse_scene("{ not json"), ParseError);
    CHECK_THROWS_AS(parse_scene("{\"format\":1}"), ValidationError);  // missing domain
    CHECK_THROWS_AS(parse_scene("{\"format\":2,\"domain\":[0,0,1,1]}"), ValidationError);
    CHECK_THROWS_AS(parse_scene("{\"format\":1,\"domain\":[0,0,0,1]}"), ValidationError);

    // decreasing ramp stops
    const char* bad_ramp = R"({"format":1,"domain":[0,0,1,1],"diffusion_curves":[
        {"control_points":[[0,0],[0,1],[1,1],[1,0]],
         "left":{"stops":[[0.5,[1,0,0]],[0.2,[0,1,0]]]}, "right":"neumann"}]})";
    CHECK_THROWS_WITH_AS(parse_scene(bad_ramp),
                         doctest::Contains("strictly increasing"), ValidationError);
}

TEST_CASE("poisson curve right profile is the stored negation") {
    const char* text = R"({"format":1,"domain":[0,0,1,1],"poisson_curves":[
        {"control_points":[[0,0],[0.3,0],[0.7,0],[1,0]],
         "left":{"kind":"linear","start":[0.2,0,0],"end":[0.4,0,0]}}]})";
    Scene s = parse_scene(text);
    REQUIRE(s.poisson_curves.size() == 1);
    const PoissonCurve& pc = s.poisson_curves[0];
    for (int i = 0; i <= 16; ++i) {
        double t = i / 16.0;
        CHECK((pc.left_profile.eval(t) + pc.right_profile.eval(t)).max_abs() < 1e-15);
    }
    CHECK(pc.band_width == doctest::Approx(3.0));

    // explicitly inconsistent sides are rejected
    const char* bad = R"({"format":1,"domain":[0,0,1,1],"poisson_curves":[
        {"control_points":[[0,0],[0.3,0],[0.7,0],[1,0]],
         "left":[0.2,0,0], "right":[0.2,0,0]}]})";
    CHECK_THROWS_AS(parse_scene(bad), ValidationError);
}

TEST_CASE("scene round-trips through serialization") {
    auto g = oracle::rng(31);
    Scene s;
    s.domain = {{-0.5, -0.25}, {2.5, 1.75}};
    s.settings.tau = 0.01;
    s.settings.epsilon = 0.004;
    s.settings.overlap_mode = OverlapMode::first;
    s.settings.iterations = 1234;
    s.meshes.push_back(fixtures::random_mesh(g));
    s.diffusion_curves.push_back(fixtures::dirichlet_curve(
        fixtures::circle_spline({1, 1}, 0.5), {0.25, 0.5, 0.75}, {1, 0, 0.125}));
    s.diffusion_curves.push_back(
        {fixtures::line_spline({0, 0}, {1, 1}), BoundaryCondition::neumann(),
         BoundaryCondition::dirichlet({{{0.0, {0, 0, 0}}, {0.5, {1, 1, 0}}, {1.0, {0, 1, 1}}}})});
    s.poisson_curves.push_back({fixtures::line_spline({0.5, 0.2}, {1.5, 0.8}),
                                LaplacianProfile::constant({0.3, -0.1, 0.0}),
                                LaplacianProfile::constant({-0.3, 0.1, 0.0}), 2.5});

    Scene r = parse_scene(serialize_scene(s));
    CHECK(r.domain.lo == s.domain.lo);
    CHECK(r.domain.hi == s.domain.hi);
    CHECK(r.settings.tau == s.settings.tau);
    CHECK(r.settings.epsilon == s.settings.epsilon);
    CHECK(r.settings.overlap_mode == s.settings.overlap_mode);
    CHECK(r.settings.iterations == s.settings.iterations);
    REQUIRE(r.meshes.size() == 1);
    for (size_t n = 0; n < s.meshes[0].nodes.size(); ++n) {
        CHECK(r.meshes[0].nodes[n].pos == s.meshes[0].nodes[n].pos);
        CHECK(r.meshes[0].nodes[n].color == s.meshes[0].nodes[n].color);
        CHECK(r.meshes[0].nodes[n].du_pos == s.meshes[0].nodes[n].du_pos);
        CHECK(r.meshes[0].nodes[n].dv_color == s.meshes[0].nodes[n].dv_color);
    }
    REQUIRE(r.diffusion_curves.size() == 2);
    CHECK(r.diffusion_curves[0].spline.segments.size() ==
          s.diffusion_curves[0].spline.segments.size());
    CHECK(r.diffusion_curves[1].left == s.diffusion_curves[1].left);
    CHECK(r.diffusion_curves[1].right == s.diffusion_curves[1].right);
    REQUIRE(r.poisson_curves.size() == 1);
    CHECK(r.poisson_curves[0].left_profile == s.poisson_curves[0].left_profile);
    CHECK(r.poisson_curves[0].band_width == s.poisson_curves[0].band_width);

    // parse(serialize(.)) is a fixed point byte-wise
    CHECK(serialize_scene(r) == serialize_scene(s));
}

TEST_CASE("mesh boundary: unit square emits 4 clockwise cubics with exact edge colors") {
    GradientMesh mesh = unit_square_mesh();
    auto curves = mesh_boundary_curves(mesh, 0);
    REQUIRE(curves.size() == 4);

    // Clockwise: signed area of the ring polygon is negative.
    double area = 0.0;
    for (const auto& c : curves) {
        Polyline p = discretize(c.spline, 1e-3);
        for (size_t i = 0; i + 1 < p.vertices.size(); ++i)
            area += cross(p.vertices[i], p.vertices[i + 1]);
    }
    CHECK(area < 0);

    // Ring is a closed C0 chain.
    for (size_t k = 0; k < 4; ++k)
        CHECK(dist(curves[k].spline.end(), curves[(k + 1) % 4].spline.start()) < 1e-12);

    // Right Dirichlet color equals the surface restriction along each edge
    // (the ring starts at the (u,v)=(1,1) corner and walks u=1 with v
    // descending, v=0 with u descending, u=0 with v ascending, v=1 with u
    // ascending).
    FergusonPatch patch = FergusonPatch::from_mesh(mesh, 0, 0);
    auto uv_on_edge = [](int edge, double t) {
        switch (edge) {
            case 0: return UV{1.0, 1.0 - t};
            case 1: return UV{1.0 - t, 0.0};
            case 2: return UV{0.0, t};
            default: return UV{t, 1.0};
        }
    };
    for (int edge = 0; edge < 4; ++edge) {
        REQUIRE(curves[edge].right.is_dirichlet());
        REQUIRE(curves[edge].right.color.is_cubic());
        CHECK(curves[edge].left.kind == BoundaryCondition::Kind::neumann);
        CHECK(curves[edge].source.kind == SourceRef::Kind::mesh);
        for (int i = 0; i <= 16; ++i) {
            double t = i / 16.0;
            UV uv = uv_on_edge(edge, t);
            ColorRGB expect = patch.color(uv.u, uv.v);
            ColorRGB got = curves[edge].right.color.eval(t, 1.0);
            CHECK((expect - got).max_abs() < 1e-9);
            CHECK(dist(patch.position(uv.u, uv.v), curves[edge].spline.eval(t)) < 1e-9);
        }
    }
}

TEST_CASE("mesh boundary: 2x3 mesh emits the 10-edge outer ring") {
    GradientMesh m;
    m.rows = 2;
    m.cols = 3;
    m.nodes.resize(12);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 3; ++j) {
            MeshNode n;
            n.pos = {double(i), double(j)};
            n.du_pos = {1, 0};
            n.dv_pos = {0, 1};
            n.color = {0.5, 0.5, 0.5};
            m.node(i, j) = n;
        }
    auto curves = mesh_boundary_curves(m, 0);
    CHECK(curves.size() == 10);  // 2*(rows+cols)
    for (size_t k = 0; k < curves.size(); ++k)
        CHECK(dist(curves[k].spline.end(), curves[(k + 1) % curves.size()].spline.start()) <
              1e-12);
}

TEST_CASE("mesh boundary: left override applies to all sides") {
    GradientMesh mesh = unit_square_mesh();
    mesh.left_override = BoundaryCondition::dirichlet(ColorRamp::constant({1, 1, 1}));
    auto curves = mesh_boundary_curves(mesh, 0);
    for (const auto& c : curves) {
        REQUIRE(c.left.is_dirichlet());
        CHECK(c.left.color.eval(0.5, 1.0) == ColorRGB{1, 1, 1});
    }
}

TEST_CASE("mesh boundary: folded boundary reported, not fixed") {
    GradientMesh mesh = unit_square_mesh();
    // Figure-eight handles on the v=1 side make that boundary edge loop over
    // itself (control polygon (0,1),(2,2),(-1,2),(1,1)).
    mesh.node(0, 1).du_pos = {6, 3};
    mesh.node(1, 1).du_pos = {6, -3};
    std::vector<std::string> warnings;
    auto curves = mesh_boundary_curves(mesh, 0, &warnings);
    CHECK(curves.size() == 4);
    REQUIRE(!warnings.empty());
    CHECK(warnings[0].find("FoldedMesh") != std::string::npos);
}

TEST_CASE("diffusion boundary curve is an identity wrap") {
    DiffusionCurve dc = fixtures::dirichlet_curve(fixtures::line_spline({0, 0}, {1, 0}),
                                                  {1, 0, 0}, {0, 0, 1});
    InputBoundaryCurve c = diffusion_boundary_curve(dc, 3);
    CHECK(c.left.is_dirichlet());
    CHECK(c.right.is_dirichlet());
    CHECK(c.left.color.eval(0.3, 1.0) == ColorRGB{1, 0, 0});
    CHECK(c.source.kind == SourceRef::Kind::diffusion);
    CHECK(c.source.index == 3);

    DiffusionCurve neumann_left{fixtures::line_spline({0, 0}, {1, 0}),
                                BoundaryCondition::neumann(),
                                BoundaryCondition::dirichlet(ColorRamp::constant({0, 1, 0}))};
    CHECK(diffusion_boundary_curve(neumann_left, 0).left.kind ==
          BoundaryCondition::Kind::neumann);

    DiffusionCurve closed = fixtures::dirichlet_curve(fixtures::circle_spline({0, 0}, 1.0),
                                                      {1, 1, 1}, {0, 0, 0});
    CHECK(diffusion_boundary_curve(closed, 0).spline.closed());
}

TEST_CASE("poisson profile sides sum to zero for every kind") {
    for (auto profile : {LaplacianProfile::constant({0.2, -0.1, 0.4}),
                         LaplacianProfile{LaplacianProfile::Kind::linear,
                                          {{0.0, {0.1, 0, 0}}, {1.0, {-0.2, 0.3, 0}}}},
                         LaplacianProfile{LaplacianProfile::Kind::piecewise,
                                          {{0.0, {0, 0, 0}}, {0.3, {1, 2, 3}}, {1.0, {0, -1, 0}}}}}) {
        LaplacianProfile neg = profile.negated();
        for (int i = 0; i <= 32; ++i) {
            double t = i / 32.0;
            CHECK((profile.eval(t) + neg.eval(t)).max_abs() < 1e-15);
        }
    }
}
