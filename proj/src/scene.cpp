#include "vgr/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vgr {

using nlohmann::json;

// ---------------------------------------------------------------- primitives

namespace {

// Bezier control points of the Hermite cubic with endpoint values p0,p1 and
// endpoint derivatives d0,d1.
CubicBezier hermite_to_bezier(Vec2 p0, Vec2 d0, Vec2 p1, Vec2 d1) {
    return {{p0, p0 + d0 / 3.0, p1 - d1 / 3.0, p1}};
}

ColorCubic hermite_to_color_cubic(ColorRGB c0, ColorRGB d0, ColorRGB c1, ColorRGB d1) {
    return {{c0, c0 + d0 * (1.0 / 3.0), c1 - d1 * (1.0 / 3.0), c1}};
}

struct RingStep {
    int i0, j0, i1, j1;   // node indices: from (i0,j0) to (i1,j1)
    int du, dv;           // traversal direction in node space (one of them 0)
};

// Outer ring of the node lattice in the clockwise order of the single-patch
// case: side u=1 with v descending, v=0 with u descending, u=0 with v
// ascending, v=1 with u ascending.
std::vector<RingStep> ring_steps(int rows, int cols) {
    std::vector<RingStep> steps;
    for (int j = cols; j >= 1; --j) steps.push_back({rows, j, rows, j - 1, 0, -1});
    for (int i = rows; i >= 1; --i) steps.push_back({i, 0, i - 1, 0, -1, 0});
    for (int j = 0; j < cols; ++j) steps.push_back({0, j, 0, j + 1, 0, 1});
    for (int i = 0; i < rows; ++i) steps.push_back({i, cols, i + 1, cols, 1, 0});
    return steps;
}

double ring_signed_area(const std::vector<InputBoundaryCurve>& curves) {
    double area = 0.0;
    for (const auto& c : curves) {
        double scale = std::max(1.0, c.spline.segments[0].control_polygon_length());
        Polyline p = discretize(c.spline, 1e-3 * scale);
        for (size_t i = 0; i + 1 < p.vertices.size(); ++i)
            area += cross(p.vertices[i], p.vertices[i + 1]);
    }
    return 0.5 * area;
}

}  // namespace

std::vector<InputBoundaryCurve> mesh_boundary_curves(const GradientMesh& mesh, int mesh_index,
                                                     std::vector<std::string>* warnings) {
    std::vector<InputBoundaryCurve> out;
    BoundaryCondition left =
        mesh.left_override ? *mesh.left_override : BoundaryCondition::neumann();

    int edge_index = 0;
    for (const RingStep& s : ring_steps(mesh.rows, mesh.cols)) {
        const MeshNode& n0 = mesh.node(s.i0, s.j0);
        const MeshNode& n1 = mesh.node(s.i1, s.j1);
        // Derivative along the traversal direction; signs flip on descending sides.
        Vec2 d0 = s.dv != 0 ? n0.dv_pos * s.dv : n0.du_pos * s.du;
        Vec2 d1 = s.dv != 0 ? n1.dv_pos * s.dv : n1.du_pos * s.du;
        ColorRGB cd0 = s.dv != 0 ? n0.dv_color * double(s.dv) : n0.du_color * double(s.du);
        ColorRGB cd1 = s.dv != 0 ? n1.dv_color * double(s.dv) : n1.du_color * double(s.du);

        InputBoundaryCurve curve;
        curve.spline.segments.push_back(hermite_to_bezier(n0.pos, d0, n1.pos, d1));
        curve.right = BoundaryCondition::dirichlet_cubic(
            {hermite_to_color_cubic(n0.color, cd0, n1.color, cd1)});
        curve.left = left;
        curve.source = {SourceRef::Kind::mesh, mesh_index, edge_index++};
        out.push_back(std::move(curve));
    }

    // The ring must run clockwise so that the right side faces the mesh
    // interior; mirrored node layouts come out counterclockwise and are
    // normalized here.
    if (ring_signed_area(out) > 0) {
        std::reverse(out.begin(), out.end());
        for (auto& c : out) {
            c.spline = c.spline.reversed();
            for (auto& cc : c.right.color.cubics) {
                std::swap(cc.c[0], cc.c[3]);
                std::swap(cc.c[1], cc.c[2]);
            }
        }
    }

    if (warnings) {
        for (size_t k = 0; k < out.size(); ++k) {
            double scale = std::max(1.0, out[k].spline.segments[0].control_polygon_length());
            Polyline p = discretize(out[k].spline, 1e-4 * scale);
            if (!intersect_polylines(p, p).empty())
                warnings->push_back("FoldedMesh: mesh " + std::to_string(mesh_index) +
                                    " boundary edge " + std::to_string(k) + " self-intersects");
        }
    }
    return out;
}

InputBoundaryCurve diffusion_boundary_curve(const DiffusionCurve& dc, int curve_index) {
    return {dc.spline, dc.left, dc.right, {SourceRef::Kind::diffusion, curve_index, -1}};
}

std::vector<InputBoundaryCurve> scene_boundary_curves(const Scene& scene,
                                                      std::vector<std::string>* warnings) {
    std::vector<InputBoundaryCurve> out;
    for (size_t m = 0; m < scene.meshes.size(); ++m) {
        auto ring = mesh_boundary_curves(scene.meshes[m], static_cast<int>(m), warnings);
        out.insert(out.end(), ring.begin(), ring.end());
    }
    for (size_t d = 0; d < scene.diffusion_curves.size(); ++d)
        out.push_back(diffusion_boundary_curve(scene.diffusion_curves[d], static_cast<int>(d)));
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

ColorRGB parse_color(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number())
        fail(std::string(what) + ": expected [r,g,b]");
    ColorRGB c{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!std::isfinite(c.r) || !std::isfinite(c.g) || !std::isfinite(c.b))
        fail(std::string(what) + ": non-finite color");
    return c;
}

Vec2 parse_vec2(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) fail(std::string(what) + ": expected [x,y]");
    Vec2 v{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) fail(std::string(what) + ": non-finite");
    return v;
}

std::vector<ColorStop> parse_stops(const json& j, const char* what) {
    std::vector<ColorStop> stops;
    for (const auto& s : j) {
        if (!s.is_array() || s.size() != 2) fail(std::string(what) + ": stop must be [t,[r,g,b]]");
        stops.push_back({s[0].get<double>(), parse_color(s[1], what)});
    }
    if (stops.empty()) fail(std::string(what) + ": needs at least one stop");
    for (size_t i = 0; i < stops.size(); ++i) {
        if (stops[i].t < 0.0 || stops[i].t > 1.0) fail(std::string(what) + ": stop t outside [0,1]");
        if (i > 0 && stops[i].t <= stops[i - 1].t)
            fail(std::string(what) + ": stop parameters must be strictly increasing");
    }
    return stops;
}

ColorRamp parse_ramp(const json& j, const char* what) {
    if (j.is_array()) return ColorRamp::constant(parse_color(j, what));  // [r,g,b] shorthand
    if (j.is_object() && j.contains("stops")) return {parse_stops(j.at("stops"), what)};
    fail(std::string(what) + ": expected [r,g,b] or {\"stops\": ...}");
}

BoundaryCondition parse_bc(const json& j, const char* what) {
    if (j.is_string()) {
        if (j.get<std::string>() == "neumann") return BoundaryCondition::neumann();
        fail(std::string(what) + ": unknown condition '" + j.get<std::string>() + "'");
    }
    return BoundaryCondition::dirichlet(parse_ramp(j, what));
}

BezierSpline parse_spline(const json& j, const char* what) {
    if (!j.is_array() || j.size() < 4 || (j.size() - 1) % 3 != 0)
        fail(std::string(what) + ": control_points must hold 3n+1 points");
    std::vector<Vec2> pts;
    for (const auto& p : j) pts.push_back(parse_vec2(p, what));
    BezierSpline s = BezierSpline::from_control_points(pts);
    if (s.empty()) fail(std::string(what) + ": all segments degenerate");
    return s;
}

LaplacianProfile parse_profile(const json& j, const char* what) {
    if (j.is_array()) return LaplacianProfile::constant(parse_color(j, what));
    if (!j.is_object() || !j.contains("kind")) fail(std::string(what) + ": expected profile object");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant")
        return LaplacianProfile::constant(parse_color(j.at("value"), what));
    if (kind == "linear") {
        return {LaplacianProfile::Kind::linear,
                {{0.0, parse_color(j.at("start"), what)}, {1.0, parse_color(j.at("end"), what)}}};
    }
    if (kind == "piecewise")
        return {LaplacianProfile::Kind::piecewise, parse_stops(j.at("stops"), what)};
    fail(std::string(what) + ": unknown profile kind '" + kind + "'");
}

GradientMesh parse_mesh(const json& j, int index) {
    GradientMesh m;
    m.rows = j.value("rows", 1);
    m.cols = j.value("cols", 1);
    if (m.rows < 1 || m.cols < 1) fail("gradient_meshes: rows/cols must be >= 1");
    size_t expected = static_cast<size_t>(m.rows + 1) * (m.cols + 1);
    const auto& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.size() != expected)
        fail("gradient_meshes[" + std::to_string(index) + "]: expected " +
             std::to_string(expected) + " nodes");
    for (const auto& n : nodes) {
        MeshNode node;
        node.pos = parse_vec2(n.at("pos"), "mesh node pos");
        node.color = parse_color(n.at("color"), "mesh node color");
        node.du_pos = parse_vec2(n.at("du_pos"), "mesh node du_pos");
        node.dv_pos = parse_vec2(n.at("dv_pos"), "mesh node dv_pos");
        if (n.contains("du_color")) node.du_color = parse_color(n.at("du_color"), "mesh du_color");
        if (n.contains("dv_color")) node.dv_color = parse_color(n.at("dv_color"), "mesh dv_color");
        m.nodes.push_back(node);
    }
    if (j.contains("left")) m.left_override = parse_bc(j.at("left"), "mesh left condition");
    m.z_order = index;
    return m;
}

json color_json(ColorRGB c) { return json::array({c.r, c.g, c.b}); }
json vec2_json(Vec2 v) { return json::array({v.x, v.y}); }

json stops_json(const std::vector<ColorStop>& stops) {
    json arr = json::array();
    for (const auto& s : stops) arr.push_back(json::array({s.t, color_json(s.color)}));
    return arr;
}

json bc_json(const BoundaryCondition& bc) {
    if (!bc.is_dirichlet()) return "neumann";
    return json{{"stops", stops_json(bc.color.ramp.stops)}};
}

json spline_json(const BezierSpline& s) {
    json arr = json::array();
    arr.push_back(vec2_json(s.segments[0].b[0]));
    for (const auto& seg : s.segments) {
        arr.push_back(vec2_json(seg.b[1]));
        arr.push_back(vec2_json(seg.b[2]));
        arr.push_back(vec2_json(seg.b[3]));
    }
    return arr;
}

json profile_json(const LaplacianProfile& p) {
    switch (p.kind) {
        case LaplacianProfile::Kind::constant:
            return json{{"kind", "constant"}, {"value", color_json(p.stops[0].color)}};
        case LaplacianProfile::Kind::linear:
            return json{{"kind", "linear"},
                        {"start", color_json(p.stops.front().color)},
                        {"end", color_json(p.stops.back().color)}};
        case LaplacianProfile::Kind::piecewise:
            return json{{"kind", "piecewise"}, {"stops", stops_json(p.stops)}};
    }
    return {};
}

}  // namespace

const char* overlap_mode_name(OverlapMode mode) {
    switch (mode) {
        case OverlapMode::zero: return "zero";
        case OverlapMode::sum: return "sum";
        case OverlapMode::average: return "average";
        case OverlapMode::first: return "first";
    }
    return "average";
}

std::optional<OverlapMode> overlap_mode_from_name(const std::string& name) {
    if (name == "zero") return OverlapMode::zero;
    if (name == "sum") return OverlapMode::sum;
    if (name == "average") return OverlapMode::average;
    if (name == "first") return OverlapMode::first;
    return std::nullopt;
}

Scene parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());  // carries the byte position
    }

    try {
        Scene scene;
        if (j.value("format", 0) != 1) fail("unsupported or missing \"format\" (expected 1)");

        const auto& dom = j.at("domain");
        if (!dom.is_array() || dom.size() != 4) fail("domain: expected [x0,y0,x1,y1]");
        scene.domain = {{dom[0].get<double>(), dom[1].get<double>()},
                        {dom[2].get<double>(), dom[3].get<double>()}};
        if (!(scene.domain.width() > 0) || !(scene.domain.height() > 0))
            fail("domain must have positive area");

        if (j.contains("settings")) {
            const auto& s = j.at("settings");
            scene.settings.tau = s.value("tau", 0.0);
            if (scene.settings.tau < 0) fail("settings.tau must be >= 0");
            if (s.contains("epsilon")) {
                scene.settings.epsilon = s.at("epsilon").get<double>();
                if (scene.settings.epsilon <= 0) fail("settings.epsilon must be > 0");
            }
            if (s.contains("overlap_mode")) {
                auto m = overlap_mode_from_name(s.at("overlap_mode").get<std::string>());
                if (!m) fail("settings.overlap_mode: expected zero|sum|average|first");
                scene.settings.overlap_mode = *m;
            }
            scene.settings.iterations = s.value("iterations", 10000);
            if (scene.settings.iterations < 1) fail("settings.iterations must be >= 1");
            scene.settings.multigrid_levels = s.value("multigrid_levels", 4);
            if (scene.settings.multigrid_levels < 1) fail("settings.multigrid_levels must be >= 1");
            scene.settings.residual_target = s.value("residual_target", 1e-5);
            if (scene.settings.residual_target <= 0) fail("settings.residual_target must be > 0");
        }

        int mesh_index = 0;
        for (const auto& m : j.value("gradient_meshes", json::array()))
            scene.meshes.push_back(parse_mesh(m, mesh_index++));

        for (const auto& d : j.value("diffusion_curves", json::array())) {
            DiffusionCurve dc;
            dc.spline = parse_spline(d.at("control_points"), "diffusion_curves");
            dc.left = parse_bc(d.at("left"), "diffusion curve left");
            dc.right = parse_bc(d.at("right"), "diffusion curve right");
            scene.diffusion_curves.push_back(std::move(dc));
        }

        for (const auto& p : j.value("poisson_curves", json::array())) {
            PoissonCurve pc;
            pc.spline = parse_spline(p.at("control_points"), "poisson_curves");
            pc.left_profile = parse_profile(p.at("left"), "poisson curve left");
            pc.right_profile = pc.left_profile.negated();
            if (p.contains("right")) {
                LaplacianProfile given = parse_profile(p.at("right"), "poisson curve right");
                for (int k = 0; k <= 32; ++k) {
                    double t = k / 32.0;
                    if ((given.eval(t) + pc.left_profile.eval(t)).max_abs() > 1e-9)
                        fail("poisson curve sides must sum to zero along the curve");
                }
            }
            pc.band_width = p.value("band_width", 3.0);
            if (pc.band_width <= 0) fail("poisson curve band_width must be > 0");
            scene.poisson_curves.push_back(std::move(pc));
        }
        return scene;
    } catch (const json::exception& e) {
        throw ValidationError(e.what());
    }
}

std::string serialize_scene(const Scene& scene) {
    json j;
    j["format"] = 1;
    j["domain"] = json::array(
        {scene.domain.lo.x, scene.domain.lo.y, scene.domain.hi.x, scene.domain.hi.y});
    j["settings"] = {
        {"tau", scene.settings.tau},
        {"overlap_mode", overlap_mode_name(scene.settings.overlap_mode)},
        {"iterations", scene.settings.iterations},
        {"multigrid_levels", scene.settings.multigrid_levels},
        {"residual_target", scene.settings.residual_target},
    };
    if (scene.settings.epsilon > 0) j["settings"]["epsilon"] = scene.settings.epsilon;

    json meshes = json::array();
    for (const auto& m : scene.meshes) {
        json nodes = json::array();
        for (const auto& n : m.nodes) {
            nodes.push_back({{"pos", vec2_json(n.pos)},
                             {"color", color_json(n.color)},
                             {"du_pos", vec2_json(n.du_pos)},
                             {"dv_pos", vec2_json(n.dv_pos)},
                             {"du_color", color_json(n.du_color)},
                             {"dv_color", color_json(n.dv_color)}});
        }
        json jm{{"rows", m.rows}, {"cols", m.cols}, {"nodes", nodes}};
        if (m.left_override) jm["left"] = bc_json(*m.left_override);
        meshes.push_back(jm);
    }
    j["gradient_meshes"] = meshes;

    json dcs = json::array();
    for (const auto& d : scene.diffusion_curves)
        dcs.push_back({{"control_points", spline_json(d.spline)},
                       {"left", bc_json(d.left)},
                       {"right", bc_json(d.right)}});
    j["diffusion_curves"] = dcs;

    json pcs = json::array();
    for (const auto& p : scene.poisson_curves)
        pcs.push_back({{"control_points", spline_json(p.spline)},
                       {"left", profile_json(p.left_profile)},
                       {"band_width", p.band_width}});
    j["poisson_curves"] = pcs;

    return j.dump(2);
}

}  // namespace vgr
