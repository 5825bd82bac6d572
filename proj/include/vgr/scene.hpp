#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vgr/color.hpp"
#include "vgr/geometry.hpp"

namespace vgr {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cubic Bezier in color space; used for the exact edge color restriction of
// gradient-mesh boundaries.
struct ColorCubic {
    ColorRGB c[4];

    ColorRGB eval(double t) const {
        ColorRGB c01 = c[0] * (1 - t) + c[1] * t;
        ColorRGB c12 = c[1] * (1 - t) + c[2] * t;
        ColorRGB c23 = c[2] * (1 - t) + c[3] * t;
        ColorRGB a = c01 * (1 - t) + c12 * t;
        ColorRGB b = c12 * (1 - t) + c23 * t;
        return a * (1 - t) + b * t;
    }
    bool operator==(const ColorCubic&) const = default;
};

// Color along a curve: either a piecewise-linear ramp over the normalized
// parameter [0,1], or exact per-segment color cubics over the global spline
// parameter (mesh boundaries keep the exact form).
struct DirichletColor {
    ColorRamp ramp;
    std::vector<ColorCubic> cubics;  // non-empty ⇒ cubic form

    bool is_cubic() const { return !cubics.empty(); }

    // t_global in [0, t_total] (the spline parameter range of the curve).
    ColorRGB eval(double t_global, double t_total) const {
        if (is_cubic()) {
            double t = std::clamp(t_global, 0.0, t_total);
            size_t seg = std::min(static_cast<size_t>(t), cubics.size() - 1);
            return cubics[seg].eval(t - static_cast<double>(seg));
        }
        return ramp.eval(t_total > 0 ? t_global / t_total : 0.0);
    }
    bool operator==(const DirichletColor&) const = default;
};

struct BoundaryCondition {
    enum class Kind { dirichlet, neumann };
    Kind kind = Kind::neumann;
    DirichletColor color;  // meaningful for dirichlet only

    static BoundaryCondition neumann() { return {}; }
    static BoundaryCondition dirichlet(ColorRamp ramp) {
        return {Kind::dirichlet, {std::move(ramp), {}}};
    }
    static BoundaryCondition dirichlet_cubic(std::vector<ColorCubic> cubics) {
        return {Kind::dirichlet, {{}, std::move(cubics)}};
    }
    bool is_dirichlet() const { return kind == Kind::dirichlet; }
    bool operator==(const BoundaryCondition&) const = default;
};

// Target Laplacian along one side of a Poisson curve, per channel, over the
// normalized curve parameter.
struct LaplacianProfile {
    enum class Kind { constant, linear, piecewise };
    Kind kind = Kind::constant;
    std::vector<ColorStop> stops;

    static LaplacianProfile constant(ColorRGB v) { return {Kind::constant, {{0.0, v}}}; }

    ColorRGB eval(double t) const { return ColorRamp{stops}.eval(t); }
    LaplacianProfile negated() const {
        LaplacianProfile out{kind, stops};
        for (auto& s : out.stops) s.color = -s.color;
        return out;
    }
    bool operator==(const LaplacianProfile&) const = default;
};

// Where an input boundary curve came from; the rasterizer uses mesh sources
// to interpolate Dirichlet pixel colors inside the mesh.
struct SourceRef {
    enum class Kind { diffusion, mesh, border };
    Kind kind = Kind::diffusion;
    int index = -1;  // mesh or diffusion-curve index in the scene
    int edge = -1;   // boundary-edge index within a mesh ring
    bool operator==(const SourceRef&) const = default;
};

// Oriented spatial curve plus the boundary conditions on its two sides; the
// unit inserted into the edge graph.
struct InputBoundaryCurve {
    BezierSpline spline;
    BoundaryCondition left;
    BoundaryCondition right;
    SourceRef source;
};

struct DiffusionCurve {
    BezierSpline spline;
    BoundaryCondition left;
    BoundaryCondition right;
};

struct PoissonCurve {
    BezierSpline spline;
    LaplacianProfile left_profile;
    LaplacianProfile right_profile;  // stored as the negation of left_profile
    double band_width = 3.0;         // pixels on each side
};

struct MeshNode {
    Vec2 pos;
    ColorRGB color;
    Vec2 du_pos, dv_pos;          // tangent handles along the u/v directions
    ColorRGB du_color, dv_color;
};

// Grid of Ferguson patches. Nodes are stored row-major on a
// (rows+1) x (cols+1) lattice; u runs along rows, v along columns. Mixed
// partials are implicitly zero.
struct GradientMesh {
    int rows = 1, cols = 1;
    std::vector<MeshNode> nodes;
    std::optional<BoundaryCondition> left_override;  // outside condition; default Neumann
    int z_order = 0;                                 // list order, last = topmost

    const MeshNode& node(int i, int j) const { return nodes[i * (cols + 1) + j]; }
    MeshNode& node(int i, int j) { return nodes[i * (cols + 1) + j]; }
};

enum class OverlapMode { zero, sum, average, first };

struct RenderSettings {
    double tau = 0.0;        // endpoint snapping threshold on squared distance
    double epsilon = -1.0;   // polyline error bound; <0 = 1% of min domain extent
    OverlapMode overlap_mode = OverlapMode::average;
    int iterations = 10000;
    int multigrid_levels = 4;
    double residual_target = 1e-5;
};

struct Rect {
    Vec2 lo, hi;
    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double min_extent() const { return std::min(width(), height()); }
};

struct Scene {
    Rect domain{{0, 0}, {1, 1}};
    std::vector<GradientMesh> meshes;
    std::vector<DiffusionCurve> diffusion_curves;
    std::vector<PoissonCurve> poisson_curves;
    RenderSettings settings;

    double epsilon_or_default() const {
        return settings.epsilon > 0 ? settings.epsilon : 0.01 * domain.min_extent();
    }
};

// Boundary curves of the outermost mesh ring, one per Ferguson patch edge,
// oriented clockwise (right side = mesh interior, Dirichlet with the exact
// edge color restriction). Self-intersecting boundaries are reported into
// `warnings` but still emitted.
std::vector<InputBoundaryCurve> mesh_boundary_curves(const GradientMesh& mesh, int mesh_index,
                                                     std::vector<std::string>* warnings = nullptr);

InputBoundaryCurve diffusion_boundary_curve(const DiffusionCurve& dc, int curve_index);

// All input boundary curves of a scene: mesh rings first, then diffusion
// curves, in scene order. Poisson curves carry no boundary conditions and
// are rasterized separately.
std::vector<InputBoundaryCurve> scene_boundary_curves(const Scene& scene,
                                                      std::vector<std::string>* warnings = nullptr);

Scene parse_scene(const std::string& text);
std::string serialize_scene(const Scene& scene);

const char* overlap_mode_name(OverlapMode mode);
std::optional<OverlapMode> overlap_mode_from_name(const std::string& name);

}  // namespace vgr
