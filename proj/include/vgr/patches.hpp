#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vgr/edge_graph.hpp"
#include "vgr/geometry.hpp"
#include "vgr/scene.hpp"

namespace vgr {

// Inconsistent rotation order while tracing loops; indicates an upstream
// planarity bug.
struct TraversalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A loop tested inside two non-nested patches; indicates a tolerance failure.
struct ContainmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One traversal step: an edge walked forward or backward, carrying the
// boundary condition of the side that faces the patch interior (the source
// curve's right condition when walked forward, left when walked backward).
struct PatchBoundaryCurve {
    int edge = -1;
    bool forward = true;
    BoundaryCondition condition;
    SourceRef source;
};

struct BoundaryLoop {
    std::vector<PatchBoundaryCurve> curves;
    int turning = 0;
    // Closed traversal-ordered point chain (first point not repeated).
    std::vector<Vec2> points;
    Aabb bounds;
    double signed_area = 0.0;
};

struct Patch {
    int id = -1;
    BoundaryLoop outer;                 // negative turning, clockwise interior
    std::vector<BoundaryLoop> contained;  // nested loops: holes and dangling edges
    std::vector<std::pair<int, double>> mesh_weights;  // (mesh index, lambda)
    Vec2 probe;                         // interior sample point
    bool has_probe = false;

    double winding_sum(Vec2 p, bool* on_boundary) const;
    bool contains(Vec2 p, bool* on_boundary = nullptr) const;
};

// Four clockwise border curves of the image-domain rectangle, Neumann on
// both sides; inserted into the edge graph ahead of the scene curves so the
// background region becomes an ordinary patch.
std::vector<InputBoundaryCurve> domain_border_curves(const Rect& domain);

// Extracts every closed loop of the planar graph: each edge is traversed
// exactly twice (once per side); at a junction the traversal departs along
// the first edge counterclockwise from the reversed arrival tangent, which
// keeps the enclosed face on the right of the walk. Dangling edges are
// walked forward then immediately backward.
std::vector<BoundaryLoop> trace_loops(const EdgeGraph& graph);

// Turning number of a closed point chain: discrete exterior angles summed
// and divided by 2*pi, rounded to the nearest integer.
int turning_number(const std::vector<Vec2>& closed_points);

// Builds patches: negative-turning loops become patch outer boundaries;
// nonnegative loops attach as contained boundaries of the smallest enclosing
// patch (winding-angle containment with bounding-box prefiltering); loops
// contained in nothing (the unbounded exterior) are dropped.
std::vector<Patch> assemble_patches(const std::vector<BoundaryLoop>& loops,
                                    const EdgeGraph& graph);

// Gradient meshes overlapping each patch, weighted per the overlap mode:
// zero -> 0, sum -> 1, average -> 1/n, first -> 1 for the topmost z-order.
// `mesh_rings` are the discretized outer rings of the scene meshes.
void assign_mesh_weights(std::vector<Patch>& patches, const std::vector<Polyline>& mesh_rings,
                         OverlapMode mode);

std::string dump_patches_text(const std::vector<Patch>& patches);

}  // namespace vgr
