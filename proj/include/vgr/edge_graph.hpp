#pragma once

#include <string>
#include <vector>

#include "vgr/bvh.hpp"
#include "vgr/geometry.hpp"
#include "vgr/scene.hpp"

namespace vgr {

struct GraphVertex {
    int id = -1;
    Vec2 pos;
    // (edge id, end index 0/1), in insertion order.
    std::vector<std::pair<int, int>> incident;
};

// One intersection-free piece of an input boundary curve. Geometry is the
// source-curve window [ta,tb]; the polyline endpoints are snapped onto the
// vertex positions (which may sit off-curve after merging).
struct GraphEdge {
    int id = -1;
    int v0 = -1, v1 = -1;  // vertices at the ta / tb ends
    int curve = -1;        // index into EdgeGraph::curves()
    double ta = 0.0, tb = 0.0;
    Polyline polyline;
};

// Undirected planar edge graph: all curve endpoints and intersections are
// vertices, edge interiors are pairwise disjoint. `tau` is the snapping
// threshold on *squared* distance; exactly coincident endpoints (within the
// global coincidence tolerance) always merge regardless of tau.
class EdgeGraph {
public:
    EdgeGraph(double tau, double epsilon) : tau_(tau), epsilon_(epsilon) {}

    static EdgeGraph build(const std::vector<InputBoundaryCurve>& curves, double tau,
                           double epsilon);

    void insert_curve(const InputBoundaryCurve& curve);

    const std::vector<GraphVertex>& vertices() const { return vertices_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const std::vector<InputBoundaryCurve>& curves() const { return curves_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    double tau() const { return tau_; }
    double epsilon() const { return epsilon_; }

    const BezierSpline& edge_spline(const GraphEdge& e) const { return curves_[e.curve].spline; }
    // Outgoing tangent of an edge at one of its ends (end 0 points into the
    // edge from v0, end 1 from v1); falls back to the polyline direction at
    // cusps.
    Vec2 outgoing_tangent(const GraphEdge& e, int end) const;
    Vec2 outgoing_second_derivative(const GraphEdge& e, int end) const;

    int component_count() const;
    double total_edge_arclength() const;
    std::string dump_text() const;

private:
    struct Piece {
        double ta, tb;
        Polyline polyline;
        int v_start = -1, v_end = -1;  // pre-resolved vertices (or -1)
    };

    int new_vertex(Vec2 p);
    int vertex_on_edge(int edge_id, double t, int reuse_vertex = -1);
    void split_edge(int edge_id, const std::vector<std::pair<double, int>>& cuts);
    int resolve_endpoint(Vec2 p);
    void finalize_piece(int curve_index, Piece&& piece);
    void refresh_bvh();
    std::vector<int> candidate_edges(const Aabb& box);
    void refine_hit(int curve_a, double* ta_lo, double* ta_hi, int curve_b, double* tb_lo,
                    double* tb_hi, Vec2* point) const;

    double tau_;
    double epsilon_;
    std::vector<InputBoundaryCurve> curves_;
    std::vector<GraphVertex> vertices_;
    std::vector<GraphEdge> edges_;
    std::vector<std::string> warnings_;
    BoxBvh bvh_;
    bool bvh_dirty_ = true;
};

}  // namespace vgr
