#include "vgr/edge_graph.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

namespace vgr {

namespace {

constexpr double kParamEps = 1e-9;

// Param window of the polyline segment bracketing t.
void bracket(const Polyline& poly, double t, double* lo, double* hi) {
    auto it = std::upper_bound(poly.params.begin(), poly.params.end(), t);
    size_t i = std::clamp<size_t>(it - poly.params.begin(), 1, poly.params.size() - 1);
    *lo = poly.params[i - 1];
    *hi = poly.params[i];
}

bool segments_cross(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, double* simu = nullptr,
                    double* u_out = nullptr) {
    Vec2 r = a1 - a0, q = b1 - b0;
    double denom = cross(r, q);
    if (std::abs(denom) < 1e-18) return false;
    Vec2 d = b0 - a0;
    double s = cross(d, q) / denom;
    double u = cross(d, r) / denom;
    if (s < -1e-9 || s > 1 + 1e-9 || u < -1e-9 || u > 1 + 1e-9) return false;
    if (simu) *simu = std::clamp(s, 0.0, 1.0);
    if (u_out) *u_out = std::clamp(u, 0.0, 1.0);
    return true;
}

}  // namespace

// ---------------------------------------------------------------- basics

EdgeGraph EdgeGraph::build(const std::vector<InputBoundaryCurve>& curves, double tau,
                           double epsilon) {
    EdgeGraph g(tau, epsilon);
    for (const auto& c : curves) g.insert_curve(c);
    return g;
}

int EdgeGraph::new_vertex(Vec2 p) {
    GraphVertex v;
    v.id = static_cast<int>(vertices_.size());
    v.pos = p;
    vertices_.push_back(std::move(v));
    return vertices_.back().id;
}

void EdgeGraph::refresh_bvh() {
    if (!bvh_dirty_) return;
    std::vector<Aabb> boxes(edges_.size());
    for (size_t i = 0; i < edges_.size(); ++i) boxes[i] = edges_[i].polyline.bounds();
    bvh_.build(std::move(boxes));
    bvh_dirty_ = false;
}

std::vector<int> EdgeGraph::candidate_edges(const Aabb& box) {
    refresh_bvh();
    std::vector<int> ids;
    bvh_.query(box.expanded(std::sqrt(std::max(tau_, 0.0)) + kCoincidenceTol), ids);
    return ids;
}

Vec2 EdgeGraph::outgoing_tangent(const GraphEdge& e, int end) const {
    const BezierSpline& s = edge_spline(e);
    Vec2 t = end == 0 ? s.tangent(e.ta) : s.tangent(e.tb) * -1.0;
    if (t.norm() > 1e-12) return t;
    // Cusp: use the polyline direction instead.
    const auto& v = e.polyline.vertices;
    if (v.size() >= 2) t = end == 0 ? v[1] - v[0] : v[v.size() - 2] - v.back();
    return t;
}

Vec2 EdgeGraph::outgoing_second_derivative(const GraphEdge& e, int end) const {
    const BezierSpline& s = edge_spline(e);
    // Reversing a curve flips the first derivative but keeps the second.
    return end == 0 ? s.second_derivative(e.ta) : s.second_derivative(e.tb);
}

// ---------------------------------------------------------------- splitting

// Splits an edge at the given source parameters (strictly inside the window,
// ascending, with vertex ids already allocated).
void EdgeGraph::split_edge(int edge_id, const std::vector<std::pair<double, int>>& cuts) {
    if (cuts.empty()) return;
    GraphEdge old = edges_[edge_id];

    struct Part {
        double ta, tb;
        int v0, v1;
    };
    std::vector<Part> parts;
    double prev_t = old.ta;
    int prev_v = old.v0;
    for (const auto& [t, vid] : cuts) {
        parts.push_back({prev_t, t, prev_v, vid});
        prev_t = t;
        prev_v = vid;
    }
    parts.push_back({prev_t, old.tb, prev_v, old.v1});

    auto make_polyline = [&](const Part& part) {
        Polyline p = old.polyline.slice(part.ta, part.tb);
        p.vertices.front() = vertices_[part.v0].pos;
        p.vertices.back() = vertices_[part.v1].pos;
        return p;
    };

    // First part replaces the edge in place; the rest are appended.
    std::vector<int> part_ids(parts.size());
    part_ids[0] = edge_id;
    edges_[edge_id].tb = parts[0].tb;
    edges_[edge_id].v1 = parts[0].v1;
    edges_[edge_id].polyline = make_polyline(parts[0]);
    for (size_t k = 1; k < parts.size(); ++k) {
        GraphEdge e;
        e.id = static_cast<int>(edges_.size());
        e.curve = old.curve;
        e.ta = parts[k].ta;
        e.tb = parts[k].tb;
        e.v0 = parts[k].v0;
        e.v1 = parts[k].v1;
        e.polyline = make_polyline(parts[k]);
        part_ids[k] = e.id;
        edges_.push_back(std::move(e));
    }

    // Rewire incidences: the far endpoint now belongs to the last part.
    auto& far = vertices_[old.v1].incident;
    for (auto& inc : far)
        if (inc.first == edge_id && inc.second == 1) inc = {part_ids.back(), 1};
    for (size_t k = 0; k < cuts.size(); ++k) {
        vertices_[cuts[k].second].incident.push_back({part_ids[k], 1});
        vertices_[cuts[k].second].incident.push_back({part_ids[k + 1], 0});
    }
    bvh_dirty_ = true;
}

int EdgeGraph::vertex_on_edge(int edge_id, double t, int reuse_vertex) {
    const GraphEdge& e = edges_[edge_id];
    if (t <= e.ta + kParamEps) return e.v0;
    if (t >= e.tb - kParamEps) return e.v1;
    int vid = reuse_vertex >= 0 ? reuse_vertex : new_vertex(edge_spline(e).eval(t));
    split_edge(edge_id, {{t, vid}});
    return vid;
}

int EdgeGraph::resolve_endpoint(Vec2 p) {
    // Merge with the nearest qualifying vertex first (|.|^2 < tau, or exact
    // coincidence regardless of tau).
    int best = -1;
    double best_d = 1e300;
    for (const auto& v : vertices_) {
        double d = dist(p, v.pos);
        if ((d <= kCoincidenceTol || d * d < tau_) && d < best_d - 1e-15) {
            best = v.id;
            best_d = d;
        }
    }
    if (best >= 0) return best;

    // Then snap onto the closest point of an existing edge, splitting it.
    Aabb box;
    box.extend(p);
    int best_edge = -1;
    double best_t = 0.0;
    for (int id : candidate_edges(box)) {

        ClosestPointResult c = closest_point(edges_[id].polyline, p);
        if ((c.distance <= kCoincidenceTol || c.distance * c.distance < tau_) &&
            c.distance < best_d - 1e-15) {
            best_d = c.distance;
            best_edge = id;
            best_t = c.t;
        }
    }
    if (best_edge >= 0) return vertex_on_edge(best_edge, best_t);
    return new_vertex(p);
}

// 10 bisection steps on the exact curve pair, shrinking both param brackets
// around the crossing; the refined point is the intersection of the final
// chords.
void EdgeGraph::refine_hit(int curve_a, double* ta_lo, double* ta_hi, int curve_b, double* tb_lo,
                           double* tb_hi, Vec2* point) const {
    const BezierSpline& sa = curves_[curve_a].spline;
    const BezierSpline& sb = curves_[curve_b].spline;
    for (int step = 0; step < 10; ++step) {
        Vec2 b0 = sb.eval(*tb_lo), b1 = sb.eval(*tb_hi);
        double am = 0.5 * (*ta_lo + *ta_hi);
        Vec2 a0 = sa.eval(*ta_lo), amid = sa.eval(am), a1 = sa.eval(*ta_hi);
        if (segments_cross(a0, amid, b0, b1)) *ta_hi = am;
        else if (segments_cross(amid, a1, b0, b1)) *ta_lo = am;
        else break;  // tangential; keep the bracket

        a0 = sa.eval(*ta_lo);
        a1 = sa.eval(*ta_hi);
        double bm = 0.5 * (*tb_lo + *tb_hi);
        Vec2 bmid = sb.eval(bm);
        b0 = sb.eval(*tb_lo);
        b1 = sb.eval(*tb_hi);
        if (segments_cross(b0, bmid, a0, a1)) *tb_hi = bm;
        else if (segments_cross(bmid, b1, a0, a1)) *tb_lo = bm;
        else break;
    }
    Vec2 a0 = sa.eval(*ta_lo), a1 = sa.eval(*ta_hi);
    Vec2 b0 = sb.eval(*tb_lo), b1 = sb.eval(*tb_hi);
    double s, u;
    if (segments_cross(a0, a1, b0, b1, &s, &u)) {
        *point = a0 + (a1 - a0) * s;
        *ta_lo = *ta_hi = *ta_lo + s * (*ta_hi - *ta_lo);
        *tb_lo = *tb_hi = *tb_lo + u * (*tb_hi - *tb_lo);
    } else {
        *point = (a0 + a1) * 0.5;
        *ta_lo = *ta_hi = 0.5 * (*ta_lo + *ta_hi);
        *tb_lo = *tb_hi = 0.5 * (*tb_lo + *tb_hi);
    }
}

// ---------------------------------------------------------------- insertion

void EdgeGraph::insert_curve(const InputBoundaryCurve& curve) {
    int ci = static_cast<int>(curves_.size());
    curves_.push_back(curve);
    if (curve.spline.empty()) {
        warnings_.push_back("curve " + std::to_string(ci) + ": empty spline discarded");
        return;
    }

    Polyline poly = discretize(curve.spline, epsilon_);
    if (poly.arclength() <= kCoincidenceTol) {
        warnings_.push_back("curve " + std::to_string(ci) + ": zero-length, discarded");
        return;
    }

    // Cut at self-intersections first. Both cut parameters of one crossing
    // share a single vertex at the refined intersection point.
    struct SelfCut {
        double t;
        int hit;
    };
    std::vector<SelfCut> cuts;
    std::vector<Vec2> hit_points;
    for (const PolylineHit& h : intersect_polylines(poly, poly)) {
        double alo, ahi, blo, bhi;
        bracket(poly, h.t_a, &alo, &ahi);
        bracket(poly, h.t_b, &blo, &bhi);
        Vec2 p;
        refine_hit(ci, &alo, &ahi, ci, &blo, &bhi, &p);
        int hit_id = static_cast<int>(hit_points.size());
        hit_points.push_back(p);
        cuts.push_back({alo, hit_id});
        cuts.push_back({blo, hit_id});
    }
    std::sort(cuts.begin(), cuts.end(), [](const SelfCut& a, const SelfCut& b) { return a.t < b.t; });
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](const SelfCut& a, const SelfCut& b) {
                               return std::abs(a.t - b.t) < kParamEps;
                           }),
               cuts.end());

    std::deque<Piece> queue;
    std::vector<int> hit_vertex(hit_points.size(), -1);
    double prev = 0.0;
    for (const SelfCut& c : cuts) {
        if (c.t <= prev + kParamEps) continue;
        queue.push_back({prev, c.t, poly.slice(prev, c.t), -1, -1});
        prev = c.t;
    }
    queue.push_back({prev, poly.params.back(), poly.slice(prev, poly.params.back()), -1, -1});

    auto cut_vertex = [&](double t) {
        for (const SelfCut& c : cuts) {
            if (std::abs(c.t - t) >= kParamEps) continue;
            if (hit_vertex[c.hit] < 0) hit_vertex[c.hit] = resolve_endpoint(hit_points[c.hit]);
            return hit_vertex[c.hit];
        }
        return -1;
    };

    int guard = 0;
    while (!queue.empty()) {
        if (++guard > 10000) {
            warnings_.push_back("curve " + std::to_string(ci) +
                                ": intersection resolution did not settle");
            break;
        }
        Piece piece = std::move(queue.front());
        queue.pop_front();
        if (piece.tb - piece.ta <= kParamEps || piece.polyline.arclength() <= kCoincidenceTol)
            continue;

        // Resolve endpoint vertices (merging and snapping may bend the ends).
        if (piece.v_start < 0) piece.v_start = cut_vertex(piece.ta);
        if (piece.v_start < 0)
            piece.v_start = resolve_endpoint(piece.polyline.vertices.front());
        if (piece.v_end < 0) piece.v_end = cut_vertex(piece.tb);
        if (piece.v_end < 0) piece.v_end = resolve_endpoint(piece.polyline.vertices.back());
        piece.polyline.vertices.front() = vertices_[piece.v_start].pos;
        piece.polyline.vertices.back() = vertices_[piece.v_end].pos;

        // Transversal intersections against existing edges.
        struct Hit {
            double t_piece;
            int vid;
        };
        std::vector<Hit> piece_cuts;
        std::vector<int> cand = candidate_edges(piece.polyline.bounds());
        bool split_something = false;
        for (int eid : cand) {
            // Edge list may have grown via splits; re-read each round.
            std::vector<PolylineHit> hits = intersect_polylines(piece.polyline, edges_[eid].polyline);
            std::vector<std::pair<double, int>> edge_cuts;
            for (const PolylineHit& h : hits) {
                const GraphEdge& e = edges_[eid];
                bool piece_interior =
                    h.t_a > piece.ta + kParamEps && h.t_a < piece.tb - kParamEps;
                bool edge_interior = h.t_b > e.ta + kParamEps && h.t_b < e.tb - kParamEps;
                if (!piece_interior && !edge_interior) continue;

                double alo, ahi, blo, bhi;
                bracket(piece.polyline, h.t_a, &alo, &ahi);
                bracket(e.polyline, h.t_b, &blo, &bhi);
                Vec2 p;
                refine_hit(ci, &alo, &ahi, e.curve, &blo, &bhi, &p);
                double tp = std::clamp(alo, piece.ta, piece.tb);
                double te = std::clamp(blo, e.ta, e.tb);
                piece_interior = tp > piece.ta + kParamEps && tp < piece.tb - kParamEps;
                edge_interior = te > e.ta + kParamEps && te < e.tb - kParamEps;
                if (!piece_interior && !edge_interior) continue;

                int vid;
                if (!piece_interior) {
                    vid = tp <= piece.ta + kParamEps ? piece.v_start : piece.v_end;
                } else if (!edge_interior) {
                    vid = te <= e.ta + kParamEps ? e.v0 : e.v1;
                } else {
                    vid = new_vertex(p);
                }
                if (edge_interior) edge_cuts.push_back({te, vid});
                if (piece_interior) piece_cuts.push_back({tp, vid});
            }
            if (!edge_cuts.empty()) {
                std::sort(edge_cuts.begin(), edge_cuts.end());
                edge_cuts.erase(std::unique(edge_cuts.begin(), edge_cuts.end(),
                                            [](auto a, auto b) {
                                                return std::abs(a.first - b.first) < kParamEps;
                                            }),
                                edge_cuts.end());
                split_edge(eid, edge_cuts);
                split_something = true;
            }
        }

        if (piece_cuts.empty()) {
            if (split_something) {
                // Edges changed under us but the piece itself is uncut; loop
                // once more to be safe.
                queue.push_front(std::move(piece));
                continue;
            }
            finalize_piece(ci, std::move(piece));
            continue;
        }

        std::sort(piece_cuts.begin(), piece_cuts.end(),
                  [](const Hit& a, const Hit& b) { return a.t_piece < b.t_piece; });
        piece_cuts.erase(std::unique(piece_cuts.begin(), piece_cuts.end(),
                                     [](const Hit& a, const Hit& b) {
                                         return std::abs(a.t_piece - b.t_piece) < kParamEps;
                                     }),
                         piece_cuts.end());
        double t0 = piece.ta;
        int v0 = piece.v_start;
        for (const Hit& h : piece_cuts) {
            queue.push_back({t0, h.t_piece, piece.polyline.slice(t0, h.t_piece), v0, h.vid});
            t0 = h.t_piece;
            v0 = h.vid;
        }
        queue.push_back({t0, piece.tb, piece.polyline.slice(t0, piece.tb), v0, piece.v_end});
    }
}

void EdgeGraph::finalize_piece(int curve_index, Piece&& piece) {
    // Tangentially overlapping intervals stay owned by the earlier curve.
    Vec2 mid = piece.polyline.point_at_param(0.5 * (piece.ta + piece.tb));
    Aabb box;
    box.extend(mid);
    for (int eid : candidate_edges(box)) {
        if (closest_point(edges_[eid].polyline, mid).distance <= kCoincidenceTol) {
            warnings_.push_back("curve " + std::to_string(curve_index) +
                                ": overlapping interval dropped (kept edge " +
                                std::to_string(eid) + ")");
            return;
        }
    }

    GraphEdge e;
    e.id = static_cast<int>(edges_.size());
    e.curve = curve_index;
    e.ta = piece.ta;
    e.tb = piece.tb;
    e.v0 = piece.v_start;
    e.v1 = piece.v_end;
    e.polyline = std::move(piece.polyline);
    vertices_[e.v0].incident.push_back({e.id, 0});
    vertices_[e.v1].incident.push_back({e.id, 1});
    edges_.push_back(std::move(e));
    bvh_dirty_ = true;
}

// ---------------------------------------------------------------- queries

int EdgeGraph::component_count() const {
    std::vector<int> parent(vertices_.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& e : edges_) parent[find(e.v0)] = find(e.v1);
    int count = 0;
    for (size_t i = 0; i < parent.size(); ++i)
        if (find(static_cast<int>(i)) == static_cast<int>(i)) ++count;
    return count;
}

double EdgeGraph::total_edge_arclength() const {
    double sum = 0.0;
    for (const auto& e : edges_) sum += e.polyline.arclength();
    return sum;
}

std::string EdgeGraph::dump_text() const {
    std::ostringstream out;
    out << "vertices " << vertices_.size() << "\n";
    for (const auto& v : vertices_)
        out << "  v" << v.id << " (" << v.pos.x << ", " << v.pos.y << ") valence "
            << v.incident.size() << "\n";
    out << "edges " << edges_.size() << "\n";
    for (const auto& e : edges_) {
        const SourceRef& src = curves_[e.curve].source;
        const char* kind = src.kind == SourceRef::Kind::mesh ? "mesh"
                           : src.kind == SourceRef::Kind::diffusion ? "diffusion"
                                                                    : "border";
        out << "  e" << e.id << " v" << e.v0 << "-v" << e.v1 << " curve " << e.curve << " ["
            << e.ta << ", " << e.tb << "] source " << kind << ":" << src.index << "\n";
    }
    return out.str();
}

}  // namespace vgr
