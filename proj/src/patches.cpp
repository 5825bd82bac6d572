#include "vgr/patches.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vgr {

using std::numbers::pi;

// ---------------------------------------------------------------- borders

std::vector<InputBoundaryCurve> domain_border_curves(const Rect& domain) {
    // Clockwise in y-up coordinates, so the right side faces the interior.
    Vec2 c0 = domain.lo;
    Vec2 c1{domain.lo.x, domain.hi.y};
    Vec2 c2 = domain.hi;
    Vec2 c3{domain.hi.x, domain.lo.y};
    std::vector<InputBoundaryCurve> out;
    Vec2 ring[5] = {c0, c1, c2, c3, c0};
    for (int i = 0; i < 4; ++i) {
        InputBoundaryCurve c;
        Vec2 a = ring[i], b = ring[i + 1];
        c.spline = BezierSpline::from_control_points(
            {a, a + (b - a) / 3.0, a + (b - a) * (2.0 / 3.0), b});
        c.left = BoundaryCondition::neumann();
        c.right = BoundaryCondition::neumann();
        c.source = {SourceRef::Kind::border, i, -1};
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------- tracing

namespace {

struct Directed {
    int edge = -1;
    int dir = 0;  // 0 = forward (v0 -> v1), 1 = backward
    bool operator==(const Directed&) const = default;
};

int head_end(int dir) { return dir == 0 ? 1 : 0; }

// Departure choice at a vertex: first candidate counterclockwise from the
// reversed arrival tangent, which keeps the traced face on the right of the
// walk. Exactly aligned tangents are ordered by signed curvature
// (right-bending candidates wrap to the end of the sweep), then edge id;
// retracing the arrival edge is the last resort.
Directed next_directed(const EdgeGraph& g, Directed arrival) {
    const GraphEdge& e = g.edges()[arrival.edge];
    int h_end = head_end(arrival.dir);
    int vertex = h_end == 1 ? e.v1 : e.v0;
    Vec2 back = g.outgoing_tangent(e, h_end);  // points back along the arrival edge

    struct Cand {
        double theta;
        double kappa;
        int edge;
        int end;
    };
    std::vector<Cand> cands;
    for (auto [eid, end] : g.vertices()[vertex].incident) {
        const GraphEdge& e2 = g.edges()[eid];
        Vec2 t = g.outgoing_tangent(e2, end);
        double tn = t.norm();
        if (tn < 1e-300) continue;
        Vec2 a = g.outgoing_second_derivative(e2, end);
        double kappa = cross(t, a) / (tn * tn * tn);
        double theta;
        if (eid == arrival.edge && end == h_end) {
            theta = 2 * pi;  // go back where we came from
        } else {
            theta = std::atan2(cross(back, t), dot(back, t));
            if (theta < 0) theta += 2 * pi;
            if (theta > 2 * pi - 1e-9) theta -= 2 * pi;
            // Tangent to the reversed arrival direction: a right-bending
            // candidate leaves the sweep range and comes around last.
            if (theta < 1e-9 && kappa < -1e-12) theta = 2 * pi - 1e-12;
        }
        cands.push_back({theta, kappa, eid, end});
    }
    if (cands.empty())
        throw TraversalError("vertex " + std::to_string(vertex) + " has no departure");
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.theta != b.theta) return a.theta < b.theta;
        if (a.kappa != b.kappa) return a.kappa < b.kappa;
        if (a.edge != b.edge) return a.edge < b.edge;
        return a.end < b.end;
    });
    const Cand& pick = cands.front();
    return {pick.edge, pick.end == 0 ? 0 : 1};
}

void append_edge_points(std::vector<Vec2>& pts, const GraphEdge& e, bool forward) {
    const auto& v = e.polyline.vertices;
    if (forward) {
        for (size_t i = 0; i + 1 < v.size(); ++i) pts.push_back(v[i]);
    } else {
        for (size_t i = v.size(); i > 1; --i) pts.push_back(v[i - 1]);
    }
}

}  // namespace

int turning_number(const std::vector<Vec2>& closed_points) {
    // Drop consecutive duplicates (cyclically) before measuring angles.
    std::vector<Vec2> pts;
    for (const Vec2& p : closed_points)
        if (pts.empty() || dist(pts.back(), p) > kCoincidenceTol) pts.push_back(p);
    while (pts.size() > 1 && dist(pts.front(), pts.back()) <= kCoincidenceTol) pts.pop_back();
    if (pts.size() < 2) return 0;

    double total = 0.0;
    size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 d0 = pts[(i + 1) % n] - pts[i];
        Vec2 d1 = pts[(i + 2) % n] - pts[(i + 1) % n];
        double c = cross(d0, d1);
        if (c == 0.0) c = 0.0;  // clear -0.0 so exact reversals always count +pi
        total += std::atan2(c, dot(d0, d1));
    }
    return static_cast<int>(std::lround(total / (2 * pi)));
}

std::vector<BoundaryLoop> trace_loops(const EdgeGraph& graph) {
    const auto& edges = graph.edges();
    std::vector<std::array<bool, 2>> visited(edges.size(), {false, false});
    std::vector<BoundaryLoop> loops;

    for (size_t start_edge = 0; start_edge < edges.size(); ++start_edge) {
        for (int start_dir = 0; start_dir < 2; ++start_dir) {
            if (visited[start_edge][start_dir]) continue;
            Directed start{static_cast<int>(start_edge), start_dir};
            BoundaryLoop loop;
            Directed cur = start;
            size_t guard = 0;
            do {
                if (++guard > 2 * edges.size() + 8)
                    throw TraversalError("loop tracing did not close (start edge " +
                                         std::to_string(start_edge) + ")");
                if (visited[cur.edge][cur.dir] && !(cur == start))
                    throw TraversalError("inconsistent rotation order at edge " +
                                         std::to_string(cur.edge));
                visited[cur.edge][cur.dir] = true;

                const GraphEdge& e = edges[cur.edge];
                const InputBoundaryCurve& src = graph.curves()[e.curve];
                PatchBoundaryCurve pbc;
                pbc.edge = cur.edge;
                pbc.forward = cur.dir == 0;
                pbc.condition = pbc.forward ? src.right : src.left;
                pbc.source = src.source;
                loop.curves.push_back(std::move(pbc));
                append_edge_points(loop.points, e, cur.dir == 0);

                cur = next_directed(graph, cur);
            } while (!(cur == start));

            loop.turning = turning_number(loop.points);
            for (const Vec2& p : loop.points) loop.bounds.extend(p);
            double area = 0.0;
            size_t n = loop.points.size();
            for (size_t i = 0; i < n; ++i)
                area += cross(loop.points[i], loop.points[(i + 1) % n]);
            loop.signed_area = 0.5 * area;
            loops.push_back(std::move(loop));
        }
    }
    return loops;
}

// ---------------------------------------------------------------- patches

double Patch::winding_sum(Vec2 p, bool* on_boundary) const {
    if (on_boundary) *on_boundary = false;
    double total = 0.0;
    auto add = [&](const BoundaryLoop& loop) {
        // A closed loop winds 0 around everything outside its bounding box.
        if (!loop.bounds.expanded(kCoincidenceTol).contains(p)) return;
        auto w = winding_angle(loop.points, p);
        if (!w) {
            if (on_boundary) *on_boundary = true;
            return;
        }
        total += *w;
    };
    add(outer);
    for (const auto& l : contained) {
        if (on_boundary && *on_boundary) return total;
        add(l);
    }
    return total;
}

bool Patch::contains(Vec2 p, bool* on_boundary) const {
    bool ob = false;
    double w = winding_sum(p, &ob);
    if (on_boundary) *on_boundary = ob;
    return !ob && std::abs(w) > pi;
}

namespace {

// Winding of a bare loop with boundary detection.
bool loop_contains(const BoundaryLoop& loop, Vec2 p, bool* on_boundary) {
    *on_boundary = false;
    if (!loop.bounds.expanded(kCoincidenceTol).contains(p)) return false;
    auto w = winding_angle(loop.points, p);
    if (!w) {
        *on_boundary = true;
        return false;
    }
    return std::abs(*w) > pi;
}

// Interior sample: golden-ratio scanlines across the bounding box, midpoints
// between consecutive crossings, accepted when the patch winding test says
// strictly inside.
bool find_interior_point(Patch& patch) {
    const Aabb& box = patch.outer.bounds;
    double height = box.hi.y - box.lo.y;
    if (height <= 0) return false;
    const double golden = 0.6180339887498949;
    for (int k = 1; k <= 64; ++k) {
        double y = box.lo.y + std::fmod(k * golden, 1.0) * height;
        std::vector<double> xs;
        auto collect = [&](const BoundaryLoop& loop) {
            size_t n = loop.points.size();
            for (size_t i = 0; i < n; ++i) {
                Vec2 a = loop.points[i], b = loop.points[(i + 1) % n];
                if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y))
                    xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
            }
        };
        collect(patch.outer);
        for (const auto& l : patch.contained) collect(l);
        std::sort(xs.begin(), xs.end());
        for (size_t i = 0; i + 1 < xs.size(); ++i) {
            if (xs[i + 1] - xs[i] < 4 * kCoincidenceTol) continue;
            Vec2 cand{0.5 * (xs[i] + xs[i + 1]), y};
            bool ob = false;
            if (patch.contains(cand, &ob) && !ob) {
                patch.probe = cand;
                patch.has_probe = true;
                return true;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<Patch> assemble_patches(const std::vector<BoundaryLoop>& loops,
                                    const EdgeGraph& graph) {
    (void)graph;
    std::vector<Patch> patches;
    for (const auto& loop : loops) {
        if (loop.turning < 0) {
            Patch p;
            p.id = static_cast<int>(patches.size());
            p.outer = loop;
            patches.push_back(std::move(p));
        }
    }

    // Attach nonnegative loops to the smallest enclosing patch.
    for (const auto& loop : loops) {
        if (loop.turning < 0) continue;
        struct Candidate {
            int patch;
            double area;
        };
        std::vector<Candidate> cands;
        for (auto& p : patches) {
            if (!p.outer.bounds.expanded(kCoincidenceTol).overlaps(loop.bounds)) continue;
            int inside = 0, outside = 0;
            size_t n = loop.points.size();
            size_t stride = std::max<size_t>(1, n / 16);
            for (size_t i = 0; i < n; i += stride) {
                bool ob = false;
                if (loop_contains(p.outer, loop.points[i], &ob)) ++inside;
                else if (!ob) ++outside;
            }
            if (inside > 0 && outside > 0)
                throw ContainmentError("loop crosses patch " + std::to_string(p.id) +
                                       " boundary; tolerance failure");
            if (inside > 0) cands.push_back({p.id, std::abs(p.outer.signed_area)});
        }
        if (cands.empty()) continue;  // unbounded exterior
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
            return a.area != b.area ? a.area < b.area : a.patch < b.patch;
        });
        // The chosen patch must nest inside every other candidate.
        for (size_t i = 1; i < cands.size(); ++i) {
            bool ob = false;
            Vec2 probe = patches[cands[0].patch].outer.points.front();
            if (!loop_contains(patches[cands[i].patch].outer, probe, &ob) && !ob)
                throw ContainmentError("loop contained in two non-nested patches");
        }
        patches[cands[0].patch].contained.push_back(loop);
    }

    for (auto& p : patches) find_interior_point(p);
    return patches;
}

void assign_mesh_weights(std::vector<Patch>& patches, const std::vector<Polyline>& mesh_rings,
                         OverlapMode mode) {
    for (auto& patch : patches) {
        std::vector<int> included;
        for (size_t m = 0; m < mesh_rings.size(); ++m) {
            bool inside = false;
            if (patch.has_probe) {
                auto w = winding_angle(std::vector<const Polyline*>{&mesh_rings[m]}, patch.probe);
                inside = w && std::abs(*w) > pi;
            }
            if (!inside) {
                // A patch bounded by this mesh's ring from the inside
                // (forward side) overlaps the mesh even if the probe test
                // missed it.
                auto faces_mesh = [&](const BoundaryLoop& loop) {
                    for (const auto& c : loop.curves)
                        if (c.source.kind == SourceRef::Kind::mesh &&
                            c.source.index == static_cast<int>(m) && c.forward)
                            return true;
                    return false;
                };
                inside = faces_mesh(patch.outer);
                for (const auto& l : patch.contained) inside = inside || faces_mesh(l);
            }
            if (inside) included.push_back(static_cast<int>(m));
        }

        patch.mesh_weights.clear();
        if (included.empty()) continue;
        double n = static_cast<double>(included.size());
        int topmost = *std::max_element(included.begin(), included.end());
        for (int m : included) {
            double lambda = 0.0;
            switch (mode) {
                case OverlapMode::zero: lambda = 0.0; break;
                case OverlapMode::sum: lambda = 1.0; break;
                case OverlapMode::average: lambda = 1.0 / n; break;
                case OverlapMode::first: lambda = m == topmost ? 1.0 : 0.0; break;
            }
            patch.mesh_weights.push_back({m, lambda});
        }
    }
}

std::string dump_patches_text(const std::vector<Patch>& patches) {
    std::ostringstream out;
    out << "patches " << patches.size() << "\n";
    auto loop_line = [&](const BoundaryLoop& loop, const char* label) {
        out << "  " << label << " turning " << loop.turning << " edges";
        for (const auto& c : loop.curves)
            out << " " << (c.forward ? "+" : "-") << "e" << c.edge
                << (c.condition.is_dirichlet() ? "(D)" : "(N)");
        out << "\n";
    };
    for (const auto& p : patches) {
        out << "patch " << p.id;
        if (p.has_probe) out << " probe (" << p.probe.x << ", " << p.probe.y << ")";
        out << "\n";
        loop_line(p.outer, "outer");
        for (const auto& l : p.contained) loop_line(l, "contained");
        if (!p.mesh_weights.empty()) {
            out << "  mesh weights";
            for (auto [m, w] : p.mesh_weights) out << " " << m << ":" << w;
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace vgr
