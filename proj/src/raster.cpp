#include "vgr/raster.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>

#include "vgr/parallel.hpp"

namespace vgr {

using std::numbers::pi;

// ---------------------------------------------------------------- grids

ImageGrid make_image_grid(const Rect& domain, int width, int height) {
    if (width < 1 || height < 1) throw PipelineError("resolution must be positive");
    double hx = domain.width() / width;
    double hy = domain.height() / height;
    if (std::abs(hx - hy) > 1e-6 * hx)
        throw PipelineError("resolution aspect must match the domain aspect (square pixels)");
    return {width, height, hx, domain.lo};
}

bool RasterGrids::closed_between(int i, int j, int ni, int nj) const {
    if (ni == i + 1) return closed_h[static_cast<size_t>(j) * (width - 1) + i] != 0;
    if (ni == i - 1) return closed_h[static_cast<size_t>(j) * (width - 1) + ni] != 0;
    if (nj == j + 1) return closed_v[static_cast<size_t>(j) * width + i] != 0;
    return closed_v[static_cast<size_t>(nj) * width + i] != 0;
}

size_t RasterGrids::in_patch_count() const {
    size_t n = 0;
    for (PixelType t : type)
        if (t != PixelType::outside) ++n;
    return n;
}

RasterGrids make_grids(const ImageGrid& grid, const Patch& patch) {
    RasterGrids g;
    g.h = grid.h;
    Aabb box = patch.outer.bounds.expanded(2.5 * grid.h);
    int x0 = std::clamp(static_cast<int>(std::floor((box.lo.x - grid.origin.x) / grid.h)), 0,
                        grid.width);
    int y0 = std::clamp(static_cast<int>(std::floor((box.lo.y - grid.origin.y) / grid.h)), 0,
                        grid.height);
    int x1 = std::clamp(static_cast<int>(std::ceil((box.hi.x - grid.origin.x) / grid.h)) + 1, 0,
                        grid.width);
    int y1 = std::clamp(static_cast<int>(std::ceil((box.hi.y - grid.origin.y) / grid.h)) + 1, 0,
                        grid.height);
    g.x0 = x0;
    g.y0 = y0;
    g.width = std::max(0, x1 - x0);
    g.height = std::max(0, y1 - y0);
    g.origin = grid.origin + Vec2{x0 * grid.h, y0 * grid.h};
    size_t n = static_cast<size_t>(g.width) * g.height;
    g.type.assign(n, PixelType::outside);
    g.closed_h.assign(g.width > 0 ? static_cast<size_t>(g.width - 1) * g.height : 0, 0);
    g.closed_v.assign(g.height > 0 ? static_cast<size_t>(g.width) * (g.height - 1) : 0, 0);
    g.source.assign(n, {});
    g.dirichlet.assign(n, {});
    g.color.assign(n, {});
    return g;
}

// ---------------------------------------------------------------- boundary

PatchBoundary::PatchBoundary(const Patch& patch, const EdgeGraph& graph) {
    std::vector<SegmentBvh::Segment> segs;
    auto add_loop = [&](const BoundaryLoop& loop) {
        for (const auto& side : loop.curves) {
            int side_index = static_cast<int>(sides_.size());
            sides_.push_back(&side);
            const GraphEdge& e = graph.edges()[side.edge];
            side_t_max_.push_back(graph.edge_spline(e).t_max());
            const auto& v = e.polyline.vertices;
            const auto& t = e.polyline.params;
            for (size_t i = 0; i + 1 < v.size(); ++i) {
                SegmentBvh::Segment s;
                s.a = v[i];
                s.b = v[i + 1];
                s.ta = t[i];
                s.tb = t[i + 1];
                s.curve = side.edge;  // ties: lower edge id first
                segs.push_back(s);
                segment_side_.push_back(side_index);
            }
        }
    };
    add_loop(patch.outer);
    for (const auto& l : patch.contained) add_loop(l);
    bvh_.build(std::move(segs));
}

PatchBoundary::Sample PatchBoundary::closest(Vec2 p) const {
    SegmentBvh::Closest c = bvh_.closest(p);
    Sample s;
    if (c.segment < 0) return s;
    int side = segment_side_[c.segment];
    s.side = sides_[side];
    s.param = c.param;
    s.t_max = side_t_max_[side];
    s.distance = c.distance;
    return s;
}

// ---------------------------------------------------------------- masks

namespace {

// Winding test with the half-pixel perturbation fallback for centers that
// land exactly on a boundary polyline.
bool contains_perturbed(const Patch& patch, Vec2 p, double h) {
    bool ob = false;
    bool in = patch.contains(p, &ob);
    if (!ob) return in;
    for (Vec2 off : {Vec2{0.3 * h, 0.4 * h}, Vec2{-0.3 * h, -0.4 * h}, Vec2{0.4 * h, -0.3 * h}}) {
        in = patch.contains(p + off, &ob);
        if (!ob) return in;
    }
    return false;
}

}  // namespace

void rasterize_masks(const Patch& patch, const EdgeGraph& graph,
                     const std::vector<MeshEval>& meshes, RasterGrids& grids) {
    int w = grids.width, h = grids.height;
    if (w == 0 || h == 0) return;
    PatchBoundary boundary(patch, graph);

    std::vector<uint8_t> inside(static_cast<size_t>(w) * h, 0);
    parallel_for(0, h, [&](int j) {
        for (int i = 0; i < w; ++i)
            inside[grids.idx(i, j)] = contains_perturbed(patch, grids.center(i, j), grids.h);
    });

    // Staggered flags: closed when the center-to-center segment crosses a
    // boundary polyline.
    parallel_for(0, h, [&](int j) {
        for (int i = 0; i + 1 < w; ++i) {
            if (!inside[grids.idx(i, j)] && !inside[grids.idx(i + 1, j)]) continue;
            if (boundary.crosses(grids.center(i, j), grids.center(i + 1, j)))
                grids.closed_h[static_cast<size_t>(j) * (w - 1) + i] = 1;
        }
    });
    parallel_for(0, h - 1, [&](int j) {
        for (int i = 0; i < w; ++i) {
            if (!inside[grids.idx(i, j)] && !inside[grids.idx(i, j + 1)]) continue;
            if (boundary.crosses(grids.center(i, j), grids.center(i, j + 1)))
                grids.closed_v[static_cast<size_t>(j) * w + i] = 1;
        }
    });

    parallel_for(0, h, [&](int j) {
        for (int i = 0; i < w; ++i) {
            size_t id = grids.idx(i, j);
            if (!inside[id]) {
                grids.type[id] = PixelType::outside;
                continue;
            }
            bool is_boundary = false;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4 && !is_boundary; ++d) {
                int ni = i + di[d], nj = j + dj[d];
                if (!grids.in_crop(ni, nj) || !inside[grids.idx(ni, nj)] ||
                    grids.closed_between(i, j, ni, nj))
                    is_boundary = true;
            }
            if (!is_boundary) {
                grids.type[id] = PixelType::interior;
                continue;
            }
            PatchBoundary::Sample s = boundary.closest(grids.center(i, j));
            if (!s.side || !s.side->condition.is_dirichlet()) {
                grids.type[id] = PixelType::neumann;
                continue;
            }
            grids.type[id] = PixelType::dirichlet;
            std::optional<ColorRGB> c;
            if (s.side->source.kind == SourceRef::Kind::mesh &&
                s.side->source.index >= 0 &&
                s.side->source.index < static_cast<int>(meshes.size()))
                c = meshes[s.side->source.index].color_at(grids.center(i, j));
            if (!c) c = s.side->condition.color.eval(s.param, s.t_max);
            grids.dirichlet[id] = *c;
            grids.color[id] = *c;
        }
    });
}

// ---------------------------------------------------------------- sources

Image rasterize_poisson_sources(const Scene& scene, const ImageGrid& grid) {
    Image tex(grid.width, grid.height);
    if (scene.poisson_curves.empty()) return tex;
    double epsilon = scene.epsilon_or_default();

    for (const PoissonCurve& pc : scene.poisson_curves) {
        Polyline poly = discretize(pc.spline, std::min(epsilon, 0.25 * grid.h));
        double t_total = poly.params.back();
        std::vector<SegmentBvh::Segment> segs;
        for (size_t i = 0; i + 1 < poly.vertices.size(); ++i)
            segs.push_back({poly.vertices[i], poly.vertices[i + 1], 0, poly.params[i],
                            poly.params[i + 1]});
        SegmentBvh bvh;
        bvh.build(std::move(segs));

        double band = pc.band_width * grid.h;
        Aabb box = poly.bounds().expanded(band + grid.h);
        int i0 = std::clamp(static_cast<int>((box.lo.x - grid.origin.x) / grid.h), 0, grid.width);
        int i1 = std::clamp(static_cast<int>((box.hi.x - grid.origin.x) / grid.h) + 1, 0,
                            grid.width);
        int j0 = std::clamp(static_cast<int>((box.lo.y - grid.origin.y) / grid.h), 0, grid.height);
        int j1 = std::clamp(static_cast<int>((box.hi.y - grid.origin.y) / grid.h) + 1, 0,
                            grid.height);
        int bw = i1 - i0, bh = j1 - j0;
        if (bw <= 0 || bh <= 0) continue;

        // side: 0 = not in band, 1 = left of the curve, 2 = right
        std::vector<uint8_t> side(static_cast<size_t>(bw) * bh, 0);
        std::vector<float> param(static_cast<size_t>(bw) * bh, 0.f);
        parallel_for(j0, j1, [&](int j) {
            for (int i = i0; i < i1; ++i) {
                Vec2 p = grid.center(i, j);
                SegmentBvh::Closest c = bvh.closest(p);
                if (c.segment < 0 || c.distance > band) continue;
                const auto& s = bvh.segments()[c.segment];
                double sgn = cross(s.b - s.a, p - c.point);
                size_t o = static_cast<size_t>(j - j0) * bw + (i - i0);
                side[o] = sgn > 0 ? 1 : 2;
                param[o] = static_cast<float>(c.param / t_total);
            }
        });

        parallel_for(j0, j1, [&](int j) {
            for (int i = i0; i < i1; ++i) {
                size_t o = static_cast<size_t>(j - j0) * bw + (i - i0);
                if (side[o] == 0) continue;
                int opposite = 0;
                const int di[4] = {1, -1, 0, 0};
                const int dj[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    int ni = i + di[d], nj = j + dj[d];
                    if (ni < i0 || ni >= i1 || nj < j0 || nj >= j1) continue;
                    uint8_t ns = side[static_cast<size_t>(nj - j0) * bw + (ni - i0)];
                    if (ns != 0 && ns != side[o]) ++opposite;
                }
                if (opposite == 0) continue;
                const LaplacianProfile& prof =
                    side[o] == 1 ? pc.left_profile : pc.right_profile;
                tex.at(i, j) += prof.eval(param[o]) * static_cast<double>(opposite);
            }
        });
    }
    return tex;
}

void rasterize_source(const Patch& patch, const std::vector<MeshEval>& meshes,
                      const Image* poisson_tex, RasterGrids& grids, int* singular_count) {
    int w = grids.width, h = grids.height;
    std::vector<int> singular_rows(h, 0);
    parallel_for(0, h, [&](int j) {
        std::vector<MeshSample> hints(patch.mesh_weights.size());
        for (int i = 0; i < w; ++i) {
            size_t id = grids.idx(i, j);
            if (grids.type[id] != PixelType::interior && grids.type[id] != PixelType::neumann)
                continue;
            ColorRGB f;
            if (poisson_tex) f += poisson_tex->at(grids.x0 + i, grids.y0 + j);
            for (size_t k = 0; k < patch.mesh_weights.size(); ++k) {
                auto [m, lambda] = patch.mesh_weights[k];
                if (lambda == 0.0) continue;
                auto lap = meshes[m].laplacian_at_hint(grids.center(i, j), hints[k],
                                                       &singular_rows[j]);
                if (lap) f += *lap * lambda;
            }
            grids.source[id] = f;
        }
    });
    if (singular_count)
        for (int s : singular_rows) *singular_count += s;
}

// ---------------------------------------------------------------- solver

namespace {

// Shared relaxation kernel (Eq.-style five-point stencil). omega = 1 is the
// plain Jacobi update; the multigrid smoother under-relaxes.
double relax_sweep(const RasterGrids& g, const std::vector<ColorRGB>& src,
                   std::vector<ColorRGB>& dst, double omega, int* isolated) {
    int w = g.width, h = g.height;
    double h2 = g.h * g.h;
    std::vector<double> change_rows(h, 0.0);
    std::vector<int> isolated_rows(h, 0);
    parallel_for(0, h, [&](int j) {
        double worst = 0.0;
        for (int i = 0; i < w; ++i) {
            size_t id = g.idx(i, j);
            PixelType t = g.type[id];
            if (t == PixelType::outside) {
                dst[id] = src[id];
                continue;
            }
            if (t == PixelType::dirichlet) {
                dst[id] = g.dirichlet[id];
                continue;
            }
            bool neumann = t == PixelType::neumann;
            ColorRGB sum;
            int denom = 0;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ni = i + di[d], nj = j + dj[d];
                if (!g.in_crop(ni, nj)) continue;
                size_t nid = g.idx(ni, nj);
                if (g.type[nid] == PixelType::outside) continue;
                if (neumann && g.closed_between(i, j, ni, nj)) continue;
                sum += src[nid];
                ++denom;
            }
            if (denom == 0) {
                dst[id] = src[id];
                ++isolated_rows[j];
                continue;
            }
            ColorRGB target = (sum - g.source[id] * h2) * (1.0 / denom);
            ColorRGB next = src[id] * (1.0 - omega) + target * omega;
            dst[id] = next;
            worst = std::max(worst, (next - src[id]).max_abs());
        }
        change_rows[j] = worst;
    });
    double worst = 0.0;
    for (double c : change_rows) worst = std::max(worst, c);
    if (isolated) {
        for (int c : isolated_rows) *isolated += c;
    }
    return worst;
}

struct Level {
    RasterGrids g;
    std::vector<ColorRGB> scratch;
};

// Mask coarsening: dirichlet dominates, then neumann, then interior; closed
// flags propagate to the coarse interfaces they straddle.
RasterGrids coarsen(const RasterGrids& f) {
    RasterGrids c;
    c.width = (f.width + 1) / 2;
    c.height = (f.height + 1) / 2;
    c.h = f.h * 2;
    c.origin = f.origin;
    c.x0 = c.y0 = 0;
    size_t n = static_cast<size_t>(c.width) * c.height;
    c.type.assign(n, PixelType::outside);
    c.closed_h.assign(static_cast<size_t>(std::max(0, c.width - 1)) * c.height, 0);
    c.closed_v.assign(static_cast<size_t>(c.width) * std::max(0, c.height - 1), 0);
    c.source.assign(n, {});
    c.dirichlet.assign(n, {});
    c.color.assign(n, {});

    for (int J = 0; J < c.height; ++J)
        for (int I = 0; I < c.width; ++I) {
            int nd = 0, nn = 0, ni = 0;
            ColorRGB dsum;
            ColorRGB fsum;
            int fcount = 0;
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    int i = 2 * I + di, j = 2 * J + dj;
                    if (!f.in_crop(i, j)) continue;
                    PixelType t = f.type[f.idx(i, j)];
                    if (t == PixelType::dirichlet) {
                        ++nd;
                        dsum += f.dirichlet[f.idx(i, j)];
                    } else if (t == PixelType::neumann) {
                        ++nn;
                    } else if (t == PixelType::interior) {
                        ++ni;
                    }
                    if (t == PixelType::interior || t == PixelType::neumann) {
                        fsum += f.source[f.idx(i, j)];
                        ++fcount;
                    }
                }
            size_t id = c.idx(I, J);
            if (nd > 0) {
                c.type[id] = PixelType::dirichlet;
                c.dirichlet[id] = dsum * (1.0 / nd);
                c.color[id] = c.dirichlet[id];
            } else if (nn > 0) {
                c.type[id] = PixelType::neumann;
            } else if (ni > 0) {
                c.type[id] = PixelType::interior;
            }
            if (fcount > 0) c.source[id] = fsum * (1.0 / fcount);
        }

    for (int J = 0; J < c.height; ++J)
        for (int I = 0; I + 1 < c.width; ++I) {
            bool closed = false;
            int i = 2 * I + 1;  // fine interface between columns 2I+1 and 2I+2
            for (int dj = 0; dj < 2; ++dj) {
                int j = 2 * J + dj;
                if (j < f.height && i < f.width - 1 &&
                    f.closed_h[static_cast<size_t>(j) * (f.width - 1) + i])
                    closed = true;
            }
            if (closed) c.closed_h[static_cast<size_t>(J) * (c.width - 1) + I] = 1;
        }
    for (int J = 0; J + 1 < c.height; ++J)
        for (int I = 0; I < c.width; ++I) {
            bool closed = false;
            int j = 2 * J + 1;
            for (int di = 0; di < 2; ++di) {
                int i = 2 * I + di;
                if (i < f.width && j < f.height - 1 &&
                    f.closed_v[static_cast<size_t>(j) * f.width + i])
                    closed = true;
            }
            if (closed) c.closed_v[static_cast<size_t>(J) * c.width + I] = 1;
        }
    return c;
}

// Residual of the discrete problem on relaxed pixels (zero elsewhere).
void residual(const RasterGrids& g, std::vector<ColorRGB>& r) {
    int w = g.width, h = g.height;
    double inv_h2 = 1.0 / (g.h * g.h);
    parallel_for(0, h, [&](int j) {
        for (int i = 0; i < w; ++i) {
            size_t id = g.idx(i, j);
            PixelType t = g.type[id];
            if (t != PixelType::interior && t != PixelType::neumann) {
                r[id] = {};
                continue;
            }
            bool neumann = t == PixelType::neumann;
            ColorRGB sum;
            int denom = 0;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                int ni = i + di[d], nj = j + dj[d];
                if (!g.in_crop(ni, nj)) continue;
                size_t nid = g.idx(ni, nj);
                if (g.type[nid] == PixelType::outside) continue;
                if (neumann && g.closed_between(i, j, ni, nj)) continue;
                sum += g.color[nid];
                ++denom;
            }
            r[id] = g.source[id] - (sum - g.color[id] * denom) * inv_h2;
        }
    });
}

void restrict_to(const RasterGrids& f, const std::vector<ColorRGB>& fine_r, RasterGrids& c) {
    for (int J = 0; J < c.height; ++J)
        for (int I = 0; I < c.width; ++I) {
            ColorRGB sum;
            int count = 0;
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    int i = 2 * I + di, j = 2 * J + dj;
                    if (!f.in_crop(i, j)) continue;
                    PixelType t = f.type[f.idx(i, j)];
                    if (t != PixelType::interior && t != PixelType::neumann) continue;
                    sum += fine_r[f.idx(i, j)];
                    ++count;
                }
            c.source[c.idx(I, J)] = count > 0 ? sum * (1.0 / count) : ColorRGB{};
        }
}

// Bilinear prolongation that ignores coarse cells that are outside or cut
// off from the base cell by a closed coarse interface; falls back to the
// base cell when nothing usable remains.
void prolong_correct(const RasterGrids& c, const RasterGrids& f, std::vector<ColorRGB>& fine,
                     double sign) {
    auto usable = [&](int I, int J) {
        return I >= 0 && I < c.width && J >= 0 && J < c.height &&
               c.type[c.idx(I, J)] != PixelType::outside;
    };
    // Open interface between two adjacent coarse cells.
    auto open_adj = [&](int I0, int J0, int I1, int J1) {
        if (!usable(I0, J0) || !usable(I1, J1)) return false;
        return !c.closed_between(I0, J0, I1, J1);
    };
    parallel_for(0, f.height, [&](int j) {
        for (int i = 0; i < f.width; ++i) {
            size_t id = f.idx(i, j);
            PixelType t = f.type[id];
            if (t != PixelType::interior && t != PixelType::neumann) continue;
            double qx = (i + 0.5) / 2.0 - 0.5;
            double qy = (j + 0.5) / 2.0 - 0.5;
            int I0 = static_cast<int>(std::floor(qx));
            int J0 = static_cast<int>(std::floor(qy));
            double fx = qx - I0, fy = qy - J0;
            int Ib = std::clamp(fx < 0.5 ? I0 : I0 + 1, 0, c.width - 1);
            int Jb = std::clamp(fy < 0.5 ? J0 : J0 + 1, 0, c.height - 1);

            ColorRGB acc;
            double wsum = 0.0;
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    int I = I0 + di, J = J0 + dj;
                    if (!usable(I, J)) continue;
                    bool reachable;
                    if (I == Ib && J == Jb) {
                        reachable = true;
                    } else if (I == Ib || J == Jb) {
                        reachable = open_adj(Ib, Jb, I, J);
                    } else {
                        reachable = (open_adj(Ib, Jb, I, Jb) && open_adj(I, Jb, I, J)) ||
                                    (open_adj(Ib, Jb, Ib, J) && open_adj(Ib, J, I, J));
                    }
                    if (!reachable) continue;
                    double wgt = (di == 0 ? 1 - fx : fx) * (dj == 0 ? 1 - fy : fy);
                    if (wgt <= 0) continue;
                    acc += c.color[c.idx(I, J)] * wgt;
                    wsum += wgt;
                }
            if (wsum <= 0) {
                if (!usable(Ib, Jb)) continue;
                acc = c.color[c.idx(Ib, Jb)];
                wsum = 1.0;
            }
            fine[id] += acc * (sign / wsum);
        }
    });
}

}  // namespace

double jacobi_step(const RasterGrids& grids, const std::vector<ColorRGB>& src,
                   std::vector<ColorRGB>& dst, int* isolated) {
    return relax_sweep(grids, src, dst, 1.0, isolated);
}

SolveStats solve(RasterGrids& grids, const SolverConfig& config) {
    SolveStats stats;
    if (grids.in_patch_count() == 0) {
        stats.converged = true;
        return stats;
    }

    // Level pyramid; level 0 aliases the caller's grids.
    std::vector<Level> levels;
    levels.push_back({});
    int max_levels = std::max(1, config.multigrid_levels);
    {
        const RasterGrids* cur = &grids;
        while (static_cast<int>(levels.size()) < max_levels &&
               std::min(cur->width, cur->height) >= 8) {
            Level l;
            l.g = coarsen(*cur);
            levels.push_back(std::move(l));
            cur = &levels.back().g;
        }
    }
    for (auto& l : levels) l.scratch.resize(l.g.color.size());
    levels[0].scratch.resize(grids.color.size());

    const double omega = 0.8;
    const int nu = 12;
    double budget = config.iterations;
    double spent = 0.0;
    double threshold = config.residual_target * grids.h * grids.h / 4.0;

    auto level_grids = [&](size_t l) -> RasterGrids& { return l == 0 ? grids : levels[l].g; };
    auto level_cost = [&](size_t l) {
        double c = 1.0;
        for (size_t k = 0; k < l; ++k) c /= 4.0;
        return c;
    };

    auto smooth = [&](size_t l, int sweeps) {
        RasterGrids& g = level_grids(l);
        for (int s = 0; s < sweeps; ++s) {
            relax_sweep(g, g.color, levels[l].scratch, omega, &stats.isolated);
            std::swap(g.color, levels[l].scratch);
            spent += level_cost(l);
        }
    };

    std::function<void(size_t)> vcycle = [&](size_t l) {
        RasterGrids& g = level_grids(l);
        if (l + 1 == levels.size()) {
            smooth(l, l == 0 ? 4 * nu : 200);
            return;
        }
        smooth(l, nu);
        std::vector<ColorRGB> r(g.color.size());
        residual(g, r);
        RasterGrids& cg = levels[l + 1].g;
        restrict_to(g, r, cg);
        std::fill(cg.color.begin(), cg.color.end(), ColorRGB{});
        std::fill(cg.dirichlet.begin(), cg.dirichlet.end(), ColorRGB{});
        vcycle(l + 1);
        prolong_correct(cg, g, g.color, 1.0);
        smooth(l, nu);
    };

    // Start from the Dirichlet data (already in grids.color).
    while (spent < budget) {
        vcycle(0);
        stats.residual = jacobi_step(grids, grids.color, levels[0].scratch, nullptr);
        spent += 1.0;
        if (stats.residual <= threshold) {
            stats.converged = true;
            break;
        }
    }
    stats.iterations = spent;
    return stats;
}

void composite_patch(const RasterGrids& grids, Image& image, std::vector<uint8_t>& claim) {
    for (int j = 0; j < grids.height; ++j)
        for (int i = 0; i < grids.width; ++i) {
            if (grids.type[grids.idx(i, j)] == PixelType::outside) continue;
            int gi = grids.x0 + i, gj = grids.y0 + j;
            image.at(gi, gj) = grids.color[grids.idx(i, j)];
            size_t o = static_cast<size_t>(gj) * image.width + gi;
            if (claim[o] < 255) ++claim[o];
        }
}

}  // namespace vgr
