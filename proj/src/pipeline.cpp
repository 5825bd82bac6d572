#include "vgr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace vgr {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

Polyline concat_ring(const std::vector<InputBoundaryCurve>& ring, double epsilon) {
    Polyline out;
    double shift = 0.0;
    for (const auto& c : ring) {
        Polyline p = discretize(c.spline, epsilon);
        for (size_t i = 0; i < p.vertices.size(); ++i) {
            if (!out.vertices.empty() && i == 0) continue;  // shared joint
            out.vertices.push_back(p.vertices[i]);
            out.params.push_back(p.params[i] + shift);
        }
        if (out.vertices.empty()) {
            out = p;
        }
        shift += c.spline.t_max();
    }
    return out;
}

// ------------------------------------------------------------- debug images

const ColorRGB kPatchColors[] = {
    {0.894, 0.102, 0.110}, {0.216, 0.494, 0.722}, {0.302, 0.686, 0.290},
    {0.596, 0.306, 0.639}, {1.000, 0.498, 0.000}, {1.000, 1.000, 0.200},
    {0.651, 0.337, 0.157}, {0.969, 0.506, 0.749}, {0.600, 0.600, 0.600},
    {0.122, 0.471, 0.706}, {0.682, 0.780, 0.910}, {0.200, 0.627, 0.173},
    {0.698, 0.875, 0.541}, {0.984, 0.604, 0.600}, {0.890, 0.102, 0.110},
    {0.992, 0.749, 0.435}, {0.871, 0.796, 0.894}, {0.553, 0.827, 0.780},
    {1.000, 0.929, 0.435}, {0.745, 0.729, 0.855},
};

void draw_polyline(Image& img, const ImageGrid& grid, const Polyline& poly, ColorRGB color) {
    for (size_t s = 0; s + 1 < poly.vertices.size(); ++s) {
        Vec2 a = poly.vertices[s], b = poly.vertices[s + 1];
        int steps = std::max(1, static_cast<int>(dist(a, b) / grid.h * 3));
        for (int k = 0; k <= steps; ++k) {
            Vec2 p = a + (b - a) * (static_cast<double>(k) / steps);
            int i = static_cast<int>((p.x - grid.origin.x) / grid.h);
            int j = static_cast<int>((p.y - grid.origin.y) / grid.h);
            if (i >= 0 && i < img.width && j >= 0 && j < img.height) img.at(i, j) = color;
        }
    }
}

void draw_dot(Image& img, const ImageGrid& grid, Vec2 p, ColorRGB color) {
    int ci = static_cast<int>((p.x - grid.origin.x) / grid.h);
    int cj = static_cast<int>((p.y - grid.origin.y) / grid.h);
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            int i = ci + di, j = cj + dj;
            if (i >= 0 && i < img.width && j >= 0 && j < img.height) img.at(i, j) = color;
        }
}

void dump_graph_image(const EdgeGraph& graph, const ImageGrid& grid, const std::string& path) {
    Image img(grid.width, grid.height);
    for (auto& p : img.pixels) p = {1, 1, 1};
    for (const auto& e : graph.edges()) draw_polyline(img, grid, e.polyline, {0, 0, 0});
    for (const auto& v : graph.vertices()) draw_dot(img, grid, v.pos, {0.85, 0.1, 0.1});
    write_png(img, path);
}

}  // namespace

// ---------------------------------------------------------------- geometry

SceneGeometry build_geometry(const Scene& scene, double tau, double epsilon, OverlapMode mode) {
    SceneGeometry out{EdgeGraph(tau, epsilon), {}, {}, {}, 0, 0, 0};

    std::vector<InputBoundaryCurve> curves = domain_border_curves(scene.domain);
    std::vector<InputBoundaryCurve> scene_curves = scene_boundary_curves(scene, &out.warnings);
    curves.insert(curves.end(), scene_curves.begin(), scene_curves.end());

    auto t0 = std::chrono::steady_clock::now();
    out.graph = EdgeGraph::build(curves, tau, epsilon);
    out.graph_ms = ms_since(t0);
    for (const auto& w : out.graph.warnings()) out.warnings.push_back(w);

    t0 = std::chrono::steady_clock::now();
    std::vector<BoundaryLoop> loops = trace_loops(out.graph);
    out.trace_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    out.patches = assemble_patches(loops, out.graph);
    for (size_t m = 0; m < scene.meshes.size(); ++m)
        out.mesh_rings.push_back(
            concat_ring(mesh_boundary_curves(scene.meshes[m], static_cast<int>(m)), epsilon));
    assign_mesh_weights(out.patches, out.mesh_rings, mode);
    out.patches_ms = ms_since(t0);
    return out;
}

// ---------------------------------------------------------------- rendering

RenderResult render_scene(const Scene& scene, const RenderOptions& options,
                          const std::string* debug_basename, unsigned debug_flags) {
    RenderResult result;
    double tau = options.tau.value_or(scene.settings.tau);
    double epsilon = options.epsilon.value_or(scene.epsilon_or_default());
    OverlapMode mode = options.overlap.value_or(scene.settings.overlap_mode);
    SolverConfig config;
    config.iterations = options.iterations.value_or(scene.settings.iterations);
    config.multigrid_levels = options.multigrid_levels.value_or(scene.settings.multigrid_levels);
    config.residual_target = options.residual_target.value_or(scene.settings.residual_target);

    SceneGeometry geo = build_geometry(scene, tau, epsilon, mode);
    result.warnings = geo.warnings;
    result.stats.dcs = static_cast<int>(scene.diffusion_curves.size());
    result.stats.pcs = static_cast<int>(scene.poisson_curves.size());
    result.stats.gms = static_cast<int>(scene.meshes.size());
    result.stats.vertices = static_cast<int>(geo.graph.vertices().size());
    result.stats.edges = static_cast<int>(geo.graph.edges().size());
    result.stats.patches = static_cast<int>(geo.patches.size());
    result.stats.graph_ms = geo.graph_ms;
    result.stats.trace_ms = geo.trace_ms;
    result.stats.patches_ms = geo.patches_ms;

    ImageGrid grid = make_image_grid(scene.domain, options.width, options.height);
    std::vector<MeshEval> meshes;
    meshes.reserve(scene.meshes.size());
    for (const auto& m : scene.meshes) meshes.emplace_back(m);

    Image poisson_tex;
    bool have_poisson = !scene.poisson_curves.empty();
    if (have_poisson) poisson_tex = rasterize_poisson_sources(scene, grid);

    result.image = Image(grid.width, grid.height);
    std::vector<uint8_t> claim(static_cast<size_t>(grid.width) * grid.height, 0);
    std::vector<int> owner(claim.size(), -1);
    std::vector<PixelType> owner_type;
    std::vector<ColorRGB> source_accum;
    bool want_masks = debug_basename && (debug_flags & kDumpMasks);
    bool want_source = debug_basename && (debug_flags & kDumpSource);
    bool want_patches = debug_basename && (debug_flags & kDumpPatches);
    Image flags_img;
    if (want_masks) {
        owner_type.assign(claim.size(), PixelType::outside);
        flags_img = Image(grid.width, grid.height);
        for (auto& p : flags_img.pixels) p = {1, 1, 1};
    }
    if (want_source) source_accum.assign(claim.size(), {});

    double raster_ms = 0, solve_ms = 0;
    for (const Patch& patch : geo.patches) {
        auto tr = std::chrono::steady_clock::now();
        RasterGrids grids = make_grids(grid, patch);
        rasterize_masks(patch, geo.graph, meshes, grids);
        if (grids.in_patch_count() == 0) {
            raster_ms += ms_since(tr);
            continue;
        }
        int singular = 0;
        rasterize_source(patch, meshes, have_poisson ? &poisson_tex : nullptr, grids, &singular);
        result.stats.singular_pixels += singular;
        raster_ms += ms_since(tr);

        auto ts = std::chrono::steady_clock::now();
        SolveStats st = solve(grids, config);
        solve_ms += ms_since(ts);
        result.stats.iterations += st.iterations;
        result.stats.max_residual = std::max(result.stats.max_residual, st.residual);
        result.stats.all_converged = result.stats.all_converged && st.converged;
        result.stats.isolated_pixels += st.isolated;
        if (!st.converged)
            result.warnings.push_back("patch " + std::to_string(patch.id) +
                                      ": not converged (residual " + std::to_string(st.residual) +
                                      ")");

        composite_patch(grids, result.image, claim);
        for (int j = 0; j < grids.height; ++j)
            for (int i = 0; i < grids.width; ++i) {
                if (grids.type[grids.idx(i, j)] == PixelType::outside) continue;
                size_t o = static_cast<size_t>(grids.y0 + j) * grid.width + (grids.x0 + i);
                if (owner[o] < 0) owner[o] = patch.id;
                if (want_masks) owner_type[o] = grids.type[grids.idx(i, j)];
                if (want_source) source_accum[o] += grids.source[grids.idx(i, j)];
            }
        if (want_masks) {
            for (int j = 0; j < grids.height; ++j)
                for (int i = 0; i + 1 < grids.width; ++i)
                    if (grids.closed_h[static_cast<size_t>(j) * (grids.width - 1) + i])
                        flags_img.at(grids.x0 + i, grids.y0 + j) = {0.1, 0.1, 0.1};
            for (int j = 0; j + 1 < grids.height; ++j)
                for (int i = 0; i < grids.width; ++i)
                    if (grids.closed_v[static_cast<size_t>(j) * grids.width + i])
                        flags_img.at(grids.x0 + i, grids.y0 + j) = {0.1, 0.1, 0.1};
        }
        if (want_patches) {
            Image layer(grids.width, grids.height);
            for (size_t k = 0; k < grids.color.size(); ++k) layer.pixels[k] = grids.color[k];
            write_png(layer, *debug_basename + ".layer" + std::to_string(patch.id) + ".png");
        }
    }
    result.stats.raster_ms = raster_ms;
    result.stats.solve_ms = solve_ms;

    // Fill pixels no patch claimed (tolerance slivers) from the nearest
    // claimed pixel on the same row.
    for (int j = 0; j < grid.height; ++j) {
        for (int i = 0; i < grid.width; ++i) {
            size_t o = static_cast<size_t>(j) * grid.width + i;
            if (claim[o] == 0) {
                ++result.stats.unclaimed_pixels;
                for (int r = 1; r < grid.width; ++r) {
                    if (i - r >= 0 && claim[o - r] > 0) {
                        result.image.pixels[o] = result.image.pixels[o - r];
                        break;
                    }
                    if (i + r < grid.width && claim[o + r] > 0) {
                        result.image.pixels[o] = result.image.pixels[o + r];
                        break;
                    }
                }
            } else if (claim[o] > 1) {
                ++result.stats.multi_claimed_pixels;
            }
        }
    }

    if (debug_basename) {
        if (debug_flags & kDumpGraph) {
            dump_graph_image(geo.graph, grid, *debug_basename + ".graph.png");
            FILE* f = std::fopen((*debug_basename + ".graph.txt").c_str(), "w");
            if (f) {
                std::string text = geo.graph.dump_text();
                std::fwrite(text.data(), 1, text.size(), f);
                std::fclose(f);
            }
        }
        if (want_patches) {
            Image map(grid.width, grid.height);
            for (size_t o = 0; o < owner.size(); ++o)
                map.pixels[o] = owner[o] >= 0
                                    ? kPatchColors[owner[o] % std::size(kPatchColors)]
                                    : ColorRGB{0, 0, 0};
            write_png(map, *debug_basename + ".patches.png");
            FILE* f = std::fopen((*debug_basename + ".patches.txt").c_str(), "w");
            if (f) {
                std::string text = dump_patches_text(geo.patches);
                std::fwrite(text.data(), 1, text.size(), f);
                std::fclose(f);
            }
        }
        if (want_masks) {
            Image map(grid.width, grid.height);
            for (size_t o = 0; o < owner_type.size(); ++o) {
                switch (owner_type[o]) {
                    case PixelType::interior: map.pixels[o] = {0.2, 0.75, 0.2}; break;
                    case PixelType::dirichlet: map.pixels[o] = {0.85, 0.2, 0.2}; break;
                    case PixelType::neumann: map.pixels[o] = {0.2, 0.3, 0.9}; break;
                    default: map.pixels[o] = {0, 0, 0};
                }
            }
            write_png(map, *debug_basename + ".masks.png");
            write_png(flags_img, *debug_basename + ".flags.png");
        }
        if (want_source) {
            double peak = 0;
            for (const auto& c : source_accum) peak = std::max(peak, c.max_abs());
            Image map(grid.width, grid.height);
            double scale = peak > 0 ? 1.0 / std::log1p(peak * 1e3) : 0.0;
            for (size_t o = 0; o < source_accum.size(); ++o) {
                double v = source_accum[o].r + source_accum[o].g + source_accum[o].b;
                double m = std::log1p(std::abs(v) * 1e3) * scale;
                map.pixels[o] = v >= 0 ? ColorRGB{m, 0, 0} : ColorRGB{0, 0, m};
            }
            write_png(map, *debug_basename + ".source.png");
        }
    }
    return result;
}

// ---------------------------------------------------------------- validate

ValidationReport validate_scene(const Scene& scene, std::optional<double> tau_override) {
    ValidationReport report;
    double tau = tau_override.value_or(scene.settings.tau);
    double epsilon = scene.epsilon_or_default();

    std::vector<std::string> warnings;
    std::vector<InputBoundaryCurve> curves = scene_boundary_curves(scene, &warnings);
    for (const auto& w : warnings) {
        if (w.find("FoldedMesh") != std::string::npos) report.errors.push_back(w);
        else report.warnings.push_back(w);
    }

    // Degenerate pieces and overlaps surface as graph-build warnings.
    std::vector<InputBoundaryCurve> all = domain_border_curves(scene.domain);
    all.insert(all.end(), curves.begin(), curves.end());
    EdgeGraph graph = EdgeGraph::build(all, tau, epsilon);
    for (const auto& w : graph.warnings()) report.warnings.push_back(w);

    // Near-miss endpoints: close enough to leak, too far to snap.
    double merge = std::sqrt(std::max(tau, 0.0));
    double threshold = std::max(2.0 * merge, 0.05 * scene.domain.min_extent());
    std::vector<Vec2> endpoints;
    std::vector<Polyline> polys;
    for (const auto& c : curves) {
        if (!c.spline.closed()) {
            endpoints.push_back(c.spline.start());
            endpoints.push_back(c.spline.end());
        }
        polys.push_back(discretize(c.spline, epsilon));
    }
    auto describe = [](Vec2 p) {
        return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
    };
    for (size_t a = 0; a < endpoints.size(); ++a)
        for (size_t b = a + 1; b < endpoints.size(); ++b) {
            double d = dist(endpoints[a], endpoints[b]);
            if (d > std::max(kCoincidenceTol, merge) && d <= threshold)
                report.warnings.push_back("near-miss endpoints " + describe(endpoints[a]) +
                                          " and " + describe(endpoints[b]) + " at distance " +
                                          std::to_string(d));
        }
    for (size_t a = 0; a < endpoints.size(); ++a)
        for (size_t p = 0; p < polys.size(); ++p) {
            ClosestPointResult c = closest_point(polys[p], endpoints[a]);
            if (c.distance > std::max(1e-6, merge) && c.distance <= threshold)
                report.warnings.push_back("near-miss endpoint " + describe(endpoints[a]) +
                                          " to curve " + std::to_string(p) + " at distance " +
                                          std::to_string(c.distance));
        }
    return report;
}

}  // namespace vgr
