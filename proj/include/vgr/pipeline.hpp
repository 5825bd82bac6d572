#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vgr/edge_graph.hpp"
#include "vgr/image_io.hpp"
#include "vgr/patches.hpp"
#include "vgr/raster.hpp"
#include "vgr/scene.hpp"

namespace vgr {

struct RenderOptions {
    int width = 512, height = 512;
    std::optional<double> tau, epsilon, residual_target;
    std::optional<int> iterations, multigrid_levels;
    std::optional<OverlapMode> overlap;
};

enum DebugDump : unsigned {
    kDumpGraph = 1u,
    kDumpPatches = 2u,
    kDumpMasks = 4u,
    kDumpSource = 8u,
};

struct PipelineStats {
    int dcs = 0, pcs = 0, gms = 0;
    int vertices = 0, edges = 0, patches = 0;
    double graph_ms = 0, trace_ms = 0, patches_ms = 0, raster_ms = 0, solve_ms = 0;
    double iterations = 0;  // fine-level-equivalent sweeps across all patches
    double max_residual = 0;
    bool all_converged = true;
    int isolated_pixels = 0, singular_pixels = 0;
    int unclaimed_pixels = 0, multi_claimed_pixels = 0;
};

// Geometry stages shared by render, stats, and validate.
struct SceneGeometry {
    EdgeGraph graph;
    std::vector<Patch> patches;
    std::vector<Polyline> mesh_rings;
    std::vector<std::string> warnings;
    double graph_ms = 0, trace_ms = 0, patches_ms = 0;
};

SceneGeometry build_geometry(const Scene& scene, double tau, double epsilon, OverlapMode mode);

struct RenderResult {
    Image image;  // linear light, unclamped
    PipelineStats stats;
    std::vector<std::string> warnings;
};

// Full pipeline: border + scene curves -> edge graph -> patches -> masks,
// sources, per-patch Poisson solves -> composite. When `debug_basename` is
// set, the requested debug layers are written as PNGs next to it.
RenderResult render_scene(const Scene& scene, const RenderOptions& options,
                          const std::string* debug_basename = nullptr,
                          unsigned debug_flags = 0);

struct ValidationReport {
    std::vector<std::string> errors;    // folded meshes and other hard problems
    std::vector<std::string> warnings;  // near-miss endpoints (leak risk), drops
};

// Diagnoses leak risks: endpoints within the near-miss radius of other
// endpoints or edges (max(2*sqrt(tau), 5% of the domain extent)), folded
// mesh boundaries, and degenerate pieces discarded during graph build.
ValidationReport validate_scene(const Scene& scene, std::optional<double> tau_override = {});

}  // namespace vgr
