#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vgr/bvh.hpp"
#include "vgr/edge_graph.hpp"
#include "vgr/ferguson.hpp"
#include "vgr/image_io.hpp"
#include "vgr/patches.hpp"
#include "vgr/scene.hpp"

namespace vgr {

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PixelType : uint8_t { outside, interior, dirichlet, neumann };

// Pixel lattice of the full output image. Pixel (i,j) has its center at
// origin + ((i+0.5)h, (j+0.5)h), with j running bottom-up.
struct ImageGrid {
    int width = 0, height = 0;
    double h = 0.0;
    Vec2 origin;

    Vec2 center(int i, int j) const { return origin + Vec2{(i + 0.5) * h, (j + 0.5) * h}; }
};

// Requires the domain aspect to match the resolution aspect (square pixels).
ImageGrid make_image_grid(const Rect& domain, int width, int height);

// Per-patch raster state over a bounding-box crop of the image: pixel types,
// staggered open/closed flags between horizontal/vertical neighbors, source
// term, Dirichlet colors, and the solution buffer.
struct RasterGrids {
    int width = 0, height = 0;  // crop size
    int x0 = 0, y0 = 0;         // crop offset in image pixels
    double h = 0.0;
    Vec2 origin;                // domain coords of the crop's lower-left corner

    std::vector<PixelType> type;
    std::vector<uint8_t> closed_h;  // (width-1) x height, between (i,j) and (i+1,j)
    std::vector<uint8_t> closed_v;  // width x (height-1), between (i,j) and (i,j+1)
    std::vector<ColorRGB> source;
    std::vector<ColorRGB> dirichlet;
    std::vector<ColorRGB> color;

    size_t idx(int i, int j) const { return static_cast<size_t>(j) * width + i; }
    Vec2 center(int i, int j) const { return origin + Vec2{(i + 0.5) * h, (j + 0.5) * h}; }
    bool in_crop(int i, int j) const { return i >= 0 && i < width && j >= 0 && j < height; }
    bool closed_between(int i, int j, int ni, int nj) const;
    size_t in_patch_count() const;
};

RasterGrids make_grids(const ImageGrid& grid, const Patch& patch);

// Flattened boundary sides of a patch with a segment BVH for closest-point
// and crossing queries. Distance ties resolve to the lower edge id, then the
// earlier side in loop order.
class PatchBoundary {
public:
    PatchBoundary(const Patch& patch, const EdgeGraph& graph);

    struct Sample {
        const PatchBoundaryCurve* side = nullptr;
        double param = 0.0;     // source-curve parameter at the closest point
        double t_max = 1.0;     // source-curve parameter range
        double distance = 0.0;
    };
    Sample closest(Vec2 p) const;
    bool crosses(Vec2 a, Vec2 b) const { return bvh_.crosses(a, b); }
    bool empty() const { return bvh_.empty(); }

private:
    std::vector<const PatchBoundaryCurve*> sides_;
    std::vector<int> segment_side_;
    std::vector<double> side_t_max_;
    SegmentBvh bvh_;
};

// Pixel-type masks, staggered flags, and Dirichlet colors for one patch.
// Dirichlet pixels sample the boundary color at the closest hit parameter;
// mesh-sourced boundaries interpolate the mesh color at the pixel center
// instead.
void rasterize_masks(const Patch& patch, const EdgeGraph& graph,
                     const std::vector<MeshEval>& meshes, RasterGrids& grids);

// Image-wide additive Poisson-curve source texture: each curve deposits
// f_l/f_r onto the band pixels on its two sides, weighted per pixel by the
// number of 4-neighbors on the opposite side.
Image rasterize_poisson_sources(const Scene& scene, const ImageGrid& grid);

// Patch source term: weighted mesh Laplacians (pixels outside a mesh or with
// a singular Jacobian contribute zero) plus the Poisson band texture.
void rasterize_source(const Patch& patch, const std::vector<MeshEval>& meshes,
                      const Image* poisson_tex, RasterGrids& grids, int* singular_count = nullptr);

// One plain Jacobi relaxation sweep (double-buffered). Interior pixels
// average all four neighbors; Neumann pixels only across open staggered
// flags; Dirichlet pixels are pinned. Returns the max per-channel change
// over updated pixels; pixels with no usable neighbor keep their value and
// are counted in *isolated.
double jacobi_step(const RasterGrids& grids, const std::vector<ColorRGB>& src,
                   std::vector<ColorRGB>& dst, int* isolated = nullptr);

struct SolverConfig {
    int iterations = 10000;      // fine-level-equivalent sweep budget
    int multigrid_levels = 4;
    double residual_target = 1e-5;  // in h^2-scaled units
};

struct SolveStats {
    double residual = 0.0;       // max |jacobi(c) - c| at exit
    double iterations = 0.0;     // fine-level-equivalent sweeps spent
    bool converged = false;
    int isolated = 0;
};

// Multigrid V-cycles on the patch grids (dirichlet-dominant mask
// restriction, closed flags propagate, flag-respecting bilinear
// prolongation) until max |jacobi(c) - c| <= residual_target * h^2 / 4 or
// the sweep budget runs out.
SolveStats solve(RasterGrids& grids, const SolverConfig& config);

// Writes the patch's in-patch pixels into the image; claim[] counts how many
// patches claimed each pixel.
void composite_patch(const RasterGrids& grids, Image& image, std::vector<uint8_t>& claim);

}  // namespace vgr
