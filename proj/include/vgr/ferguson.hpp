#pragma once

#include <array>
#include <optional>
#include <vector>

#include "vgr/color.hpp"
#include "vgr/geometry.hpp"
#include "vgr/scene.hpp"

namespace vgr {

struct UV {
    double u = 0.0, v = 0.0;
};

enum class PreimageStatus { ok, not_in_patch, fold_detected };

struct PreimageResult {
    PreimageStatus status = PreimageStatus::not_in_patch;
    UV uv;
    bool ok() const { return status == PreimageStatus::ok; }
};

// First and second partials of the inverse coordinate map (u,v) as functions
// of image coordinates (x,y), obtained by inverting the 5x5 forward relation
// assembled from the surface partials.
struct CoordinatePartials {
    double u_x = 0, v_x = 0, u_y = 0, v_y = 0;
    double u_xx = 0, v_xx = 0, u_yy = 0, v_yy = 0;
    double u_xy = 0, v_xy = 0;
};

// Bi-cubic tensor-product surface in Hermite (Ferguson) form over [0,1]^2.
// Q holds corner values, corner u/v-derivatives, and zero mixed partials for
// each of the five channels x, y, r, g, b.
class FergusonPatch {
public:
    using Q4 = std::array<std::array<double, 4>, 4>;

    // Corner order: (u,v) = (0,0), (0,1), (1,0), (1,1).
    static FergusonPatch from_corners(const std::array<Vec2, 4>& pos,
                                      const std::array<Vec2, 4>& du_pos,
                                      const std::array<Vec2, 4>& dv_pos,
                                      const std::array<ColorRGB, 4>& color,
                                      const std::array<ColorRGB, 4>& du_color,
                                      const std::array<ColorRGB, 4>& dv_color);
    static FergusonPatch from_mesh(const GradientMesh& mesh, int patch_row, int patch_col);

    Vec2 position(double u, double v) const;
    ColorRGB color(double u, double v) const;

    Vec2 pos_du(double u, double v) const;
    Vec2 pos_dv(double u, double v) const;
    Vec2 pos_duu(double u, double v) const;
    Vec2 pos_dvv(double u, double v) const;
    Vec2 pos_duv(double u, double v) const;

    ColorRGB color_du(double u, double v) const;
    ColorRGB color_dv(double u, double v) const;
    ColorRGB color_duu(double u, double v) const;
    ColorRGB color_dvv(double u, double v) const;
    ColorRGB color_duv(double u, double v) const;

    double jacobian_det(double u, double v) const;
    const Aabb& bounds() const { return bounds_; }

    // UV coordinate mapping to x, located by Bezier-clipping-style recursive
    // bisection of the UV square (depth 40) followed by Newton polish;
    // position tolerance 1e-9.
    PreimageResult preimage(Vec2 x) const;
    // Newton-only variant seeded at `guess`; falls back to the full search
    // when the iteration leaves the square or stalls.
    PreimageResult preimage_guess(Vec2 x, UV guess) const;

    // Empty when the forward Jacobian is singular at uv (|det| <= 1e-12).
    std::optional<CoordinatePartials> coordinate_partials(double u, double v) const;

    // Laplacian of color with respect to image coordinates at uv.
    std::optional<ColorRGB> color_laplacian_at(UV uv) const;

private:
    double value(int ch, double u, double v, int du_order, int dv_order) const;

    std::array<Q4, 5> q_{};        // x, y, r, g, b
    std::array<Q4, 2> bezier_{};   // position control nets for subdivision search
    Aabb bounds_;
};

enum class MeshSampleStatus { ok, outside, singular };

struct MeshSample {
    MeshSampleStatus status = MeshSampleStatus::outside;
    int patch_row = 0, patch_col = 0;
    UV uv;
    bool ok() const { return status == MeshSampleStatus::ok; }
};

// Evaluation view over a whole gradient mesh: resolves image points to the
// Ferguson sub-patch whose UV search succeeds (ties at shared edges go to the
// lowest row, then column) and exposes color/Laplacian lookups.
class MeshEval {
public:
    explicit MeshEval(const GradientMesh& mesh);

    MeshSample locate(Vec2 x) const;
    MeshSample locate_near(Vec2 x, const MeshSample& hint) const;
    std::optional<ColorRGB> color_at(Vec2 x) const;
    // Zero for singular-Jacobian points (counted in *singular if given).
    std::optional<ColorRGB> laplacian_at(Vec2 x, int* singular = nullptr) const;
    std::optional<ColorRGB> laplacian_at_hint(Vec2 x, MeshSample& hint, int* singular = nullptr) const;

    const FergusonPatch& patch(int row, int col) const { return patches_[row * cols_ + col]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Aabb& bounds() const { return bounds_; }

private:
    std::optional<ColorRGB> laplacian_of_sample_(const MeshSample& s, int* singular) const;

    int rows_, cols_;
    std::vector<FergusonPatch> patches_;
    Aabb bounds_;
};

}  // namespace vgr
