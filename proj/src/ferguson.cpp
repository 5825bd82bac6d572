#include "vgr/ferguson.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace vgr {

namespace {

// Cubic Hermite basis (value, first, second derivative).
void hermite(double t, double h[4]) {
    double t2 = t * t, t3 = t2 * t;
    h[0] = 2 * t3 - 3 * t2 + 1;
    h[1] = -2 * t3 + 3 * t2;
    h[2] = t3 - 2 * t2 + t;
    h[3] = t3 - t2;
}
void hermite_d1(double t, double h[4]) {
    double t2 = t * t;
    h[0] = 6 * t2 - 6 * t;
    h[1] = -6 * t2 + 6 * t;
    h[2] = 3 * t2 - 4 * t + 1;
    h[3] = 3 * t2 - 2 * t;
}
void hermite_d2(double t, double h[4]) {
    h[0] = 12 * t - 6;
    h[1] = -12 * t + 6;
    h[2] = 6 * t - 4;
    h[3] = 6 * t - 2;
}

void basis(double t, int order, double h[4]) {
    if (order == 0) hermite(t, h);
    else if (order == 1) hermite_d1(t, h);
    else hermite_d2(t, h);
}

// 1D Hermite (value0, value1, d0, d1) -> Bezier control values.
// As a matrix T, the tensor-product control net is T * Q * T^t.
constexpr double kHermiteToBezier[4][4] = {
    {1, 0, 0, 0},
    {1, 0, 1.0 / 3.0, 0},
    {0, 1, 0, -1.0 / 3.0},
    {0, 1, 0, 0},
};

FergusonPatch::Q4 to_bezier_net(const FergusonPatch::Q4& q) {
    FergusonPatch::Q4 tq{}, out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) tq[i][j] += kHermiteToBezier[i][k] * q[k][j];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) out[i][j] += tq[i][k] * kHermiteToBezier[j][k];
    return out;
}

// de Casteljau split of a 4x4 control net along u (axis 0) or v (axis 1).
void split_net(const FergusonPatch::Q4& net, int axis, FergusonPatch::Q4& lo,
               FergusonPatch::Q4& hi) {
    for (int k = 0; k < 4; ++k) {
        double c[4];
        for (int i = 0; i < 4; ++i) c[i] = axis == 0 ? net[i][k] : net[k][i];
        double m01 = 0.5 * (c[0] + c[1]);
        double m12 = 0.5 * (c[1] + c[2]);
        double m23 = 0.5 * (c[2] + c[3]);
        double a = 0.5 * (m01 + m12);
        double b = 0.5 * (m12 + m23);
        double mid = 0.5 * (a + b);
        double l[4] = {c[0], m01, a, mid};
        double h[4] = {mid, b, m23, c[3]};
        for (int i = 0; i < 4; ++i) {
            if (axis == 0) {
                lo[i][k] = l[i];
                hi[i][k] = h[i];
            } else {
                lo[k][i] = l[i];
                hi[k][i] = h[i];
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------- FergusonPatch

FergusonPatch FergusonPatch::from_corners(const std::array<Vec2, 4>& pos,
                                          const std::array<Vec2, 4>& du_pos,
                                          const std::array<Vec2, 4>& dv_pos,
                                          const std::array<ColorRGB, 4>& color,
                                          const std::array<ColorRGB, 4>& du_color,
                                          const std::array<ColorRGB, 4>& dv_color) {
    FergusonPatch p;
    // Corner order (0,0), (0,1), (1,0), (1,1); Q rows follow u, columns v.
    // Mixed partials q[2..3][2..3] stay zero.
    auto fill_ch = [&](int ch, auto get) {
        Q4& q = p.q_[ch];
        auto set = [&](int i, int j, int corner, bool du, bool dv) {
            if (!du && !dv) q[i][j] = get(pos[corner], color[corner]);
            else if (du) q[i][j] = get(du_pos[corner], du_color[corner]);
            else q[i][j] = get(dv_pos[corner], dv_color[corner]);
        };
        set(0, 0, 0, false, false);
        set(0, 1, 1, false, false);
        set(1, 0, 2, false, false);
        set(1, 1, 3, false, false);
        set(2, 0, 0, true, false);
        set(2, 1, 1, true, false);
        set(3, 0, 2, true, false);
        set(3, 1, 3, true, false);
        set(0, 2, 0, false, true);
        set(0, 3, 1, false, true);
        set(1, 2, 2, false, true);
        set(1, 3, 3, false, true);
    };
    fill_ch(0, [](Vec2 v, ColorRGB) { return v.x; });
    fill_ch(1, [](Vec2 v, ColorRGB) { return v.y; });
    fill_ch(2, [](Vec2, ColorRGB c) { return c.r; });
    fill_ch(3, [](Vec2, ColorRGB c) { return c.g; });
    fill_ch(4, [](Vec2, ColorRGB c) { return c.b; });

    p.bezier_[0] = to_bezier_net(p.q_[0]);
    p.bezier_[1] = to_bezier_net(p.q_[1]);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) p.bounds_.extend({p.bezier_[0][i][j], p.bezier_[1][i][j]});
    return p;
}

FergusonPatch FergusonPatch::from_mesh(const GradientMesh& mesh, int pr, int pc) {
    const MeshNode& n00 = mesh.node(pr, pc);
    const MeshNode& n01 = mesh.node(pr, pc + 1);
    const MeshNode& n10 = mesh.node(pr + 1, pc);
    const MeshNode& n11 = mesh.node(pr + 1, pc + 1);
    return from_corners({n00.pos, n01.pos, n10.pos, n11.pos},
                        {n00.du_pos, n01.du_pos, n10.du_pos, n11.du_pos},
                        {n00.dv_pos, n01.dv_pos, n10.dv_pos, n11.dv_pos},
                        {n00.color, n01.color, n10.color, n11.color},
                        {n00.du_color, n01.du_color, n10.du_color, n11.du_color},
                        {n00.dv_color, n01.dv_color, n10.dv_color, n11.dv_color});
}

double FergusonPatch::value(int ch, double u, double v, int du_order, int dv_order) const {
    double hu[4], hv[4];
    basis(u, du_order, hu);
    basis(v, dv_order, hv);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += q_[ch][i][j] * hv[j];
        sum += hu[i] * row;
    }
    return sum;
}

Vec2 FergusonPatch::position(double u, double v) const {
    return {value(0, u, v, 0, 0), value(1, u, v, 0, 0)};
}
ColorRGB FergusonPatch::color(double u, double v) const {
    return {value(2, u, v, 0, 0), value(3, u, v, 0, 0), value(4, u, v, 0, 0)};
}
Vec2 FergusonPatch::pos_du(double u, double v) const {
    return {value(0, u, v, 1, 0), value(1, u, v, 1, 0)};
}
Vec2 FergusonPatch::pos_dv(double u, double v) const {
    return {value(0, u, v, 0, 1), value(1, u, v, 0, 1)};
}
Vec2 FergusonPatch::pos_duu(double u, double v) const {
    return {value(0, u, v, 2, 0), value(1, u, v, 2, 0)};
}
Vec2 FergusonPatch::pos_dvv(double u, double v) const {
    return {value(0, u, v, 0, 2), value(1, u, v, 0, 2)};
}
Vec2 FergusonPatch::pos_duv(double u, double v) const {
    return {value(0, u, v, 1, 1), value(1, u, v, 1, 1)};
}
ColorRGB FergusonPatch::color_du(double u, double v) const {
    return {value(2, u, v, 1, 0), value(3, u, v, 1, 0), value(4, u, v, 1, 0)};
}
ColorRGB FergusonPatch::color_dv(double u, double v) const {
    return {value(2, u, v, 0, 1), value(3, u, v, 0, 1), value(4, u, v, 0, 1)};
}
ColorRGB FergusonPatch::color_duu(double u, double v) const {
    return {value(2, u, v, 2, 0), value(3, u, v, 2, 0), value(4, u, v, 2, 0)};
}
ColorRGB FergusonPatch::color_dvv(double u, double v) const {
    return {value(2, u, v, 0, 2), value(3, u, v, 0, 2), value(4, u, v, 0, 2)};
}
ColorRGB FergusonPatch::color_duv(double u, double v) const {
    return {value(2, u, v, 1, 1), value(3, u, v, 1, 1), value(4, u, v, 1, 1)};
}

double FergusonPatch::jacobian_det(double u, double v) const {
    return cross(pos_du(u, v), pos_dv(u, v));
}

// ---------------------------------------------------------------- preimage

namespace {

struct SearchCell {
    FergusonPatch::Q4 nx, ny;
    double u0, u1, v0, v1;
    int depth;
};

bool net_contains(const FergusonPatch::Q4& nx, const FergusonPatch::Q4& ny, Vec2 p, double pad) {
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            xlo = std::min(xlo, nx[i][j]);
            xhi = std::max(xhi, nx[i][j]);
            ylo = std::min(ylo, ny[i][j]);
            yhi = std::max(yhi, ny[i][j]);
        }
    return p.x >= xlo - pad && p.x <= xhi + pad && p.y >= ylo - pad && p.y <= yhi + pad;
}

}  // namespace

PreimageResult FergusonPatch::preimage_guess(Vec2 x, UV guess) const {
    double u = guess.u, v = guess.v;
    for (int it = 0; it < 24; ++it) {
        Vec2 r = position(u, v) - x;
        if (r.norm() <= kCoincidenceTol && u >= -1e-9 && u <= 1 + 1e-9 && v >= -1e-9 &&
            v <= 1 + 1e-9)
            return {PreimageStatus::ok, {std::clamp(u, 0.0, 1.0), std::clamp(v, 0.0, 1.0)}};
        Vec2 xu = pos_du(u, v), xv = pos_dv(u, v);
        double det = cross(xu, xv);
        if (std::abs(det) < 1e-14) break;
        double du = (r.x * xv.y - r.y * xv.x) / det;
        double dv = (xu.x * r.y - xu.y * r.x) / det;
        u -= du;
        v -= dv;
        if (u < -0.25 || u > 1.25 || v < -0.25 || v > 1.25) break;
    }
    return preimage(x);
}

PreimageResult FergusonPatch::preimage(Vec2 x) const {
    if (!bounds_.expanded(kCoincidenceTol).contains(x)) return {PreimageStatus::not_in_patch, {}};

    // Depth-first over subdivided control nets; the convex hull property
    // makes the net bounding box a conservative prune.
    std::vector<SearchCell> stack;
    stack.push_back({bezier_[0], bezier_[1], 0, 1, 0, 1, 0});
    int det_sign = 0;
    bool fold = false;

    while (!stack.empty()) {
        SearchCell cell = stack.back();
        stack.pop_back();
        if (!net_contains(cell.nx, cell.ny, x, kCoincidenceTol)) continue;

        double uc = 0.5 * (cell.u0 + cell.u1);
        double vc = 0.5 * (cell.v0 + cell.v1);
        if (cell.depth >= 40) {
            double det = jacobian_det(uc, vc);
            if (det != 0.0) {
                int s = det > 0 ? 1 : -1;
                if (det_sign == 0) det_sign = s;
                else if (s != det_sign) fold = true;
            }
            // Newton polish from the cell center.
            double u = uc, v = vc;
            for (int it = 0; it < 5; ++it) {
                Vec2 r = position(u, v) - x;
                Vec2 xu = pos_du(u, v), xv = pos_dv(u, v);
                double d = cross(xu, xv);
                if (std::abs(d) < 1e-14) break;
                u -= (r.x * xv.y - r.y * xv.x) / d;
                v -= (xu.x * r.y - xu.y * r.x) / d;
            }
            if (u >= -1e-7 && u <= 1 + 1e-7 && v >= -1e-7 && v <= 1 + 1e-7) {
                u = std::clamp(u, 0.0, 1.0);
                v = std::clamp(v, 0.0, 1.0);
                if (dist(position(u, v), x) <= kCoincidenceTol)
                    return {PreimageStatus::ok, {u, v}};
            }
            continue;
        }

        // Alternate split axes; push the far child first so the near child is
        // explored first (deterministic order).
        int axis = cell.depth % 2;
        Q4 lo_x, hi_x, lo_y, hi_y;
        split_net(cell.nx, axis, lo_x, hi_x);
        split_net(cell.ny, axis, lo_y, hi_y);
        SearchCell a = cell, b = cell;
        a.depth = b.depth = cell.depth + 1;
        a.nx = lo_x; a.ny = lo_y;
        b.nx = hi_x; b.ny = hi_y;
        if (axis == 0) {
            double mid = 0.5 * (cell.u0 + cell.u1);
            a.u1 = mid;
            b.u0 = mid;
        } else {
            double mid = 0.5 * (cell.v0 + cell.v1);
            a.v1 = mid;
            b.v0 = mid;
        }
        stack.push_back(b);
        stack.push_back(a);
    }
    return {fold ? PreimageStatus::fold_detected : PreimageStatus::not_in_patch, {}};
}

// ---------------------------------------------------------------- partials

std::optional<CoordinatePartials> FergusonPatch::coordinate_partials(double u, double v) const {
    Vec2 xu = pos_du(u, v), xv = pos_dv(u, v);
    Vec2 xuu = pos_duu(u, v), xvv = pos_dvv(u, v), xuv = pos_duv(u, v);
    if (std::abs(cross(xu, xv)) <= 1e-12) return std::nullopt;

    // Forward 5x5 relation between (u,v)-partials of x and (x,y)-partials of
    // u; its inverse holds the entries we need.
    Eigen::Matrix<double, 5, 5> fwd;
    fwd << xu.x, xu.y, 0, 0, 0,
           xv.x, xv.y, 0, 0, 0,
           xuu.x, xuu.y, xu.x * xu.x, xu.y * xu.y, 2 * xu.x * xu.y,
           xvv.x, xvv.y, xv.x * xv.x, xv.y * xv.y, 2 * xv.x * xv.y,
           xuv.x, xuv.y, xu.x * xv.x, xu.y * xv.y, xu.x * xv.y + xv.x * xu.y;

    Eigen::Matrix<double, 5, 5> inv = fwd.partialPivLu().inverse();

    CoordinatePartials p;
    p.u_x = inv(0, 0); p.v_x = inv(0, 1);
    p.u_y = inv(1, 0); p.v_y = inv(1, 1);
    p.u_xx = inv(2, 0); p.v_xx = inv(2, 1);
    p.u_yy = inv(3, 0); p.v_yy = inv(3, 1);
    p.u_xy = inv(4, 0); p.v_xy = inv(4, 1);
    return p;
}

std::optional<ColorRGB> FergusonPatch::color_laplacian_at(UV uv) const {
    auto cp = coordinate_partials(uv.u, uv.v);
    if (!cp) return std::nullopt;
    ColorRGB cu = color_du(uv.u, uv.v), cv = color_dv(uv.u, uv.v);
    ColorRGB cuu = color_duu(uv.u, uv.v), cvv = color_dvv(uv.u, uv.v), cuv = color_duv(uv.u, uv.v);

    ColorRGB out;
    for (int ch = 0; ch < 3; ++ch) {
        double gu = cu[ch], gv = cv[ch];
        double huu = cuu[ch], hvv = cvv[ch], huv = cuv[ch];
        double along_x = cp->u_x * cp->u_x * huu + 2 * cp->u_x * cp->v_x * huv +
                         cp->v_x * cp->v_x * hvv + gu * cp->u_xx + gv * cp->v_xx;
        double along_y = cp->u_y * cp->u_y * huu + 2 * cp->u_y * cp->v_y * huv +
                         cp->v_y * cp->v_y * hvv + gu * cp->u_yy + gv * cp->v_yy;
        out[ch] = along_x + along_y;
    }
    return out;
}

// ---------------------------------------------------------------- MeshEval

MeshEval::MeshEval(const GradientMesh& mesh) : rows_(mesh.rows), cols_(mesh.cols) {
    patches_.reserve(static_cast<size_t>(rows_) * cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            patches_.push_back(FergusonPatch::from_mesh(mesh, i, j));
            bounds_.extend(patches_.back().bounds());
        }
}

MeshSample MeshEval::locate(Vec2 x) const {
    bool singular = false;
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) {
            PreimageResult r = patch(i, j).preimage(x);
            if (r.ok()) return {MeshSampleStatus::ok, i, j, r.uv};
            if (r.status == PreimageStatus::fold_detected) singular = true;
        }
    return {singular ? MeshSampleStatus::singular : MeshSampleStatus::outside, 0, 0, {}};
}

MeshSample MeshEval::locate_near(Vec2 x, const MeshSample& hint) const {
    if (hint.ok()) {
        PreimageResult r = patch(hint.patch_row, hint.patch_col).preimage_guess(x, hint.uv);
        if (r.ok()) return {MeshSampleStatus::ok, hint.patch_row, hint.patch_col, r.uv};
    }
    return locate(x);
}

std::optional<ColorRGB> MeshEval::color_at(Vec2 x) const {
    MeshSample s = locate(x);
    if (!s.ok()) return std::nullopt;
    return patch(s.patch_row, s.patch_col).color(s.uv.u, s.uv.v);
}

std::optional<ColorRGB> MeshEval::laplacian_at(Vec2 x, int* singular) const {
    MeshSample s = locate(x);
    return laplacian_of_sample_(s, singular);
}

std::optional<ColorRGB> MeshEval::laplacian_at_hint(Vec2 x, MeshSample& hint, int* singular) const {
    MeshSample s = locate_near(x, hint);
    hint = s;
    return laplacian_of_sample_(s, singular);
}

std::optional<ColorRGB> MeshEval::laplacian_of_sample_(const MeshSample& s, int* singular) const {
    if (s.status == MeshSampleStatus::outside) return std::nullopt;
    if (s.status == MeshSampleStatus::singular) {
        if (singular) ++*singular;
        return ColorRGB{};  // degenerate point contributes nothing
    }
    auto lap = patch(s.patch_row, s.patch_col).color_laplacian_at(s.uv);
    if (!lap) {
        if (singular) ++*singular;
        return ColorRGB{};
    }
    return lap;
}

}  // namespace vgr
