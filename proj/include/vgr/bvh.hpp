#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "vgr/geometry.hpp"

namespace vgr {

// Binary AABB tree over user-supplied boxes. Built once, queried many times;
// item ids are returned in ascending order so callers stay deterministic.
class BoxBvh {
public:
    BoxBvh() = default;

    void build(std::vector<Aabb> boxes) {
        boxes_ = std::move(boxes);
        nodes_.clear();
        order_.resize(boxes_.size());
        for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
        if (!boxes_.empty()) build_node(0, static_cast<int>(order_.size()));
    }

    void query(const Aabb& box, std::vector<int>& out) const {
        out.clear();
        if (nodes_.empty()) return;
        query_node(0, box, out);
        std::sort(out.begin(), out.end());
    }

    const Aabb& box(int id) const { return boxes_[id]; }
    size_t size() const { return boxes_.size(); }

private:
    struct Node {
        Aabb box;
        int left = -1, right = -1;   // children, or -1 on leaves
        int begin = 0, end = 0;      // item range on leaves
    };

    int build_node(int begin, int end) {
        Node node;
        for (int i = begin; i < end; ++i) node.box.extend(boxes_[order_[i]]);
        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (end - begin <= 4) {
            nodes_[idx].begin = begin;
            nodes_[idx].end = end;
            return idx;
        }
        Vec2 extent = node.box.hi - node.box.lo;
        int axis = extent.x >= extent.y ? 0 : 1;
        int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) {
                             double ca = axis == 0 ? boxes_[a].lo.x + boxes_[a].hi.x
                                                   : boxes_[a].lo.y + boxes_[a].hi.y;
                             double cb = axis == 0 ? boxes_[b].lo.x + boxes_[b].hi.x
                                                   : boxes_[b].lo.y + boxes_[b].hi.y;
                             return ca != cb ? ca < cb : a < b;
                         });
        int l = build_node(begin, mid);
        int r = build_node(mid, end);
        nodes_[idx].left = l;
        nodes_[idx].right = r;
        return idx;
    }

    void query_node(int n, const Aabb& box, std::vector<int>& out) const {
        const Node& node = nodes_[n];
        if (!node.box.overlaps(box)) return;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i)
                if (boxes_[order_[i]].overlaps(box)) out.push_back(order_[i]);
            return;
        }
        query_node(node.left, box, out);
        query_node(node.right, box, out);
    }

    std::vector<Aabb> boxes_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

// BVH over line segments with per-segment payload; supports closest-point
// and segment-crossing queries. Used for boundary-condition sampling and
// the staggered-flag ray casts.
class SegmentBvh {
public:
    struct Segment {
        Vec2 a, b;
        int curve = 0;     // owning patch boundary curve / edge id
        double ta = 0.0;   // source parameters at the endpoints
        double tb = 0.0;
    };

    struct Closest {
        double distance = std::numeric_limits<double>::infinity();
        Vec2 point;
        double param = 0.0;
        int curve = -1;
        int segment = -1;
    };

    void build(std::vector<Segment> segs) {
        segs_ = std::move(segs);
        std::vector<Aabb> boxes(segs_.size());
        for (size_t i = 0; i < segs_.size(); ++i) {
            boxes[i].extend(segs_[i].a);
            boxes[i].extend(segs_[i].b);
        }
        tree_.build(std::move(boxes));
    }

    bool empty() const { return segs_.empty(); }
    const std::vector<Segment>& segments() const { return segs_; }

    // Nearest segment point; distance ties broken by lower curve id, then
    // lower segment index.
    Closest closest(Vec2 p) const {
        Closest best;
        if (segs_.empty()) return best;
        // Expanding-radius box search: start from a coarse guess and grow.
        double r = initial_radius(p);
        std::vector<int> ids;
        for (int attempt = 0; attempt < 64; ++attempt) {
            tree_.query(Aabb{{p.x - r, p.y - r}, {p.x + r, p.y + r}}, ids);
            for (int id : ids) consider(id, p, best);
            if (best.curve >= 0 && best.distance <= r) return best;
            r *= 4.0;
        }
        for (size_t i = 0; i < segs_.size(); ++i) consider(static_cast<int>(i), p, best);
        return best;
    }

    // True if segment pq crosses any stored segment.
    bool crosses(Vec2 p, Vec2 q) const {
        Aabb box;
        box.extend(p);
        box.extend(q);
        std::vector<int> ids;
        tree_.query(box.expanded(kCoincidenceTol), ids);
        Vec2 r = q - p;
        for (int id : ids) {
            const Segment& s = segs_[id];
            Vec2 w = s.b - s.a;
            double denom = cross(r, w);
            Vec2 d = s.a - p;
            if (std::abs(denom) < 1e-18) continue;
            double t = cross(d, w) / denom;
            double u = cross(d, r) / denom;
            if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return true;
        }
        return false;
    }

private:
    double initial_radius(Vec2 p) const {
        const Segment& s = segs_[segs_.size() / 2];
        return std::max(1e-6, dist(p, s.a) * 0.5);
    }

    void consider(int id, Vec2 p, Closest& best) const {
        const Segment& s = segs_[id];
        double frac;
        Vec2 q = closest_point_on_segment(s.a, s.b, p, &frac);
        double d = dist(q, p);
        bool better = d < best.distance - 1e-15;
        if (!better && d < best.distance + 1e-15) {
            better = s.curve < best.curve ||
                     (s.curve == best.curve && id < best.segment);
        }
        if (better) {
            best.distance = d;
            best.point = q;
            best.param = s.ta + frac * (s.tb - s.ta);
            best.curve = s.curve;
            best.segment = id;
        }
    }

    std::vector<Segment> segs_;
    BoxBvh tree_;
};

}  // namespace vgr
