#pragma once

// Static k-d tree for exact nearest-neighbour queries in 3-D.
//
// Nodes split at the median along the axis of largest extent. Queries are
// exact and deterministic: among equidistant points the lowest index wins, so
// results match an exhaustive scan bit for bit. The tree is read-only after
// construction and may be queried from several threads at once.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "pcqa/point_cloud.hpp"

namespace pcqa {

struct Neighbor {
    std::size_t index = 0;
    double squared_distance = std::numeric_limits<double>::infinity();
};

class KdTree {
public:
    static constexpr std::size_t kLeafSize = 8;

    explicit KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        if (!points_.empty()) {
            nodes_.reserve(2 * points_.size() / kLeafSize + 1);
            build(0, points_.size());
        }
    }

    std::size_t size() const { return points_.size(); }

    Neighbor nearest(const Vec3& query) const {
        Neighbor best;
        if (!nodes_.empty()) search(0, query, best);
        return best;
    }

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::uint32_t left = 0;  // 0 marks a leaf (the root is never a child)
        std::uint32_t right = 0;
        int axis = 0;
        double split = 0.0;
    };

    std::uint32_t build(std::size_t begin, std::size_t end) {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({begin, end, 0, 0, 0, 0.0});
        if (end - begin <= kLeafSize) return id;

        Vec3 lo = points_[order_[begin]], hi = lo;
        for (std::size_t i = begin; i < end; ++i) {
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], points_[order_[i]][k]);
                hi[k] = std::max(hi[k], points_[order_[i]][k]);
            }
        }
        int axis = 0;
        for (int k = 1; k < 3; ++k) {
            if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
        }
        if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

        const std::size_t mid = begin + (end - begin) / 2;
        const auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
        std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                         order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                             return points_[a][axis] < points_[b][axis];
                         });
        const double split = points_[order_[mid]][axis];
        const std::uint32_t left = build(begin, mid);
        const std::uint32_t right = build(mid, end);
        nodes_[id].axis = axis;
        nodes_[id].split = split;
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    // Left subtree holds coordinates <= split, right subtree >= split.
    void search(std::uint32_t id, const Vec3& q, Neighbor& best) const {
        const Node& node = nodes_[id];
        if (node.left == 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const double d = squared_distance(points_[idx], q);
                if (d < best.squared_distance || (d == best.squared_distance && idx < best.index)) {
                    best = {idx, d};
                }
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const std::uint32_t near = delta <= 0.0 ? node.left : node.right;
        const std::uint32_t far = delta <= 0.0 ? node.right : node.left;
        search(near, q, best);
        // `<=` keeps equidistant candidates reachable for the index tie-break.
        if (delta * delta <= best.squared_distance) search(far, q, best);
    }

    std::vector<Vec3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

inline KdTree build_index(const PointCloud& cloud) { return KdTree(cloud.positions); }

}  // namespace pcqa
