#pragma once

// Full-reference distortion baselines between a reference cloud A and a
// degraded cloud B:
//
//  * point-to-point: squared distance from each point to its nearest
//    neighbour in the other cloud;
//  * point-to-plane: the same displacement projected on the normal of that
//    nearest neighbour;
//  * PSNR-YUV: per-channel colour PSNR after matching each degraded point to
//    its nearest reference point, combined with 6:1:1 weights.
//
// Direction "ab" measures the points of A against B, "ba" the points of B
// against A. Symmetric values take the worse (larger) direction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "pcqa/error.hpp"
#include "pcqa/kd_tree.hpp"
#include "pcqa/point_cloud.hpp"

namespace pcqa {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct GeometryOptions {
    // Peak for geometry PSNR; defaults to the diagonal of the reference
    // bounding box.
    std::optional<double> peak;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct DirectionalError {
    double mse = 0.0;
    double max_squared = 0.0;
    std::size_t count = 0;

    double hausdorff() const { return std::sqrt(max_squared); }
};

struct GeometryReport {
    std::optional<DirectionalError> ab;
    std::optional<DirectionalError> ba;
    double mse_sym = 0.0;
    double hausdorff_sym = 0.0;
    double psnr_mse = kInfinitePsnr;
    double psnr_hausdorff = kInfinitePsnr;
    double peak = 0.0;
};

struct ColorReport {
    double mse_y = 0.0, mse_u = 0.0, mse_v = 0.0;
    double psnr_y = kInfinitePsnr;
    double psnr_u = kInfinitePsnr;
    double psnr_v = kInfinitePsnr;
    double psnr_yuv = kInfinitePsnr;
};

namespace detail {

inline constexpr std::size_t kChunk = 4096;

// Runs fn(i) for i in [0, n) over fixed chunks. Each index writes only its
// own output slot, so the result does not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const auto run_chunk = [&](std::size_t c) {
        const std::size_t end = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) fn(i);
    };
    if (threads == 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
        });
    }
}

inline DirectionalError reduce(std::span<const double> errors) {
    DirectionalError d;
    d.count = errors.size();
    double sum = 0.0;
    for (double e : errors) {
        sum += e;
        d.max_squared = std::max(d.max_squared, e);
    }
    d.mse = errors.empty() ? 0.0 : sum / static_cast<double>(errors.size());
    return d;
}

inline void require_points(const PointCloud& cloud, const char* role) {
    if (cloud.empty()) throw NumericDomainError(std::string(role) + " cloud is empty");
}

}  // namespace detail

// 10 log10(peak^2 / error); +inf for a zero error.
inline double psnr(double error, double peak) {
    if (error == 0.0) return kInfinitePsnr;
    if (!(peak > 0.0)) throw NumericDomainError("PSNR needs a positive peak value");
    return 10.0 * std::log10(peak * peak / error);
}

inline double resolve_peak(const PointCloud& ref, const GeometryOptions& opts) {
    if (opts.peak) {
        if (!(*opts.peak > 0.0)) throw NumericDomainError("peak must be positive");
        return *opts.peak;
    }
    return bounding_box(ref).diagonal();
}

// Squared nearest-neighbour distance from each source point into `target`.
inline std::vector<double> point_to_point_errors(const PointCloud& source, const KdTree& target, unsigned threads = 0) {
    std::vector<double> out(source.size());
    detail::parallel_for(source.size(), threads,
                         [&](std::size_t i) { out[i] = target.nearest(source.positions[i]).squared_distance; });
    return out;
}

// Squared projection of (source point - nearest target point) on the target
// point's normal.
inline std::vector<double> point_to_plane_errors(const PointCloud& source, const PointCloud& target,
                                                 const KdTree& target_index, unsigned threads = 0) {
    if (!target.normals) throw ValidationError("point-to-plane needs normals on the target cloud");
    std::vector<double> out(source.size());
    detail::parallel_for(source.size(), threads, [&](std::size_t i) {
        const auto nn = target_index.nearest(source.positions[i]);
        const double proj = dot(source.positions[i] - target.positions[nn.index], (*target.normals)[nn.index]);
        out[i] = proj * proj;
    });
    return out;
}

namespace detail {

inline GeometryReport finish_report(std::optional<DirectionalError> ab, std::optional<DirectionalError> ba,
                                    double peak) {
    GeometryReport r;
    r.ab = ab;
    r.ba = ba;
    r.peak = peak;
    double max_sq = 0.0;
    for (const auto& d : {ab, ba}) {
        if (!d) continue;
        r.mse_sym = std::max(r.mse_sym, d->mse);
        max_sq = std::max(max_sq, d->max_squared);
    }
    r.hausdorff_sym = std::sqrt(max_sq);
    r.psnr_mse = psnr(r.mse_sym, peak);
    r.psnr_hausdorff = psnr(max_sq, peak);
    return r;
}

}  // namespace detail

inline GeometryReport p2point(const PointCloud& ref, const PointCloud& deg, const GeometryOptions& opts = {}) {
    detail::require_points(ref, "reference");
    detail::require_points(deg, "degraded");
    const KdTree ref_index(ref.positions), deg_index(deg.positions);
    const auto ab = point_to_point_errors(ref, deg_index, opts.threads);
    const auto ba = point_to_point_errors(deg, ref_index, opts.threads);
    return detail::finish_report(detail::reduce(ab), detail::reduce(ba), resolve_peak(ref, opts));
}

// The reference must carry normals. The ab direction needs normals on the
// degraded cloud; without them it is left empty and the symmetric values use
// the ba direction alone.
inline GeometryReport p2plane(const PointCloud& ref, const PointCloud& deg, const GeometryOptions& opts = {}) {
    detail::require_points(ref, "reference");
    detail::require_points(deg, "degraded");
    if (!ref.normals) throw ValidationError("point-to-plane needs normals on the reference cloud");
    const KdTree ref_index(ref.positions);
    const auto ba = point_to_plane_errors(deg, ref, ref_index, opts.threads);
    std::optional<DirectionalError> ab;
    if (deg.normals) {
        const KdTree deg_index(deg.positions);
        const auto errors = point_to_plane_errors(ref, deg, deg_index, opts.threads);
        ab = detail::reduce(errors);
    }
    return detail::finish_report(ab, detail::reduce(ba), resolve_peak(ref, opts));
}

// ---------------------------------------------------------------------------
// Colour

struct Yuv {
    double y = 0.0, u = 0.0, v = 0.0;
};

// ITU-R BT.709 luma/chroma at 8-bit limited range (Y in [16, 235], Cb/Cr in
// [16, 240]), kept in floating point.
inline Yuv rgb_to_yuv_bt709(const Rgb& rgb) {
    constexpr double kr = 0.2126, kb = 0.0722, kg = 1.0 - kr - kb;
    const double r = rgb[0], g = rgb[1], b = rgb[2];
    const double luma = kr * r + kg * g + kb * b;
    return {16.0 + 219.0 / 255.0 * luma, 128.0 + 224.0 / 255.0 * (b - luma) / (2.0 * (1.0 - kb)),
            128.0 + 224.0 / 255.0 * (r - luma) / (2.0 * (1.0 - kr))};
}

// (6 Y + U + V) / 8 over the finite channels, weights renormalized; +inf
// only when every channel is infinite.
inline double combine_yuv_psnr(double y, double u, double v) {
    const double psnrs[] = {y, u, v};
    const double weights[] = {6.0, 1.0, 1.0};
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (std::isinf(psnrs[k])) continue;
        num += weights[k] * psnrs[k];
        den += weights[k];
    }
    return den == 0.0 ? kInfinitePsnr : num / den;
}

// Per-channel PSNR (peak 255) between matched colour pairs.
inline ColorReport yuv_psnr(std::span<const Yuv> reference, std::span<const Yuv> degraded) {
    if (reference.size() != degraded.size() || reference.empty()) {
        throw NumericDomainError("colour PSNR needs equally sized, non-empty colour lists");
    }
    ColorReport r;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double dy = degraded[i].y - reference[i].y;
        const double du = degraded[i].u - reference[i].u;
        const double dv = degraded[i].v - reference[i].v;
        r.mse_y += dy * dy;
        r.mse_u += du * du;
        r.mse_v += dv * dv;
    }
    const auto n = static_cast<double>(reference.size());
    r.mse_y /= n;
    r.mse_u /= n;
    r.mse_v /= n;
    r.psnr_y = psnr(r.mse_y, 255.0);
    r.psnr_u = psnr(r.mse_u, 255.0);
    r.psnr_v = psnr(r.mse_v, 255.0);
    r.psnr_yuv = combine_yuv_psnr(r.psnr_y, r.psnr_u, r.psnr_v);
    return r;
}

// Each degraded point takes the colour of its nearest reference point as the
// reference colour.
inline ColorReport psnr_yuv(const PointCloud& ref, const PointCloud& deg, const GeometryOptions& opts = {}) {
    detail::require_points(ref, "reference");
    detail::require_points(deg, "degraded");
    if (!ref.colors || !deg.colors) throw ValidationError("PSNR-YUV needs colors on both clouds");
    const KdTree ref_index(ref.positions);
    std::vector<Yuv> matched(deg.size()), observed(deg.size());
    detail::parallel_for(deg.size(), opts.threads, [&](std::size_t i) {
        const auto nn = ref_index.nearest(deg.positions[i]);
        matched[i] = rgb_to_yuv_bt709((*ref.colors)[nn.index]);
        observed[i] = rgb_to_yuv_bt709((*deg.colors)[i]);
    });
    return yuv_psnr(matched, observed);
}

}  // namespace pcqa
