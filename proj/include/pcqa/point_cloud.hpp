#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcqa/error.hpp"

namespace pcqa {

using Vec3 = std::array<double, 3>;
using Rgb = std::array<std::uint8_t, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v[0], s * v[1], s * v[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double squared_norm(const Vec3& v) { return dot(v, v); }
inline double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }

struct PointCloud {
    std::vector<Vec3> positions;
    std::optional<std::vector<Vec3>> normals;
    std::optional<std::vector<Rgb>> colors;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    bool has_normals() const { return normals.has_value(); }
    bool has_colors() const { return colors.has_value(); }

    friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

inline constexpr double kNormalTolerance = 1e-3;

// Count agreement and unit-length normals.
inline void validate(const PointCloud& cloud) {
    if (cloud.normals) {
        if (cloud.normals->size() != cloud.size()) {
            throw ValidationError("normal count " + std::to_string(cloud.normals->size()) +
                                  " does not match point count " + std::to_string(cloud.size()));
        }
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double len = std::sqrt(squared_norm((*cloud.normals)[i]));
            if (std::abs(len - 1.0) > kNormalTolerance) {
                throw ValidationError("normal of point " + std::to_string(i) + " has length " + std::to_string(len));
            }
        }
    }
    if (cloud.colors && cloud.colors->size() != cloud.size()) {
        throw ValidationError("color count " + std::to_string(cloud.colors->size()) + " does not match point count " +
                              std::to_string(cloud.size()));
    }
}

struct BoundingBox {
    Vec3 min{};
    Vec3 max{};

    double diagonal() const { return std::sqrt(squared_distance(min, max)); }
};

inline BoundingBox bounding_box(const PointCloud& cloud) {
    if (cloud.empty()) throw NumericDomainError("bounding box of an empty cloud");
    BoundingBox box{cloud.positions.front(), cloud.positions.front()};
    for (const auto& p : cloud.positions) {
        for (int k = 0; k < 3; ++k) {
            box.min[k] = std::fmin(box.min[k], p[k]);
            box.max[k] = std::fmax(box.max[k], p[k]);
        }
    }
    return box;
}

}  // namespace pcqa
