#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "planreg/geometry.hpp"

namespace planreg {

// T_x(z, theta) = R(theta) x + z
struct RigidTransform2 {
    Point2 z;
    double theta = 0.0;

    static RigidTransform2 identity() { return {}; }

    friend bool operator==(const RigidTransform2&, const RigidTransform2&) = default;
};

inline Point2 apply_transform(const RigidTransform2& t, Point2 x) { return Rotation(t.theta) * x + t.z; }

// a then b: x -> b(a(x))
inline RigidTransform2 compose(const RigidTransform2& b, const RigidTransform2& a) {
    return {Rotation(b.theta) * a.z + b.z, b.theta + a.theta};
}

inline RigidTransform2 inverse(const RigidTransform2& t) {
    return {-(Rotation(-t.theta) * t.z), -t.theta};
}

// Absolute angular difference folded into [0, pi].
inline double angle_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return d > std::numbers::pi ? kTwoPi - d : d;
}

class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::vector<Point2> points) : points_(std::move(points)) {
        if (points_.empty()) throw std::invalid_argument("PointSet: must contain at least one point");
        for (const Point2& p : points_)
            if (!is_finite(p)) throw std::invalid_argument("PointSet: non-finite coordinate");
    }

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const Point2& operator[](std::size_t i) const { return points_[i]; }
    std::span<const Point2> points() const { return points_; }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    // Largest distance of any point from the origin.
    double max_norm() const {
        double r = 0.0;
        for (const Point2& p : points_) r = std::max(r, norm(p));
        return r;
    }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::vector<Point2> points_;
};

// Number of residuals kept in the trimmed sum.
struct TrimConfig {
    std::size_t p = 1;

    // ceil(fraction * n), clamped to [1, n]. A 1e-9 slack absorbs representation error in the
    // fraction so that e.g. 0.1 * 70 counts as 7.
    static TrimConfig from_fraction(double fraction, std::size_t n) {
        if (!(fraction > 0.0 && fraction <= 1.0))
            throw std::invalid_argument("TrimConfig: fraction must lie in (0, 1]");
        return {std::clamp<std::size_t>(ceil_count(fraction, n), 1, n)};
    }

    static std::size_t ceil_count(double fraction, std::size_t n) {
        return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    }

    void check(std::size_t n) const {
        if (p < 1 || p > n)
            throw std::out_of_range("TrimConfig: p = " + std::to_string(p) + " outside [1, " +
                                    std::to_string(n) + "]");
    }
};

struct NearestResult {
    double sq_dist = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
};

// Brute-force nearest destination; the smallest index wins ties.
inline NearestResult point_to_set_sq(const RigidTransform2& t, Point2 x, const PointSet& dest) {
    const Point2 y = apply_transform(t, x);
    NearestResult best;
    for (std::size_t j = 0; j < dest.size(); ++j) {
        const double d = squared_norm(y - dest[j]);
        if (d < best.sq_dist) best = {d, j};
    }
    return best;
}

// Sum of the p smallest values, accumulated in ascending order. Reorders `values`.
inline double sum_smallest(std::vector<double>& values, std::size_t p) {
    std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(p), values.end());
    return std::accumulate(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(p), 0.0);
}

inline std::vector<double> residuals(const RigidTransform2& t, const PointSet& src, const PointSet& dest) {
    std::vector<double> r(src.size());
    const Rotation rot(t.theta);
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Point2 y = rot * src[i] + t.z;
        double best = std::numeric_limits<double>::infinity();
        for (const Point2& q : dest) best = std::min(best, squared_norm(y - q));
        r[i] = best;
    }
    return r;
}

inline double trimmed_objective(const RigidTransform2& t, const PointSet& src, const PointSet& dest,
                                const TrimConfig& trim) {
    trim.check(src.size());
    std::vector<double> r = residuals(t, src, dest);
    return sum_smallest(r, trim.p);
}

// Indices of the p source points kept by the trimmed sum; residual ties prefer smaller indices.
inline std::vector<std::size_t> inlier_indices(const RigidTransform2& t, const PointSet& src,
                                               const PointSet& dest, const TrimConfig& trim) {
    trim.check(src.size());
    const std::vector<double> r = residuals(t, src, dest);
    std::vector<std::size_t> order(src.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
    order.resize(trim.p);
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace planreg
