#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "planreg/geometry.hpp"
#include "planreg/objective.hpp"
#include "planreg/queue.hpp"

namespace planreg {

// A point of the relaxed parameter space: translation z and the unconstrained pair
// (c, s) standing in for (cos theta, sin theta).
struct RelaxedPoint {
    Point2 z;
    double c = 1.0;
    double s = 0.0;
};

// Expansion point of the linearized distances; the box center by default.
struct LinearizationPoint {
    Point2 z0;
    double c0 = 1.0;
    double s0 = 0.0;

    static LinearizationPoint center_of(const TransformBox& b) {
        const BoxCenter ctr = box_center(b);
        return {ctr.z, std::cos(ctr.theta), std::sin(ctr.theta)};
    }

    RelaxedPoint point() const { return {z0, c0, s0}; }
};

// ||[c -s; s c] p + z - q||^2
inline double relaxed_sq_dist(Point2 p, Point2 q, const RelaxedPoint& x) {
    const double rx = x.c * p.x - x.s * p.y + x.z.x - q.x;
    const double ry = x.s * p.x + x.c * p.y + x.z.y - q.y;
    return rx * rx + ry * ry;
}

// First-order expansion of relaxed_sq_dist(p, q, .) around a linearization point x0:
//   value(x) = f0 + g . (x - x0)
struct LinearizedDistance {
    double f0 = 0.0;
    std::array<double, 4> g{};  // d/dzx, d/dzy, d/dc, d/ds

    LinearizedDistance(Point2 p, Point2 q, const LinearizationPoint& lin) {
        const double rx = lin.c0 * p.x - lin.s0 * p.y + lin.z0.x - q.x;
        const double ry = lin.s0 * p.x + lin.c0 * p.y + lin.z0.y - q.y;
        f0 = rx * rx + ry * ry;
        g = {2.0 * rx, 2.0 * ry, 2.0 * (rx * p.x + ry * p.y), 2.0 * (ry * p.x - rx * p.y)};
    }

    // `offset` is x - x0.
    double at_offset(const std::array<double, 4>& offset) const {
        return f0 + g[0] * offset[0] + g[1] * offset[1] + g[2] * offset[2] + g[3] * offset[3];
    }
};

inline std::array<double, 4> offset_from(const LinearizationPoint& lin, const RelaxedPoint& x) {
    return {x.z.x - lin.z0.x, x.z.y - lin.z0.y, x.c - lin.c0, x.s - lin.s0};
}

inline double linearized_dist(Point2 p, Point2 q, const LinearizationPoint& lin, const RelaxedPoint& at) {
    return LinearizedDistance(p, q, lin).at_offset(offset_from(lin, at));
}

// Isosceles trapezoid enclosing the unit arc {(cos t, sin t) | t in [theta_min, theta_max]}.
// The inner side is the chord between the arc endpoints; the outer side lies on the tangent at
// the mid angle. Vertices are counter-clockwise: inner start, outer start, outer end, inner end.
struct Trapezoid {
    std::array<Point2, 4> vertices;

    // Half-plane test with absolute slack `tol`.
    bool contains(Point2 v, double tol = 0.0) const {
        for (std::size_t k = 0; k < 4; ++k) {
            const Point2 a = vertices[k];
            const Point2 b = vertices[(k + 1) % 4];
            const Point2 e = b - a;
            const double len = norm(e);
            if (len == 0.0) continue;
            if (cross(e, v - a) / len < -tol) return false;
        }
        return true;
    }
};

inline Trapezoid build_trapezoid(double theta_min, double theta_max) {
    const double width = theta_max - theta_min;
    if (!(width >= 0.0 && width < std::numbers::pi))
        throw std::invalid_argument("build_trapezoid: angular width must lie in [0, pi)");
    const Point2 a{std::cos(theta_min), std::sin(theta_min)};
    const Point2 b{std::cos(theta_max), std::sin(theta_max)};
    const double k = 1.0 / std::cos(0.5 * width);
    return {{a, k * a, k * b, b}};
}

// The 16 vertices of [z_min, z_max] x trapezoid.
inline std::array<RelaxedPoint, 16> relaxation_vertices(const TransformBox& b) {
    const Trapezoid trap = build_trapezoid(b.theta_min, b.theta_max);
    const std::array<Point2, 4> corners{b.z_min, Point2{b.z_max.x, b.z_min.y}, b.z_max,
                                        Point2{b.z_min.x, b.z_max.y}};
    std::array<RelaxedPoint, 16> out;
    std::size_t k = 0;
    for (Point2 z : corners)
        for (Point2 cs : trap.vertices) out[k++] = {z, cs.x, cs.y};
    return out;
}

// Minimum over the relaxation polytope of the trimmed sum of linearized distances. The inner
// minimum for each source point ranges over the destinations still present in its queue.
// Requires an angular width below pi/2.
inline double relaxation_bound(const TransformBox& box, std::span<const CandidateQueue> queues,
                               const PointSet& src, const PointSet& dest, const TrimConfig& trim) {
    if (!(box.extent_theta() < 0.5 * std::numbers::pi))
        throw std::invalid_argument("relaxation_bound: angular width must be below pi/2");
    if (queues.size() != src.size()) throw std::invalid_argument("relaxation_bound: one queue per source point");
    trim.check(src.size());

    const LinearizationPoint lin = LinearizationPoint::center_of(box);
    const std::array<RelaxedPoint, 16> verts = relaxation_vertices(box);
    std::array<std::array<double, 4>, 16> offsets;
    for (std::size_t v = 0; v < verts.size(); ++v) offsets[v] = offset_from(lin, verts[v]);
    const std::size_t n = src.size();

    // best[v * n + i]: smallest linearized distance of source point i at vertex v
    std::vector<double> best(verts.size() * n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (const Candidate& c : queues[i].entries) {
            const LinearizedDistance f(src[i], dest[c.idx], lin);
            for (std::size_t v = 0; v < verts.size(); ++v) {
                double& slot = best[v * n + i];
                slot = std::min(slot, f.at_offset(offsets[v]));
            }
        }
    }

    double bound = std::numeric_limits<double>::infinity();
    std::vector<double> column(n);
    for (std::size_t v = 0; v < verts.size(); ++v) {
        std::copy_n(best.begin() + static_cast<std::ptrdiff_t>(v * n), n, column.begin());
        bound = std::min(bound, sum_smallest(column, trim.p));
    }
    return bound;
}

}  // namespace planreg
