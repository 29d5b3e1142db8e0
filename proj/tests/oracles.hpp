#pragma once

// Reference implementations used only by the tests. They share no code with the library beyond
// the plain value types, and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "planreg/planreg.hpp"

namespace oracle {

using planreg::Point2;

inline double sq(double v) { return v * v; }

inline Point2 arc_point(double r, double t) { return {r * std::cos(t), r * std::sin(t)}; }

inline Point2 clamp_to_rect(Point2 v, const planreg::Rect& rc) {
    return {std::clamp(v.x, rc.lo.x, rc.hi.x), std::clamp(v.y, rc.lo.y, rc.hi.y)};
}

inline double sq_dist(Point2 a, Point2 b) { return sq(a.x - b.x) + sq(a.y - b.y); }

// Dense 1D search over the arc parameter: a coarse uniform pass (endpoints included) followed by
// a fine pass around the best coarse sample.
template <class F>
double extremum_over_arc(double t0, double t1, std::size_t samples, F f, bool want_min) {
    auto better = [want_min](double a, double b) { return want_min ? a < b : a > b; };
    double best = f(t0);
    std::size_t best_k = 0;
    const double h = samples > 1 ? (t1 - t0) / static_cast<double>(samples - 1) : 0.0;
    for (std::size_t k = 1; k < samples; ++k) {
        const double t = k + 1 == samples ? t1 : t0 + h * static_cast<double>(k);
        const double v = f(t);
        if (better(v, best)) {
            best = v;
            best_k = k;
        }
    }
    if (h > 0.0) {
        const double lo = std::max(t0, t0 + h * (static_cast<double>(best_k) - 1.0));
        const double hi = std::min(t1, t0 + h * (static_cast<double>(best_k) + 1.0));
        const std::size_t fine = 2000;
        for (std::size_t k = 0; k <= fine; ++k) {
            const double v = f(lo + (hi - lo) * static_cast<double>(k) / fine);
            if (better(v, best)) best = v;
        }
    }
    return best;
}

// Squared minimum distance between the arc and the rectangle, from above.
inline double arc_rect_min(const planreg::Arc& a, const planreg::Rect& rc, std::size_t samples = 100000) {
    return extremum_over_arc(
        a.theta_min, a.theta_max, samples,
        [&](double t) {
            const Point2 u = arc_point(a.radius, t);
            return sq_dist(u, clamp_to_rect(u, rc));
        },
        true);
}

// Squared maximum distance between the arc and the rectangle, from below. The farthest point of
// a rectangle from any point is one of its vertices.
inline double arc_rect_max(const planreg::Arc& a, const planreg::Rect& rc, std::size_t samples = 100000) {
    const Point2 verts[4] = {rc.lo, {rc.hi.x, rc.lo.y}, rc.hi, {rc.lo.x, rc.hi.y}};
    return extremum_over_arc(
        a.theta_min, a.theta_max, samples,
        [&](double t) {
            const Point2 u = arc_point(a.radius, t);
            double m = 0.0;
            for (Point2 v : verts) m = std::max(m, sq_dist(u, v));
            return m;
        },
        false);
}

inline Point2 transform(double zx, double zy, double th, Point2 p) {
    return {std::cos(th) * p.x - std::sin(th) * p.y + zx, std::sin(th) * p.x + std::cos(th) * p.y + zy};
}

// Exhaustive nearest neighbour: (squared distance, index), smallest index on ties.
inline std::pair<double, std::size_t> nearest(Point2 x, const std::vector<Point2>& dest) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (std::size_t j = 0; j < dest.size(); ++j) {
        const double d = sq_dist(x, dest[j]);
        if (d < best) {
            best = d;
            idx = j;
        }
    }
    return {best, idx};
}

// Sort all residuals and add the first p.
inline double trimmed(double zx, double zy, double th, const std::vector<Point2>& src,
                      const std::vector<Point2>& dest, std::size_t p) {
    std::vector<double> r;
    for (Point2 s : src) r.push_back(nearest(transform(zx, zy, th, s), dest).first);
    std::sort(r.begin(), r.end());
    double sum = 0.0;
    for (std::size_t k = 0; k < p; ++k) sum += r[k];
    return sum;
}

inline std::vector<Point2> points_of(const planreg::PointSet& s) { return {s.begin(), s.end()}; }

// Minimum of the trimmed objective over `samples` uniform transforms in the box plus its eight
// corners and center.
template <class Rng>
double sampled_box_min(const planreg::TransformBox& b, const std::vector<Point2>& src,
                       const std::vector<Point2>& dest, std::size_t p, std::size_t samples, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto lerp = [](double lo, double hi, double t) { return lo + (hi - lo) * t; };
    double best = trimmed(lerp(b.z_min.x, b.z_max.x, 0.5), lerp(b.z_min.y, b.z_max.y, 0.5),
                          lerp(b.theta_min, b.theta_max, 0.5), src, dest, p);
    for (int c = 0; c < 8; ++c)
        best = std::min(best, trimmed(c & 1 ? b.z_max.x : b.z_min.x, c & 2 ? b.z_max.y : b.z_min.y,
                                      c & 4 ? b.theta_max : b.theta_min, src, dest, p));
    for (std::size_t k = 0; k < samples; ++k)
        best = std::min(best, trimmed(lerp(b.z_min.x, b.z_max.x, u(rng)), lerp(b.z_min.y, b.z_max.y, u(rng)),
                                      lerp(b.theta_min, b.theta_max, u(rng)), src, dest, p));
    return best;
}

// Minimum over the centers of a cells^3 grid on the box, and an upper bound on how far that grid
// minimum can sit above the true minimum: within a half cell each residual distance moves by at
// most |dz| + |P| |dtheta|.
struct GridResult {
    double min = std::numeric_limits<double>::infinity();
    double error_bound = 0.0;
};

inline GridResult grid_search(const planreg::TransformBox& b, const std::vector<Point2>& src,
                              const std::vector<Point2>& dest, std::size_t p, std::size_t cells) {
    GridResult g;
    const double hx = (b.z_max.x - b.z_min.x) / static_cast<double>(cells);
    const double hy = (b.z_max.y - b.z_min.y) / static_cast<double>(cells);
    const double ht = (b.theta_max - b.theta_min) / static_cast<double>(cells);
    for (std::size_t a = 0; a < cells; ++a)
        for (std::size_t c = 0; c < cells; ++c)
            for (std::size_t t = 0; t < cells; ++t)
                g.min = std::min(g.min, trimmed(b.z_min.x + (a + 0.5) * hx, b.z_min.y + (c + 0.5) * hy,
                                                b.theta_min + (t + 0.5) * ht, src, dest, p));

    // Largest possible residual distance anywhere in the box, per source point.
    std::vector<double> shift;
    for (Point2 s : src) {
        const double r = std::hypot(s.x, s.y);
        const double h = 0.5 * std::hypot(hx, hy) + r * 0.5 * ht;
        double far = 0.0;
        for (Point2 q : dest) {
            const double zx = std::max(std::abs(q.x - b.z_min.x), std::abs(q.x - b.z_max.x));
            const double zy = std::max(std::abs(q.y - b.z_min.y), std::abs(q.y - b.z_max.y));
            far = std::max(far, r + std::hypot(zx, zy));
        }
        shift.push_back(2.0 * far * h + h * h);
    }
    std::sort(shift.rbegin(), shift.rend());
    for (std::size_t k = 0; k < p; ++k) g.error_bound += shift[k];
    return g;
}

// Minimum of d_min over all destinations, recomputed from scratch.
inline double fresh_head(const planreg::TransformBox& b, Point2 p, const planreg::PointSet& dest) {
    double best = std::numeric_limits<double>::infinity();
    const planreg::Arc arc = planreg::Arc::of_point(p, b.theta_min, b.theta_max);
    for (const Point2& q : dest) best = std::min(best, planreg::arc_rect_dist_min(arc, planreg::translation_rect(b, q)));
    return best;
}

template <class Rng>
planreg::PointSet random_points(std::size_t n, double lo, double hi, Rng& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Point2> pts(n);
    for (Point2& p : pts) p = {u(rng), u(rng)};
    return planreg::PointSet(std::move(pts));
}

// Random sub-box of `outer` with each side a random fraction of the original.
template <class Rng>
planreg::TransformBox random_sub_box(const planreg::TransformBox& outer, double max_fraction, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto side = [&](double lo, double hi, double& out_lo, double& out_hi) {
        const double len = (hi - lo) * max_fraction * u(rng);
        out_lo = lo + (hi - lo - len) * u(rng);
        out_hi = out_lo + len;
    };
    planreg::TransformBox b;
    side(outer.z_min.x, outer.z_max.x, b.z_min.x, b.z_max.x);
    side(outer.z_min.y, outer.z_max.y, b.z_min.y, b.z_max.y);
    side(outer.theta_min, outer.theta_max, b.theta_min, b.theta_max);
    return b;
}

}  // namespace oracle
