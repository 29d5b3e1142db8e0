#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace planreg {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
    friend constexpr Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline bool is_finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

// Counter-clockwise rotation by theta.
class Rotation {
public:
    constexpr Rotation() = default;
    explicit Rotation(double theta) : theta_(theta), c_(std::cos(theta)), s_(std::sin(theta)) {}

    double theta() const { return theta_; }
    double cos() const { return c_; }
    double sin() const { return s_; }

    // Angle mapped into [0, 2*pi).
    double normalized() const {
        double t = std::fmod(theta_, kTwoPi);
        if (t < 0.0) t += kTwoPi;
        return t >= kTwoPi ? 0.0 : t;
    }

    Point2 operator*(Point2 p) const { return {c_ * p.x - s_ * p.y, s_ * p.x + c_ * p.y}; }

private:
    double theta_ = 0.0;
    double c_ = 1.0;
    double s_ = 0.0;
};

// Axis-aligned box in (z_x, z_y, theta) parameter space.
struct TransformBox {
    Point2 z_min;
    Point2 z_max;
    double theta_min = 0.0;
    double theta_max = 0.0;

    double extent_x() const { return z_max.x - z_min.x; }
    double extent_y() const { return z_max.y - z_min.y; }
    double extent_theta() const { return theta_max - theta_min; }

    bool valid() const {
        return is_finite(z_min) && is_finite(z_max) && std::isfinite(theta_min) &&
               std::isfinite(theta_max) && z_min.x <= z_max.x && z_min.y <= z_max.y &&
               theta_min <= theta_max && extent_theta() <= kTwoPi;
    }

    bool contains(Point2 z, double theta) const {
        return z_min.x <= z.x && z.x <= z_max.x && z_min.y <= z.y && z.y <= z_max.y &&
               theta_min <= theta && theta <= theta_max;
    }

    friend bool operator==(const TransformBox&, const TransformBox&) = default;
};

struct BoxCenter {
    Point2 z;
    double theta = 0.0;
};

// Euclidean norm of the extent vector; lengths and radians are mixed as-is.
inline double box_diameter(const TransformBox& b) {
    const double ex = b.extent_x();
    const double ey = b.extent_y();
    const double et = b.extent_theta();
    return std::sqrt(ex * ex + ey * ey + et * et);
}

inline BoxCenter box_center(const TransformBox& b) {
    return {{0.5 * (b.z_min.x + b.z_max.x), 0.5 * (b.z_min.y + b.z_max.y)},
            0.5 * (b.theta_min + b.theta_max)};
}

enum class SplitAxis { kX, kY, kTheta };

// Largest extent, with the angular extent expressed as arc length at radius angular_scale.
inline double box_largest_dimension(const TransformBox& b, double angular_scale) {
    return std::max({b.extent_x(), b.extent_y(), b.extent_theta() * angular_scale});
}

inline SplitAxis split_axis(const TransformBox& b, double angular_scale) {
    const double ex = b.extent_x();
    const double ey = b.extent_y();
    const double et = b.extent_theta() * angular_scale;
    if (ex >= ey && ex >= et) return SplitAxis::kX;
    if (ey >= et) return SplitAxis::kY;
    return SplitAxis::kTheta;
}

// Bisects the dimension of maximum effective length. Ties prefer x, then y, then theta.
inline std::pair<TransformBox, TransformBox> split_box(const TransformBox& b, double angular_scale) {
    if (!(angular_scale > 0.0)) throw std::invalid_argument("split_box: angular_scale must be positive");
    if (b.extent_x() <= 0.0 && b.extent_y() <= 0.0 && b.extent_theta() <= 0.0)
        throw std::invalid_argument("split_box: box is degenerate in every dimension");

    TransformBox lo = b;
    TransformBox hi = b;
    switch (split_axis(b, angular_scale)) {
        case SplitAxis::kX: {
            const double mid = 0.5 * (b.z_min.x + b.z_max.x);
            lo.z_max.x = mid;
            hi.z_min.x = mid;
            break;
        }
        case SplitAxis::kY: {
            const double mid = 0.5 * (b.z_min.y + b.z_max.y);
            lo.z_max.y = mid;
            hi.z_min.y = mid;
            break;
        }
        case SplitAxis::kTheta: {
            const double mid = 0.5 * (b.theta_min + b.theta_max);
            lo.theta_max = mid;
            hi.theta_min = mid;
            break;
        }
    }
    return {lo, hi};
}

// Circular arc centered at the origin, swept counter-clockwise from theta_min to theta_max.
struct Arc {
    double radius = 0.0;
    double theta_min = 0.0;
    double theta_max = 0.0;

    // The arc {R(theta) p | theta in [theta_min, theta_max]}.
    static Arc of_point(Point2 p, double theta_min, double theta_max) {
        const double phase = std::atan2(p.y, p.x);
        return {norm(p), phase + theta_min, phase + theta_max};
    }

    bool full_circle() const { return theta_max - theta_min >= kTwoPi; }
};

struct Rect {
    Point2 lo;
    Point2 hi;

    static Rect point(Point2 p) { return {p, p}; }

    bool contains(Point2 p) const { return lo.x <= p.x && p.x <= hi.x && lo.y <= p.y && p.y <= hi.y; }
    Point2 clamp(Point2 p) const { return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)}; }
    std::array<Point2, 4> vertices() const { return {lo, Point2{hi.x, lo.y}, hi, Point2{lo.x, hi.y}}; }
};

// Arc with cached endpoints, used by the distance routines. Directions are tested with sign
// comparisons on cross and dot products, so no angle wrapping is involved.
class PreparedArc {
public:
    explicit PreparedArc(const Arc& arc)
        : radius_(arc.radius),
          // Near-full arcs are widened to the full circle; this only lowers d_min and raises d_max.
          full_(arc.theta_max - arc.theta_min >= kTwoPi * (1.0 - 1e-12)),
          wide_(arc.theta_max - arc.theta_min >= std::numbers::pi),
          u0_{std::cos(arc.theta_min), std::sin(arc.theta_min)},
          u1_{std::cos(arc.theta_max), std::sin(arc.theta_max)},
          a0_(radius_ * u0_),
          a1_(radius_ * u1_) {}

    double radius() const { return radius_; }
    Point2 start() const { return a0_; }
    Point2 end() const { return a1_; }

    // True when the ray from the origin through v meets the arc.
    bool spans_direction(Point2 v) const {
        if (full_) return true;
        if (wide_) {
            // Complement arc is narrower than pi.
            return !(cross(u1_, v) > 0.0 && cross(v, u0_) > 0.0);
        }
        return cross(u0_, v) >= 0.0 && cross(v, u1_) >= 0.0 && dot(v, u0_ + u1_) > 0.0;
    }

    double min_sq_to_point(Point2 v) const {
        const double len = norm(v);
        if (len == 0.0) return radius_ * radius_;
        if (spans_direction(v)) {
            const double d = len - radius_;
            return d * d;
        }
        return std::min(squared_norm(v - a0_), squared_norm(v - a1_));
    }

    double max_sq_to_point(Point2 v) const {
        const double len = norm(v);
        if (len == 0.0) return radius_ * radius_;
        if (spans_direction(-v)) {
            const double d = len + radius_;
            return d * d;
        }
        return std::max(squared_norm(v - a0_), squared_norm(v - a1_));
    }

private:
    double radius_;
    bool full_;
    bool wide_;
    Point2 u0_;
    Point2 u1_;
    Point2 a0_;
    Point2 a1_;
};

namespace detail {

// Candidate distances along one axis-aligned edge that are not already covered by the
// rectangle vertices or the arc endpoints: the foot of the perpendicular from the origin and
// the crossings with the supporting circle. `fixed` is the constant coordinate of the edge,
// [lo, hi] its span on the other axis, and `vertical` selects x = fixed.
inline double edge_interior_min_sq(const PreparedArc& arc, double fixed, double lo, double hi, bool vertical) {
    auto make = [vertical, fixed](double t) { return vertical ? Point2{fixed, t} : Point2{t, fixed}; };
    double best = std::numeric_limits<double>::infinity();
    if (lo < 0.0 && 0.0 < hi) best = arc.min_sq_to_point(make(0.0));
    const double r = arc.radius();
    const double disc = r * r - fixed * fixed;
    if (disc >= 0.0) {
        const double t = std::sqrt(disc);
        for (double cand : {t, -t}) {
            if (lo <= cand && cand <= hi && arc.spans_direction(make(cand))) return 0.0;
        }
    }
    return best;
}

}  // namespace detail

inline double arc_rect_dist_min(const PreparedArc& arc, const Rect& rect) {
    // (a) an arc endpoint inside the rectangle
    if (rect.contains(arc.start()) || rect.contains(arc.end())) return 0.0;

    // (b) arc endpoint to rectangle
    double best = std::min(squared_norm(arc.start() - rect.clamp(arc.start())),
                           squared_norm(arc.end() - rect.clamp(arc.end())));
    // (c) rectangle vertex to arc
    for (Point2 v : rect.vertices()) best = std::min(best, arc.min_sq_to_point(v));
    if (best == 0.0) return 0.0;

    // (a)/(d) circle crossings and perpendicular feet on edge interiors. When every vertex lies
    // strictly inside the circle the rectangle cannot reach the arc and the feet are interior
    // maxima, but evaluating them is harmless.
    best = std::min(best, detail::edge_interior_min_sq(arc, rect.lo.x, rect.lo.y, rect.hi.y, true));
    best = std::min(best, detail::edge_interior_min_sq(arc, rect.hi.x, rect.lo.y, rect.hi.y, true));
    best = std::min(best, detail::edge_interior_min_sq(arc, rect.lo.y, rect.lo.x, rect.hi.x, false));
    best = std::min(best, detail::edge_interior_min_sq(arc, rect.hi.y, rect.lo.x, rect.hi.x, false));
    return best;
}

inline double arc_rect_dist_min(const Arc& arc, const Rect& rect) {
    return arc_rect_dist_min(PreparedArc(arc), rect);
}

inline double arc_rect_dist_max(const PreparedArc& arc, const Rect& rect) {
    double best = 0.0;
    for (Point2 v : rect.vertices()) best = std::max(best, arc.max_sq_to_point(v));
    return best;
}

inline double arc_rect_dist_max(const Arc& arc, const Rect& rect) {
    return arc_rect_dist_max(PreparedArc(arc), rect);
}

// Translations z in [z_min, z_max] move Q - z over this rectangle.
inline Rect translation_rect(const TransformBox& b, Point2 q) { return {q - b.z_max, q - b.z_min}; }

}  // namespace planreg
