#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "planreg/relaxation.hpp"

using namespace planreg;
constexpr double kPi = std::numbers::pi;

TEST(Trapezoid, ZeroWidthCollapses) {
    const Trapezoid t = build_trapezoid(0.7, 0.7);
    for (const Point2& v : t.vertices) {
        EXPECT_NEAR(v.x, std::cos(0.7), 1e-15);
        EXPECT_NEAR(v.y, std::sin(0.7), 1e-15);
    }
}

TEST(Trapezoid, QuarterCircle) {
    const Trapezoid t = build_trapezoid(0, kPi / 2);
    const double s2 = std::sqrt(2.0);
    const Point2 expect[4] = {{1, 0}, {s2, 0}, {0, s2}, {0, 1}};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(t.vertices[k].x, expect[k].x, 1e-12);
        EXPECT_NEAR(t.vertices[k].y, expect[k].y, 1e-12);
    }
    // The chord's midpoint is the trapezoid point farthest from the arc.
    const Point2 mid = 0.5 * (t.vertices[0] + t.vertices[3]);
    EXPECT_NEAR(1.0 - norm(mid), 1.0 - std::cos(kPi / 4), 1e-12);
    EXPECT_NEAR(1.0 - std::cos(kPi / 4), 0.2929, 1e-4);
}

TEST(Trapezoid, ContainsItsArc) {
    for (auto [a, b] : {std::pair{0.3, 0.7}, std::pair{-1.0, 0.4}, std::pair{2.0, 4.9}, std::pair{5.0, 5.0}}) {
        const Trapezoid t = build_trapezoid(a, b);
        for (int k = 0; k <= 1000; ++k) {
            const double th = a + (b - a) * k / 1000.0;
            EXPECT_TRUE(t.contains({std::cos(th), std::sin(th)}, 1e-12)) << a << ' ' << b << ' ' << th;
        }
    }
}

TEST(Trapezoid, RejectsWidthFromPi) {
    EXPECT_THROW(build_trapezoid(0, kPi), std::invalid_argument);
    EXPECT_THROW(build_trapezoid(1, 0.5), std::invalid_argument);
}

TEST(LinearizedDist, ExactAtExpansionPoint) {
    const LinearizationPoint lin{{0.3, -0.2}, std::cos(0.4), std::sin(0.4)};
    const Point2 p{1.5, 2}, q{-1, 0.5};
    EXPECT_EQ(linearized_dist(p, q, lin, lin.point()), relaxed_sq_dist(p, q, lin.point()));
    const RigidTransform2 t{lin.z0, 0.4};
    EXPECT_NEAR(relaxed_sq_dist(p, q, lin.point()), squared_norm(apply_transform(t, p) - q), 1e-12);
}

TEST(LinearizedDist, UnderestimatesEverywhere) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 2000; ++k) {
        const LinearizationPoint lin{{u(rng), u(rng)}, u(rng), u(rng)};
        const RelaxedPoint at{{u(rng), u(rng)}, u(rng), u(rng)};
        const Point2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
        const double exact = relaxed_sq_dist(p, q, at);
        EXPECT_LE(linearized_dist(p, q, lin, at), exact + 1e-12 * std::max(1.0, exact));
    }
}

TEST(LinearizedDist, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    const double h = 1e-6;
    for (int k = 0; k < 20; ++k) {
        const LinearizationPoint lin{{u(rng), u(rng)}, u(rng), u(rng)};
        const Point2 p{u(rng), u(rng)}, q{u(rng), u(rng)};
        const LinearizedDistance f(p, q, lin);
        for (int axis = 0; axis < 4; ++axis) {
            RelaxedPoint plus = lin.point(), minus = lin.point();
            double* fields_p[4] = {&plus.z.x, &plus.z.y, &plus.c, &plus.s};
            double* fields_m[4] = {&minus.z.x, &minus.z.y, &minus.c, &minus.s};
            *fields_p[axis] += h;
            *fields_m[axis] -= h;
            const double fd = (relaxed_sq_dist(p, q, plus) - relaxed_sq_dist(p, q, minus)) / (2 * h);
            EXPECT_LT(std::abs(fd - f.g[axis]), 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(RelaxationVertices, SixteenDistinctCorners) {
    const TransformBox b{{0, 1}, {2, 3}, 0.2, 0.6};
    const auto v = relaxation_vertices(b);
    EXPECT_EQ(v.size(), 16u);
    const Trapezoid t = build_trapezoid(0.2, 0.6);
    for (const RelaxedPoint& x : v) {
        EXPECT_TRUE(x.z.x == 0 || x.z.x == 2);
        EXPECT_TRUE(x.z.y == 1 || x.z.y == 3);
        EXPECT_TRUE(t.contains({x.c, x.s}, 1e-12));
    }
}

// Linear functions on the polytope reach their minimum at a vertex.
TEST(RelaxationVertices, VertexMinimumBeatsDenseSampling) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1), w(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = 3 * u(rng), width = 1.4 * w(rng);
        const TransformBox b{{u(rng), u(rng)}, {2, 2}, a, a + width};
        const double g[4] = {u(rng), u(rng), u(rng), u(rng)};
        auto f = [&](const RelaxedPoint& x) { return g[0] * x.z.x + g[1] * x.z.y + g[2] * x.c + g[3] * x.s; };
        double vmin = std::numeric_limits<double>::infinity();
        for (const RelaxedPoint& x : relaxation_vertices(b)) vmin = std::min(vmin, f(x));
        const Trapezoid t = build_trapezoid(b.theta_min, b.theta_max);
        for (int k = 0; k < 2000; ++k) {
            // Convex combination of the four trapezoid vertices.
            double l[4], s = 0;
            for (double& x : l) s += (x = -std::log(w(rng) + 1e-300));
            Point2 cs{0, 0};
            for (int j = 0; j < 4; ++j) cs = cs + (l[j] / s) * t.vertices[j];
            const RelaxedPoint x{{b.z_min.x + (b.z_max.x - b.z_min.x) * w(rng), b.z_min.y + (b.z_max.y - b.z_min.y) * w(rng)},
                                 cs.x,
                                 cs.y};
            EXPECT_GE(f(x), vmin - 1e-12);
        }
    }
}

TEST(RelaxationBound, Preconditions) {
    const PointSet s({{1, 0}, {0, 1}});
    const TransformBox wide{{0, 0}, {0.1, 0.1}, 0, 2.0};
    const QueueSet qs = init_queues(wide, s, s);
    EXPECT_THROW(relaxation_bound(wide, qs, s, s, TrimConfig{2}), std::invalid_argument);
    const TransformBox ok{{0, 0}, {0.1, 0.1}, 0, 0.1};
    const QueueSet one(1, init_queue(ok, s[0], s));
    EXPECT_THROW(relaxation_bound(ok, one, s, s, TrimConfig{2}), std::invalid_argument);
}

TEST(RelaxationBound, ExactOnDegenerateBox) {
    std::mt19937_64 rng(4);
    const PointSet src = oracle::random_points(10, -5, 5, rng);
    const PointSet dest = oracle::random_points(12, -5, 5, rng);
    const RigidTransform2 t{{0.4, -1.1}, 2.2};
    const TransformBox b{t.z, t.z, t.theta, t.theta};
    const TrimConfig trim{8};
    const double f = trimmed_objective(t, src, dest, trim);
    EXPECT_NEAR(relaxation_bound(b, init_queues(b, src, dest), src, dest, trim), f, 1e-9 * std::max(1.0, f));
}

TEST(RelaxationBound, SoundOnSmallBoxes) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-8, 8), a(0, kTwoPi);
    for (int trial = 0; trial < 20; ++trial) {
        const PointSet src = oracle::random_points(10, -5, 5, rng);
        const PointSet dest = oracle::random_points(10, -5, 5, rng);
        const Point2 z{u(rng), u(rng)};
        const double th = a(rng);
        const TransformBox b{z, {z.x + 0.1, z.y + 0.07}, th, th + 0.02};
        const TrimConfig trim{8};
        const double phi = relaxation_bound(b, init_queues(b, src, dest), src, dest, trim);
        const double best =
            oracle::sampled_box_min(b, oracle::points_of(src), oracle::points_of(dest), trim.p, 10000, rng);
        EXPECT_LE(phi, best + 1e-12 * std::max(1.0, best));
    }
}

// Near a fixed transform the relaxation gap falls roughly fourfold per halving and overtakes
// the cheap bound.
TEST(RelaxationBound, TighterThanCheapBoundOnSmallBoxes) {
    std::mt19937_64 rng(6);
    const PointSet src = oracle::random_points(15, -5, 5, rng);
    const PointSet dest = oracle::random_points(15, -5, 5, rng);
    const TrimConfig trim{12};
    const RigidTransform2 c{{0.3, 0.2}, 0.5};
    double half = 0.02;
    for (int k = 0; k < 4; ++k, half *= 0.5) {
        const TransformBox b{{c.z.x - half, c.z.y - half}, {c.z.x + half, c.z.y + half}, c.theta - half / 5,
                             c.theta + half / 5};
        const QueueSet qs = init_queues(b, src, dest);
        EXPECT_GT(relaxation_bound(b, qs, src, dest, trim), cheap_bound(qs, trim));
    }
}
