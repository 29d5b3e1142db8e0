#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "planreg/workflow.hpp"

using namespace planreg;

namespace {

// Scans of one master set seen from known poses; pose v maps scan v coordinates to the world.
struct Scene {
    std::vector<RigidTransform2> poses;
    std::vector<std::optional<PointSet>> scans;
    std::vector<std::string> names;
};

Scene make_scene(std::size_t count, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::normal_distribution<double> noise(0, 1e-3);
    const PointSet master = oracle::random_points(n, -6, 6, rng);
    Scene s;
    for (std::size_t v = 0; v < count; ++v) {
        const RigidTransform2 pose = v == 0 ? RigidTransform2{} : RigidTransform2{{2 * u(rng), 2 * u(rng)}, u(rng)};
        const RigidTransform2 to_scan = inverse(pose);
        std::vector<Point2> pts;
        for (const Point2& m : master) {
            const Point2 p = apply_transform(to_scan, m);
            pts.push_back({p.x + noise(rng), p.y + noise(rng)});
        }
        s.poses.push_back(pose);
        s.scans.emplace_back(PointSet(std::move(pts)));
        s.names.push_back("scan" + std::to_string(v));
    }
    return s;
}

}  // namespace

TEST(BoundingRootBox, ContainsAligningTransforms) {
    const PointSet src({{1, 0}, {0, 2}}), dest({{5, 5}, {6, 7}});
    const TransformBox b = bounding_root_box(src, dest);
    EXPECT_EQ(b.z_min, (Point2{3, 3}));
    EXPECT_EQ(b.z_max, (Point2{8, 9}));
    EXPECT_EQ(b.theta_max - b.theta_min, kTwoPi);
}

TEST(Pairwise, RecoversRelativePosesAndComposesMap) {
    Scene s = make_scene(3, 25, 1);
    SolverConfig cfg;
    const PairwiseRun run = run_pairwise(s.scans, s.names, cfg, false, 2);
    ASSERT_EQ(run.pairs.size(), 3u);
    ASSERT_EQ(run.graph.graph.edges.size(), 3u);
    for (const PairOutcome& p : run.pairs) {
        ASSERT_TRUE(p.present);
        EXPECT_TRUE(p.result.certified);
        const RigidTransform2 truth = compose(inverse(s.poses[p.j]), s.poses[p.i]);
        EXPECT_LE(norm(p.result.transform.z - truth.z), 1e-2);
        EXPECT_LE(angle_distance(p.result.transform.theta, truth.theta), 1e-2);
    }
    const auto poses = compose_map(run.graph.graph, 0);
    for (std::size_t v = 0; v < 3; ++v) {
        EXPECT_LE(norm(poses[v].pose.z - s.poses[v].z), 1e-2);
        EXPECT_LE(angle_distance(poses[v].pose.theta, s.poses[v].theta), 1e-2);
    }

    std::vector<PointSet> scans;
    for (auto& x : s.scans) scans.push_back(*x);
    const auto layers = map_layers(scans, run.graph.graph, poses, 0, 0.8);
    ASSERT_EQ(layers.size(), 3u);
    for (const auto& l : layers) EXPECT_EQ(std::count(l.inlier.begin(), l.inlier.end(), true), 20);

    const Json report = run_report_json(run, cfg, s.names);
    EXPECT_EQ(report["pairs"].size(), 3u);
    EXPECT_TRUE(report["pairs"][0]["certified"].get<bool>());
}

TEST(Pairwise, IdenticalScansGiveIdentity) {
    Scene s = make_scene(1, 20, 2);
    s.scans.push_back(s.scans[0]);
    s.names.push_back("copy");
    const PairwiseRun run = run_pairwise(s.scans, s.names, SolverConfig{});
    ASSERT_EQ(run.pairs.size(), 1u);
    const SolveResult& r = run.pairs[0].result;
    EXPECT_LE(r.objective, 1e-9);
    EXPECT_LE(norm(r.transform.z), 1e-3);
    EXPECT_LE(angle_distance(r.transform.theta, 0), 1e-3);
}

TEST(Pairwise, UnreadableScanMarksPairsAbsent) {
    Scene s = make_scene(3, 15, 3);
    s.scans[1].reset();
    const PairwiseRun run = run_pairwise(s.scans, s.names, SolverConfig{});
    ASSERT_EQ(run.pairs.size(), 3u);
    EXPECT_FALSE(run.pairs[0].present);  // 0-1
    EXPECT_TRUE(run.pairs[1].present);   // 0-2
    EXPECT_FALSE(run.pairs[2].present);  // 1-2
    EXPECT_EQ(run.graph.graph.node_count, 2u);
    EXPECT_EQ(run.graph.scans, (std::vector<std::string>{"scan0", "scan2"}));
    ASSERT_EQ(run.graph.graph.edges.size(), 1u);
    EXPECT_EQ(run.graph.graph.edges[0].i, 0u);
    EXPECT_EQ(run.graph.graph.edges[0].j, 1u);
}

TEST(MapLayers, SingleScanIsAllInliers) {
    PoseGraph g;
    g.node_count = 1;
    const std::vector<PointSet> scans{PointSet({{0, 0}, {1, 0}})};
    const auto layers = map_layers(scans, g, compose_map(g, 0), 0, 0.5);
    ASSERT_EQ(layers.size(), 1u);
    EXPECT_EQ(layers[0].inlier, (std::vector<bool>{true, true}));
}
