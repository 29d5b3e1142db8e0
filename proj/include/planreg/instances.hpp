#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "planreg/geometry.hpp"
#include "planreg/objective.hpp"

namespace planreg {

struct InstanceSpec {
    std::size_t n = 50;
    double sigma = 1e-3;
    double outlier_fraction = 0.1;
    double coord_min = -10.0;
    double coord_max = 10.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("InstanceSpec: n must be at least 1");
        if (!(sigma >= 0.0)) throw std::invalid_argument("InstanceSpec: sigma must be non-negative");
        if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0))
            throw std::invalid_argument("InstanceSpec: outlier_fraction must lie in [0, 1]");
        if (!(coord_min < coord_max)) throw std::invalid_argument("InstanceSpec: empty coordinate range");
    }

    std::size_t outlier_count() const {
        return outlier_fraction == 0.0 ? 0 : std::min(n, TrimConfig::ceil_count(outlier_fraction, n));
    }

    // Smallest box guaranteed to contain the generating transform.
    TransformBox root_box() const { return {{coord_min, coord_min}, {coord_max, coord_max}, 0.0, kTwoPi}; }

    friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

struct Instance {
    InstanceSpec spec;
    PointSet src;
    PointSet dest;
    RigidTransform2 true_transform;
    std::vector<bool> outlier_mask;
};

// Q_i = T(P_i) + (1 - o_i) eta_i + o_i gamma_i with eta_i ~ N(0, sigma^2) and gamma_i uniform over
// the coordinate range, both drawn independently per axis.
inline Instance generate_instance(const InstanceSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coord(spec.coord_min, spec.coord_max);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::normal_distribution<double> noise(0.0, spec.sigma > 0.0 ? spec.sigma : 1.0);

    std::vector<Point2> src(spec.n);
    for (Point2& p : src) {
        p.x = coord(rng);
        p.y = coord(rng);
    }
    Instance inst;
    inst.spec = spec;
    inst.true_transform.z.x = coord(rng);
    inst.true_transform.z.y = coord(rng);
    inst.true_transform.theta = angle(rng);

    std::vector<std::size_t> order(spec.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    inst.outlier_mask.assign(spec.n, false);
    for (std::size_t k = 0; k < spec.outlier_count(); ++k) inst.outlier_mask[order[k]] = true;

    std::vector<Point2> dest(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        Point2 q = apply_transform(inst.true_transform, src[i]);
        if (inst.outlier_mask[i]) {
            q.x += coord(rng);
            q.y += coord(rng);
        } else if (spec.sigma > 0.0) {
            q.x += noise(rng);
            q.y += noise(rng);
        }
        dest[i] = q;
    }
    inst.src = PointSet(std::move(src));
    inst.dest = PointSet(std::move(dest));
    return inst;
}

// Complete (or partially complete) undirected graph over scans. Edge transforms map frame i
// coordinates into frame j; the reverse direction uses the inverse.
struct PoseGraph {
    struct Edge {
        std::size_t i = 0;
        std::size_t j = 0;
        double weight = 0.0;
        RigidTransform2 transform;
    };

    std::size_t node_count = 0;
    std::vector<Edge> edges;

    void validate() const {
        for (const Edge& e : edges) {
            if (e.i >= node_count || e.j >= node_count || e.i == e.j)
                throw std::invalid_argument("PoseGraph: edge endpoints out of range");
            if (!(e.weight >= 0.0)) throw std::invalid_argument("PoseGraph: negative edge weight");
        }
    }
};

struct ComposedPose {
    RigidTransform2 pose;            // frame of this node -> reference frame
    std::vector<std::size_t> path;   // node, ..., reference
    double cost = 0.0;
};

// Poses of every node relative to `reference`, composed along minimum-weight paths.
inline std::vector<ComposedPose> compose_map(const PoseGraph& graph, std::size_t reference) {
    graph.validate();
    if (reference >= graph.node_count) throw std::out_of_range("compose_map: reference node out of range");
    const std::size_t s = graph.node_count;

    struct Link {
        std::size_t to;
        double weight;
        RigidTransform2 transform;  // tail frame -> frame `to`
    };
    std::vector<std::vector<Link>> adjacency(s);
    for (const PoseGraph::Edge& e : graph.edges) {
        adjacency[e.i].push_back({e.j, e.weight, e.transform});
        adjacency[e.j].push_back({e.i, e.weight, inverse(e.transform)});
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(s, kInf);
    std::vector<std::size_t> next_hop(s, s);
    std::vector<RigidTransform2> hop_transform(s);
    std::vector<std::size_t> settled_order;
    std::vector<bool> settled(s, false);

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    dist[reference] = 0.0;
    frontier.push({0.0, reference});
    while (!frontier.empty()) {
        const auto [d, v] = frontier.top();
        frontier.pop();
        if (settled[v]) continue;
        settled[v] = true;
        settled_order.push_back(v);
        // Tree edges point from u toward the reference through v.
        for (const Link& a : adjacency[v]) {
            const std::size_t u = a.to;
            const double nd = d + a.weight;
            if (nd < dist[u]) {
                dist[u] = nd;
                next_hop[u] = v;
                hop_transform[u] = inverse(a.transform);  // frame u -> frame v
                frontier.push({nd, u});
            }
        }
    }
    for (std::size_t v = 0; v < s; ++v)
        if (!settled[v]) throw std::runtime_error("compose_map: pose graph is disconnected");

    std::vector<ComposedPose> out(s);
    out[reference] = {RigidTransform2::identity(), {reference}, 0.0};
    for (std::size_t v : settled_order) {
        if (v == reference) continue;
        const ComposedPose& via = out[next_hop[v]];
        out[v].pose = compose(via.pose, hop_transform[v]);
        out[v].path.reserve(via.path.size() + 1);
        out[v].path.push_back(v);
        out[v].path.insert(out[v].path.end(), via.path.begin(), via.path.end());
        out[v].cost = dist[v];
    }
    return out;
}

}  // namespace planreg
