#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "planreg/bnb.hpp"
#include "planreg/instances.hpp"
#include "planreg/io.hpp"
#include "planreg/objective.hpp"
#include "planreg/svg.hpp"

namespace planreg {

// Destination bounding box inflated by the source radius, full rotation range. Any transform
// aligning at least one source point onto the destination hull lies inside.
inline TransformBox bounding_root_box(const PointSet& src, const PointSet& dest) {
    Point2 lo = dest[0], hi = dest[0];
    for (const Point2& q : dest) {
        lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
        hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
    }
    const double r = src.max_norm();
    return {{lo.x - r, lo.y - r}, {hi.x + r, hi.y + r}, 0.0, kTwoPi};
}

struct PairOutcome {
    std::size_t i = 0;
    std::size_t j = 0;
    bool present = false;  // false when either scan could not be read
    SolveResult result;
    double wall_time_seconds = 0.0;
};

struct PairwiseRun {
    std::vector<PairOutcome> pairs;
    PoseGraphFile graph;  // nodes are the readable scans only, in input order
};

// Solves every unordered pair (i < j) with src = scan i and dest = scan j, so each edge maps
// frame i into frame j. `cfg.root_box` is replaced per pair by bounding_root_box unless
// `fixed_box` is set. Pairs are distributed over `threads` workers.
inline PairwiseRun run_pairwise(const std::vector<std::optional<PointSet>>& scans,
                                const std::vector<std::string>& names, const SolverConfig& cfg,
                                bool fixed_box = false, unsigned threads = 1) {
    PairwiseRun run;
    std::vector<std::size_t> node_of(scans.size(), scans.size());
    for (std::size_t k = 0; k < scans.size(); ++k) {
        if (!scans[k]) continue;
        node_of[k] = run.graph.scans.size();
        run.graph.scans.push_back(k < names.size() ? names[k] : std::to_string(k));
    }
    run.graph.graph.node_count = run.graph.scans.size();

    for (std::size_t i = 0; i < scans.size(); ++i)
        for (std::size_t j = i + 1; j < scans.size(); ++j) run.pairs.push_back({i, j, scans[i] && scans[j], {}, 0.0});

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < run.pairs.size(); k = next++) {
            PairOutcome& pair = run.pairs[k];
            if (!pair.present) continue;
            try {
                const PointSet& src = *scans[pair.i];
                const PointSet& dest = *scans[pair.j];
                SolverConfig local = cfg;
                local.on_trace = nullptr;
                local.on_node = nullptr;
                if (!fixed_box) local.root_box = bounding_root_box(src, dest);
                const auto start = std::chrono::steady_clock::now();
                pair.result = solve(src, dest, local);
                pair.wall_time_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(run.pairs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (const PairOutcome& pair : run.pairs) {
        if (!pair.present) continue;
        run.graph.graph.edges.push_back(
            {node_of[pair.i], node_of[pair.j], pair.result.objective, pair.result.transform});
        run.graph.certified.push_back(pair.result.certified);
    }
    return run;
}

inline Json run_report_json(const PairwiseRun& run, const SolverConfig& cfg, const std::vector<std::string>& names) {
    Json pairs = Json::array();
    for (const PairOutcome& p : run.pairs) {
        Json entry{{"i", p.i}, {"j", p.j}, {"present", p.present}};
        if (p.present) {
            entry["objective"] = p.result.objective;
            entry["wall_time_seconds"] = p.wall_time_seconds;
            entry["iterations"] = p.result.stats.iterations;
            entry["certified"] = p.result.certified;
            entry["relative_gap"] = finite_or_null(p.result.relative_gap);
        }
        pairs.push_back(std::move(entry));
    }
    return {{"version", "1.0.0"},
            {"config",
             {{"epsilon", cfg.epsilon},
              {"delta", cfg.delta},
              {"trim", cfg.trim_fraction},
              {"max_iterations", cfg.max_iterations},
              {"use_queue", cfg.use_queue}}},
            {"scans", names},
            {"pairs", pairs}};
}

inline Json poses_json(const std::vector<ComposedPose>& poses, std::size_t reference,
                       const std::vector<std::string>& names) {
    Json arr = Json::array();
    for (std::size_t v = 0; v < poses.size(); ++v) {
        Json entry = to_json(poses[v].pose);
        entry["index"] = v;
        if (v < names.size()) entry["scan"] = names[v];
        entry["path"] = poses[v].path;
        entry["cost"] = poses[v].cost;
        arr.push_back(std::move(entry));
    }
    return {{"reference", reference}, {"poses", arr}};
}

// Each scan is rendered in the reference frame. Its inliers are taken from its registration
// against the next node on its path; the reference scan uses its lowest-weight neighbour.
inline std::vector<svg::MapLayer> map_layers(const std::vector<PointSet>& scans, const PoseGraph& graph,
                                             const std::vector<ComposedPose>& poses, std::size_t reference,
                                             double trim_fraction) {
    std::vector<svg::MapLayer> layers(scans.size());
    for (std::size_t v = 0; v < scans.size(); ++v) {
        std::optional<std::size_t> partner;
        if (poses[v].path.size() > 1) {
            partner = poses[v].path[1];
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (const PoseGraph::Edge& e : graph.edges) {
                if (e.i != reference && e.j != reference) continue;
                if (e.weight < best) {
                    best = e.weight;
                    partner = e.i == reference ? e.j : e.i;
                }
            }
        }
        svg::MapLayer& layer = layers[v];
        const PointSet& pts = scans[v];
        for (const Point2& p : pts) layer.points.push_back(apply_transform(poses[v].pose, p));
        layer.position = poses[v].pose.z;
        layer.inlier.assign(pts.size(), true);
        if (partner) {
            const RigidTransform2 rel = compose(inverse(poses[*partner].pose), poses[v].pose);
            const TrimConfig trim = TrimConfig::from_fraction(trim_fraction, pts.size());
            layer.inlier.assign(pts.size(), false);
            for (std::size_t k : inlier_indices(rel, pts, scans[*partner], trim)) layer.inlier[k] = true;
        }
    }
    return layers;
}

}  // namespace planreg
