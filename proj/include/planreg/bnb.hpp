#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "planreg/geometry.hpp"
#include "planreg/objective.hpp"
#include "planreg/queue.hpp"
#include "planreg/relaxation.hpp"

namespace planreg {

struct TraceRecord {
    std::uint64_t iter = 0;
    double ub = 0.0;
    double lb = 0.0;
    std::size_t active_nodes = 0;
};

struct SolverConfig {
    // Relative optimality tolerance: a box is discarded once lower * (1 + epsilon) >= UB.
    double epsilon = 1e-4;
    // Boxes whose largest (angle-scaled) dimension is below delta also get the relaxation bound.
    double delta = 0.1;
    // Absolute tolerance: a box is also discarded once UB - lower <= abs_tolerance. Without it a
    // problem whose optimum is exactly zero can never be certified by the relative rule alone.
    double abs_tolerance = 1e-10;
    // Number of residuals kept; when unset, ceil(trim_fraction * n).
    std::optional<std::size_t> p;
    double trim_fraction = 0.8;
    TransformBox root_box{{-10.0, -10.0}, {10.0, 10.0}, 0.0, kTwoPi};
    std::uint64_t max_iterations = 10'000'000;
    // Radius used to express angular extents as lengths; max_i ||P_i|| when unset.
    std::optional<double> angular_scale_override;
    // When false every node rebuilds its candidate queues from scratch (ablation baseline).
    bool use_queue = true;

    std::function<void(const TraceRecord&)> on_trace;
    // Called for every evaluated box with its lower bound.
    std::function<void(const TransformBox&, double)> on_node;

    TrimConfig trim_for(std::size_t n) const {
        if (p) {
            TrimConfig t{*p};
            t.check(n);
            return t;
        }
        return TrimConfig::from_fraction(trim_fraction, n);
    }

    double angular_scale_for(const PointSet& src) const {
        const double s = angular_scale_override ? *angular_scale_override : src.max_norm();
        return s > 0.0 ? s : 1.0;
    }

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("SolverConfig: epsilon must be positive");
        if (!(delta >= 0.0)) throw std::invalid_argument("SolverConfig: delta must be non-negative");
        if (!(abs_tolerance >= 0.0)) throw std::invalid_argument("SolverConfig: abs_tolerance must be non-negative");
        if (!root_box.valid()) throw std::invalid_argument("SolverConfig: invalid root box");
        if (angular_scale_override && !(*angular_scale_override > 0.0))
            throw std::invalid_argument("SolverConfig: angular scale must be positive");
        if (max_iterations == 0) throw std::invalid_argument("SolverConfig: max_iterations must be positive");
    }
};

struct SolverStats {
    std::uint64_t iterations = 0;
    std::uint64_t nodes_created = 0;
    std::uint64_t nodes_pruned = 0;
    std::uint64_t exhausted_leaves = 0;  // boxes too small to split further
    std::uint64_t dmin_evaluations = 0;
    std::uint64_t dmax_evaluations = 0;
    std::uint64_t phiR_evaluations = 0;
    std::size_t max_active = 0;
    // Fractions of the root volume discarded and still active at exit.
    double pruned_volume = 0.0;
    double active_volume = 0.0;

    friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

struct SolveResult {
    RigidTransform2 transform;
    double objective = 0.0;
    double lower_bound_at_exit = 0.0;
    double relative_gap = 0.0;
    double absolute_gap = 0.0;
    bool certified = false;
    std::size_t p = 0;
    std::vector<std::size_t> inlier_indices;
    SolverStats stats;
};

struct BoxNode {
    TransformBox box;
    double lower = 0.0;
    double phi_c = 0.0;
    std::optional<double> phi_r;
    QueueSet queues;
    double volume = 1.0;
    std::uint64_t seq = 0;
};

// Everything a node evaluation needs besides the box and the parent queues.
struct BoundContext {
    const PointSet& src;
    const PointSet& dest;
    TrimConfig trim;
    double delta = 0.1;
    double angular_scale = 1.0;
    bool use_queue = true;
};

inline bool relaxation_enabled(const TransformBox& box, const BoundContext& ctx) {
    return box_largest_dimension(box, ctx.angular_scale) < ctx.delta &&
           box.extent_theta() < 0.5 * std::numbers::pi;
}

// Builds the candidate queues of `box` (incrementally from `parent_queues` when given and
// queue reuse is on) and combines the cheap and, when enabled, relaxation bounds by max.
inline BoxNode evaluate_node(const TransformBox& box, const QueueSet* parent_queues, const BoundContext& ctx,
                             EvalCounters* counters = nullptr) {
    BoxNode node;
    node.box = box;
    if (parent_queues && ctx.use_queue)
        node.queues = update_queues(box, *parent_queues, ctx.src, ctx.dest, counters);
    else
        node.queues = init_queues(box, ctx.src, ctx.dest, counters);
    node.phi_c = cheap_bound(node.queues, ctx.trim);
    node.lower = node.phi_c;
    if (relaxation_enabled(box, ctx)) {
        node.phi_r = relaxation_bound(box, node.queues, ctx.src, ctx.dest, ctx.trim);
        node.lower = std::max(node.lower, *node.phi_r);
    }
    return node;
}

namespace detail {

// Min-heap order on (lower, creation sequence).
struct NodeAfter {
    bool operator()(const BoxNode& a, const BoxNode& b) const {
        if (a.lower != b.lower) return a.lower > b.lower;
        return a.seq > b.seq;
    }
};

inline RigidTransform2 center_transform(const TransformBox& b) {
    const BoxCenter c = box_center(b);
    return {c.z, c.theta};
}

// A split that cannot shrink the box in floating point.
inline bool splittable(const TransformBox& b, double angular_scale) {
    if (b.extent_x() <= 0.0 && b.extent_y() <= 0.0 && b.extent_theta() <= 0.0) return false;
    const auto [lo, hi] = split_box(b, angular_scale);
    return !(lo == b) && !(hi == b);
}

}  // namespace detail

// Best-first branch and bound over cfg.root_box. The returned transform is within a relative
// factor (1 + epsilon), or an absolute abs_tolerance, of the restricted global minimum when
// `certified` is set; otherwise the iteration cap was hit and the achieved gap is reported.
inline SolveResult solve(const PointSet& src, const PointSet& dest, const SolverConfig& cfg) {
    cfg.validate();
    if (src.empty() || dest.empty()) throw std::invalid_argument("solve: point sets must be non-empty");
    const TrimConfig trim = cfg.trim_for(src.size());
    const BoundContext ctx{src, dest, trim, cfg.delta, cfg.angular_scale_for(src), cfg.use_queue};

    EvalCounters counters;
    SolveResult result;
    result.p = trim.p;
    SolverStats& stats = result.stats;

    double ub = trimmed_objective(detail::center_transform(cfg.root_box), src, dest, trim);
    RigidTransform2 incumbent = detail::center_transform(cfg.root_box);
    double min_discarded_lower = std::numeric_limits<double>::infinity();

    auto discardable = [&](double lower) {
        return lower * (1.0 + cfg.epsilon) >= ub || ub - lower <= cfg.abs_tolerance;
    };
    auto discard = [&](const BoxNode& node) {
        ++stats.nodes_pruned;
        stats.pruned_volume += node.volume;
        min_discarded_lower = std::min(min_discarded_lower, node.lower);
    };

    std::vector<BoxNode> heap;
    std::uint64_t seq = 0;
    auto push = [&](BoxNode&& node) {
        node.seq = seq++;
        heap.push_back(std::move(node));
        std::push_heap(heap.begin(), heap.end(), detail::NodeAfter{});
        stats.max_active = std::max(stats.max_active, heap.size());
    };

    {
        BoxNode root = evaluate_node(cfg.root_box, nullptr, ctx, &counters);
        root.volume = 1.0;
        ++stats.nodes_created;
        if (root.phi_r) ++stats.phiR_evaluations;
        if (cfg.on_node) cfg.on_node(root.box, root.lower);
        push(std::move(root));
    }

    bool capped = false;
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), detail::NodeAfter{});
        BoxNode node = std::move(heap.back());
        heap.pop_back();

        if (discardable(node.lower)) {
            // Best-first: every remaining node has an equal or larger lower bound.
            discard(node);
            for (const BoxNode& rest : heap) discard(rest);
            heap.clear();
            break;
        }
        if (stats.iterations >= cfg.max_iterations) {
            heap.push_back(std::move(node));
            std::push_heap(heap.begin(), heap.end(), detail::NodeAfter{});
            capped = true;
            break;
        }
        ++stats.iterations;
        const double node_lower = node.lower;

        if (!detail::splittable(node.box, ctx.angular_scale)) {
            ++stats.exhausted_leaves;
            const RigidTransform2 t = detail::center_transform(node.box);
            const double f = trimmed_objective(t, src, dest, trim);
            if (f < ub) {
                ub = f;
                incumbent = t;
            }
            discard(node);
        } else {
            const auto [box_lo, box_hi] = split_box(node.box, ctx.angular_scale);
            BoxNode children[2] = {evaluate_node(box_lo, &node.queues, ctx, &counters),
                                   evaluate_node(box_hi, &node.queues, ctx, &counters)};
            node.queues = {};
            for (BoxNode& child : children) {
                child.volume = 0.5 * node.volume;
                ++stats.nodes_created;
                if (child.phi_r) ++stats.phiR_evaluations;
                if (cfg.on_node) cfg.on_node(child.box, child.lower);
                const RigidTransform2 t = detail::center_transform(child.box);
                const double f = trimmed_objective(t, src, dest, trim);
                if (f < ub) {
                    ub = f;
                    incumbent = t;
                }
            }
            for (BoxNode& child : children) {
                if (discardable(child.lower))
                    discard(child);
                else
                    push(std::move(child));
            }
        }

        if (cfg.on_trace) {
            const double lb = std::min({node_lower, min_discarded_lower, ub});
            cfg.on_trace({stats.iterations, ub, lb, heap.size()});
        }
    }

    double lb = std::min(min_discarded_lower, ub);
    for (const BoxNode& rest : heap) {
        lb = std::min(lb, rest.lower);
        stats.active_volume += rest.volume;
    }

    stats.dmin_evaluations = counters.dmin;
    stats.dmax_evaluations = counters.dmax;
    result.transform = incumbent;
    result.objective = ub;
    result.lower_bound_at_exit = lb;
    result.absolute_gap = std::max(0.0, ub - lb);
    if (ub <= lb)
        result.relative_gap = 0.0;
    else
        result.relative_gap = lb > 0.0 ? (ub - lb) / lb : std::numeric_limits<double>::infinity();
    result.certified = !capped;
    result.inlier_indices = inlier_indices(incumbent, src, dest, trim);
    return result;
}

}  // namespace planreg
