#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "planreg/geometry.hpp"
#include "planreg/objective.hpp"

namespace planreg {

// (lower bound on d_min(B, P, Q_idx), idx)
struct Candidate {
    double d = 0.0;
    std::uint32_t idx = 0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Work counters shared by the bound routines.
struct EvalCounters {
    std::uint64_t dmin = 0;
    std::uint64_t dmax = 0;
};

// Ascending candidate list L_{B,P} and the upper bound U_{B,P} on min_j d_max(B, P, Q_j).
struct CandidateQueue {
    std::vector<Candidate> entries;
    double upper = std::numeric_limits<double>::infinity();

    const Candidate& head() const { return entries.front(); }
    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    friend bool operator==(const CandidateQueue&, const CandidateQueue&) = default;
};

using QueueSet = std::vector<CandidateQueue>;

// d_min / d_max of one source point against destination points over a fixed box.
class PointBoxBounds {
public:
    PointBoxBounds(const TransformBox& box, Point2 p, const PointSet& dest, EvalCounters* counters)
        : box_(box), arc_(Arc::of_point(p, box.theta_min, box.theta_max)), dest_(dest), counters_(counters) {}

    double dmin(std::size_t j) const {
        if (counters_) ++counters_->dmin;
        return arc_rect_dist_min(arc_, translation_rect(box_, dest_[j]));
    }

    double dmax(std::size_t j) const {
        if (counters_) ++counters_->dmax;
        return arc_rect_dist_max(arc_, translation_rect(box_, dest_[j]));
    }

private:
    TransformBox box_;
    PreparedArc arc_;
    const PointSet& dest_;
    EvalCounters* counters_;
};

namespace detail {

inline bool candidate_less(const Candidate& a, const Candidate& b) { return a.d < b.d; }

}  // namespace detail

inline CandidateQueue init_queue(const TransformBox& root, Point2 p, const PointSet& dest,
                                 EvalCounters* counters = nullptr) {
    const PointBoxBounds bounds(root, p, dest, counters);
    CandidateQueue q;
    q.entries.reserve(dest.size());
    for (std::size_t j = 0; j < dest.size(); ++j) {
        q.entries.push_back({bounds.dmin(j), static_cast<std::uint32_t>(j)});
        q.upper = std::min(q.upper, bounds.dmax(j));
    }
    std::stable_sort(q.entries.begin(), q.entries.end(), detail::candidate_less);
    return q;
}

// Builds the queue of `child` from the queue of its parent box without modifying the parent.
//
// The parent head is always recomputed on the child. Further parent entries are recomputed
// while their stale bound does not exceed the running minimum m; those cannot change the new
// head. The remaining entries are carried over unchanged while their stale bound is below the
// running upper bound U, and every entry from the first one with d >= U on is dropped, since
// such a destination can never be the nearest one for a transform in the child.
inline CandidateQueue update_queue(const TransformBox& child, const CandidateQueue& parent, Point2 p,
                                   const PointSet& dest, EvalCounters* counters = nullptr) {
    if (parent.empty()) throw std::logic_error("update_queue: parent queue is empty");
    const PointBoxBounds bounds(child, p, dest, counters);

    auto it = parent.entries.begin();
    const auto end = parent.entries.end();

    std::vector<Candidate> recomputed;
    double m = bounds.dmin(it->idx);
    double upper = bounds.dmax(it->idx);
    recomputed.push_back({m, it->idx});
    ++it;

    while (it != end && it->d <= m) {
        const double d = bounds.dmin(it->idx);
        m = std::min(m, d);
        upper = std::min(upper, bounds.dmax(it->idx));
        recomputed.push_back({d, it->idx});
        ++it;
    }

    const auto carried_begin = it;
    while (it != end && upper > it->d) ++it;

    std::stable_sort(recomputed.begin(), recomputed.end(), detail::candidate_less);
    CandidateQueue q;
    q.upper = upper;
    q.entries.resize(recomputed.size() + static_cast<std::size_t>(it - carried_begin));
    std::merge(recomputed.begin(), recomputed.end(), carried_begin, it, q.entries.begin(),
               detail::candidate_less);
    return q;
}

inline QueueSet init_queues(const TransformBox& root, const PointSet& src, const PointSet& dest,
                            EvalCounters* counters = nullptr) {
    QueueSet qs;
    qs.reserve(src.size());
    for (const Point2& p : src) qs.push_back(init_queue(root, p, dest, counters));
    return qs;
}

inline QueueSet update_queues(const TransformBox& child, const QueueSet& parent, const PointSet& src,
                              const PointSet& dest, EvalCounters* counters = nullptr) {
    QueueSet qs;
    qs.reserve(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) qs.push_back(update_queue(child, parent[i], src[i], dest, counters));
    return qs;
}

struct ConsistencyReport {
    bool well_formed = false;  // non-empty, ascending, no duplicate or out-of-range index
    bool cond1 = false;        // every stored d <= d_min(B, P, Q_idx)
    bool cond2 = false;        // upper >= min_j d_max(B, P, Q_j)
    bool cond3 = false;        // every absent j has d_min(B, P, Q_j) >= head d
    bool cond4 = false;        // head d == min_j d_min(B, P, Q_j)

    bool ok() const { return well_formed && cond1 && cond2 && cond3 && cond4; }
};

// Checks a queue against direct recomputation. Comparisons allow a relative slack of
// `rel_tol` to absorb rounding differences between nested boxes.
inline ConsistencyReport check_consistency(const CandidateQueue& q, const TransformBox& b, Point2 p,
                                           const PointSet& dest, double rel_tol = 1e-12) {
    ConsistencyReport r;
    const std::size_t m = dest.size();
    std::vector<char> present(m, 0);
    r.well_formed = !q.empty();
    for (std::size_t k = 0; k < q.size() && r.well_formed; ++k) {
        const Candidate& c = q.entries[k];
        if (c.idx >= m || present[c.idx] || !(c.d >= 0.0) || (k > 0 && q.entries[k - 1].d > c.d))
            r.well_formed = false;
        else
            present[c.idx] = 1;
    }
    if (!r.well_formed) return r;

    const PointBoxBounds bounds(b, p, dest, nullptr);
    std::vector<double> dmin(m);
    double min_dmin = std::numeric_limits<double>::infinity();
    double min_dmax = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        dmin[j] = bounds.dmin(j);
        min_dmin = std::min(min_dmin, dmin[j]);
        min_dmax = std::min(min_dmax, bounds.dmax(j));
    }
    auto slack = [rel_tol](double v) { return rel_tol * std::max(1.0, std::abs(v)); };

    const double head = q.head().d;
    r.cond1 = std::all_of(q.entries.begin(), q.entries.end(),
                          [&](const Candidate& c) { return c.d <= dmin[c.idx] + slack(dmin[c.idx]); });
    r.cond2 = q.upper >= min_dmax - slack(min_dmax);
    r.cond3 = true;
    for (std::size_t j = 0; j < m; ++j)
        if (!present[j] && dmin[j] < head - slack(head)) r.cond3 = false;
    r.cond4 = std::abs(head - min_dmin) <= slack(min_dmin);
    return r;
}

// Sum of the p smallest queue heads.
inline double cheap_bound(std::span<const CandidateQueue> queues, const TrimConfig& trim) {
    trim.check(queues.size());
    std::vector<double> heads;
    heads.reserve(queues.size());
    for (const CandidateQueue& q : queues) heads.push_back(q.head().d);
    return sum_smallest(heads, trim.p);
}

}  // namespace planreg
