#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "planreg/bnb.hpp"
#include "planreg/instances.hpp"
#include "planreg/objective.hpp"

namespace planreg {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size() && std::isfinite(out);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace detail

// One point per line as two whitespace-separated numbers; blank lines and lines whose first
// non-blank character is '#' are ignored.
inline PointSet parse_point_set(std::string_view text, const std::string& origin = "<input>") {
    std::vector<Point2> points;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string_view> tokens;
        while (!line.empty()) {
            const auto sep = line.find_first_of(" \t");
            tokens.push_back(line.substr(0, sep));
            line = sep == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(sep));
        }
        Point2 p;
        if (tokens.size() != 2 || !detail::parse_double(tokens[0], p.x) || !detail::parse_double(tokens[1], p.y))
            throw FormatError(origin + ":" + std::to_string(line_no) + ": expected two finite numbers");
        points.push_back(p);
    }
    if (points.empty()) throw FormatError(origin + ": no points");
    return PointSet(std::move(points));
}

inline PointSet read_point_set(const std::string& path) { return parse_point_set(detail::read_file(path), path); }

inline std::string format_point_set(const PointSet& set) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const Point2& p : set) out << p.x << ' ' << p.y << '\n';
    return out.str();
}

inline void write_point_set(const PointSet& set, const std::string& path) {
    detail::write_file(path, format_point_set(set));
}

// ---- JSON encodings ---------------------------------------------------------------------------

using Json = nlohmann::json;

inline Json to_json(const RigidTransform2& t) { return {{"zx", t.z.x}, {"zy", t.z.y}, {"theta", t.theta}}; }

inline RigidTransform2 transform_from_json(const Json& j) {
    return {{j.at("zx").get<double>(), j.at("zy").get<double>()}, j.at("theta").get<double>()};
}

inline Json to_json(const PointSet& set) {
    Json arr = Json::array();
    for (const Point2& p : set) arr.push_back({p.x, p.y});
    return arr;
}

inline PointSet point_set_from_json(const Json& j) {
    std::vector<Point2> pts;
    for (const Json& e : j) {
        if (!e.is_array() || e.size() != 2) throw FormatError("point must be a [x, y] pair");
        pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return PointSet(std::move(pts));
}

inline Json to_json(const TransformBox& b) {
    return {{"zx_min", b.z_min.x}, {"zx_max", b.z_max.x}, {"zy_min", b.z_min.y},
            {"zy_max", b.z_max.y}, {"theta_min", b.theta_min}, {"theta_max", b.theta_max}};
}

inline Json to_json(const InstanceSpec& s) {
    return {{"n", s.n},
            {"sigma", s.sigma},
            {"outlier_fraction", s.outlier_fraction},
            {"coord_min", s.coord_min},
            {"coord_max", s.coord_max},
            {"seed", s.seed}};
}

inline InstanceSpec instance_spec_from_json(const Json& j) {
    InstanceSpec s;
    s.n = j.at("n").get<std::size_t>();
    s.sigma = j.at("sigma").get<double>();
    s.outlier_fraction = j.at("outlier_fraction").get<double>();
    s.coord_min = j.value("coord_min", -10.0);
    s.coord_max = j.value("coord_max", 10.0);
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

inline Json to_json(const Instance& inst) {
    return {{"spec", to_json(inst.spec)},
            {"src", to_json(inst.src)},
            {"dest", to_json(inst.dest)},
            {"true_transform", to_json(inst.true_transform)},
            {"outlier_mask", inst.outlier_mask}};
}

inline Instance instance_from_json(const Json& j) {
    try {
        Instance inst;
        inst.spec = instance_spec_from_json(j.at("spec"));
        inst.src = point_set_from_json(j.at("src"));
        inst.dest = point_set_from_json(j.at("dest"));
        inst.true_transform = transform_from_json(j.at("true_transform"));
        inst.outlier_mask = j.at("outlier_mask").get<std::vector<bool>>();
        return inst;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed instance: ") + e.what());
    }
}

inline Json to_json(const SolverStats& s) {
    return {{"iterations", s.iterations},
            {"nodes_created", s.nodes_created},
            {"nodes_pruned", s.nodes_pruned},
            {"exhausted_leaves", s.exhausted_leaves},
            {"dmin_evaluations", s.dmin_evaluations},
            {"dmax_evaluations", s.dmax_evaluations},
            {"phiR_evaluations", s.phiR_evaluations},
            {"max_active", s.max_active},
            {"pruned_volume", s.pruned_volume},
            {"active_volume", s.active_volume}};
}

// Infinite gaps are written as null.
inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const SolveResult& r) {
    return {{"transform", to_json(r.transform)},
            {"objective", r.objective},
            {"lower_bound", r.lower_bound_at_exit},
            {"relative_gap", finite_or_null(r.relative_gap)},
            {"absolute_gap", r.absolute_gap},
            {"certified", r.certified},
            {"p", r.p},
            {"inliers", r.inlier_indices},
            {"stats", to_json(r.stats)}};
}

inline SolveResult solve_result_from_json(const Json& j) {
    try {
        SolveResult r;
        r.transform = transform_from_json(j.at("transform"));
        r.objective = j.at("objective").get<double>();
        r.lower_bound_at_exit = j.at("lower_bound").get<double>();
        const Json& gap = j.at("relative_gap");
        r.relative_gap = gap.is_null() ? std::numeric_limits<double>::infinity() : gap.get<double>();
        r.absolute_gap = j.value("absolute_gap", 0.0);
        r.certified = j.at("certified").get<bool>();
        r.p = j.at("p").get<std::size_t>();
        r.inlier_indices = j.at("inliers").get<std::vector<std::size_t>>();
        return r;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed result: ") + e.what());
    }
}

// Pose graph together with the scan files its nodes refer to.
struct PoseGraphFile {
    PoseGraph graph;
    std::vector<std::string> scans;
    std::vector<bool> certified;  // per edge
};

inline Json to_json(const PoseGraphFile& f) {
    Json edges = Json::array();
    for (std::size_t k = 0; k < f.graph.edges.size(); ++k) {
        const PoseGraph::Edge& e = f.graph.edges[k];
        edges.push_back({{"i", e.i},
                         {"j", e.j},
                         {"weight", e.weight},
                         {"transform", to_json(e.transform)},
                         {"certified", k < f.certified.size() ? static_cast<bool>(f.certified[k]) : false}});
    }
    return {{"S", f.graph.node_count}, {"scans", f.scans}, {"edges", edges}};
}

inline PoseGraphFile pose_graph_from_json(const Json& j) {
    try {
        PoseGraphFile f;
        f.graph.node_count = j.at("S").get<std::size_t>();
        f.scans = j.value("scans", std::vector<std::string>{});
        for (const Json& e : j.at("edges")) {
            f.graph.edges.push_back({e.at("i").get<std::size_t>(), e.at("j").get<std::size_t>(),
                                     e.at("weight").get<double>(), transform_from_json(e.at("transform"))});
            f.certified.push_back(e.value("certified", false));
        }
        f.graph.validate();
        return f;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed pose graph: ") + e.what());
    }
}

inline Json to_json(const TraceRecord& r) {
    return {{"iter", r.iter}, {"ub", finite_or_null(r.ub)}, {"lb", finite_or_null(r.lb)}, {"active_nodes", r.active_nodes}};
}

// One JSON object per line.
inline std::vector<TraceRecord> parse_trace(std::string_view text, const std::string& origin = "<trace>") {
    std::vector<TraceRecord> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const std::string_view line = detail::trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty()) continue;
        try {
            const Json j = Json::parse(line);
            auto value = [&](const char* key) {
                const Json& v = j.at(key);
                return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
            };
            out.push_back({j.at("iter").get<std::uint64_t>(), value("ub"), value("lb"),
                           j.at("active_nodes").get<std::size_t>()});
        } catch (const Json::exception& e) {
            throw FormatError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<TraceRecord> read_trace(const std::string& path) { return parse_trace(detail::read_file(path), path); }

inline Json read_json(const std::string& path) {
    try {
        return Json::parse(detail::read_file(path));
    } catch (const Json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline void write_json(const Json& j, const std::string& path) { detail::write_file(path, j.dump(2) + "\n"); }

}  // namespace planreg
