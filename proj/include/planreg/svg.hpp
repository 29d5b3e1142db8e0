#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "planreg/bnb.hpp"
#include "planreg/geometry.hpp"
#include "planreg/objective.hpp"

namespace planreg::svg {

inline std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += ch;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// Axis-aligned world window mapped onto a fixed-size canvas, y axis pointing up.
class Viewport {
public:
    Viewport(double width, double height, double margin) : width_(width), height_(height), margin_(margin) {}

    void include(Point2 p) {
        lo_.x = std::min(lo_.x, p.x);
        lo_.y = std::min(lo_.y, p.y);
        hi_.x = std::max(hi_.x, p.x);
        hi_.y = std::max(hi_.y, p.y);
    }

    template <class Range>
    void include_all(const Range& points) {
        for (const Point2& p : points) include(p);
    }

    // Uniform scale so that shapes keep their aspect ratio.
    Point2 map(Point2 p) const {
        const auto [lo, span] = window();
        const double s = std::min((width_ - 2 * margin_) / span.x, (height_ - 2 * margin_) / span.y);
        return {margin_ + (p.x - lo.x) * s, height_ - margin_ - (p.y - lo.y) * s};
    }

    double width() const { return width_; }
    double height() const { return height_; }

private:
    std::pair<Point2, Point2> window() const {
        if (lo_.x > hi_.x) return {{-1.0, -1.0}, {2.0, 2.0}};
        Point2 span = hi_ - lo_;
        Point2 lo = lo_;
        const double pad = std::max({span.x, span.y, 1e-9});
        if (span.x <= 0.0) {
            lo.x -= 0.5 * pad;
            span.x = pad;
        }
        if (span.y <= 0.0) {
            lo.y -= 0.5 * pad;
            span.y = pad;
        }
        return {lo, span};
    }

    double width_, height_, margin_;
    Point2 lo_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
};

class Document {
public:
    Document(double width, double height) : width_(width), height_(height) {}

    void circle(Point2 c, double r, std::string_view stroke, std::string_view fill = "none") {
        body_ << "<circle cx=\"" << num(c.x) << "\" cy=\"" << num(c.y) << "\" r=\"" << num(r) << "\" stroke=\""
              << stroke << "\" fill=\"" << fill << "\"/>\n";
    }

    void cross(Point2 c, double half, std::string_view stroke) {
        body_ << "<path d=\"M" << num(c.x - half) << ' ' << num(c.y - half) << 'L' << num(c.x + half) << ' '
              << num(c.y + half) << 'M' << num(c.x - half) << ' ' << num(c.y + half) << 'L' << num(c.x + half)
              << ' ' << num(c.y - half) << "\" stroke=\"" << stroke << "\" stroke-width=\"1\"/>\n";
    }

    void line(Point2 a, Point2 b, std::string_view stroke) {
        body_ << "<line x1=\"" << num(a.x) << "\" y1=\"" << num(a.y) << "\" x2=\"" << num(b.x) << "\" y2=\""
              << num(b.y) << "\" stroke=\"" << stroke << "\"/>\n";
    }

    void polyline(std::span<const Point2> pts, std::string_view stroke, bool dashed = false) {
        if (pts.empty()) return;
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << (dashed ? "\" stroke-dasharray=\"4 3" : "")
              << "\" points=\"";
        for (std::size_t k = 0; k < pts.size(); ++k) body_ << (k ? " " : "") << num(pts[k].x) << ',' << num(pts[k].y);
        body_ << "\"/>\n";
    }

    void text(Point2 at, std::string_view s, std::string_view anchor = "start") {
        body_ << "<text x=\"" << num(at.x) << "\" y=\"" << num(at.y) << "\" font-size=\"12\" font-family=\"sans-serif\""
              << " text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
    }

    std::string str() const {
        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\"" << num(height_)
            << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body_.str() << "</svg>\n";
        return out.str();
    }

private:
    double width_, height_;
    std::ostringstream body_;
};

// Source in red, destination in green, transformed source in blue; one circle per point.
inline std::string alignment_plot(const PointSet& src, const PointSet& dest, const RigidTransform2& t) {
    std::vector<Point2> moved;
    moved.reserve(src.size());
    for (const Point2& p : src) moved.push_back(apply_transform(t, p));

    Viewport view(800, 800, 30);
    view.include_all(src);
    view.include_all(dest);
    view.include_all(moved);
    Document doc(view.width(), view.height());
    for (const Point2& p : src) doc.circle(view.map(p), 3, "red");
    for (const Point2& q : dest) doc.circle(view.map(q), 3, "green");
    for (const Point2& p : moved) doc.circle(view.map(p), 2, "blue");
    return doc.str();
}

struct MapLayer {
    std::vector<Point2> points;     // already in the reference frame
    std::vector<bool> inlier;
    Point2 position;                // scan origin in the reference frame
};

// Green crosses for points counted in the trimmed sum, red crosses for outliers and one circle
// per estimated scan position.
inline std::string map_plot(std::span<const MapLayer> layers) {
    Viewport view(800, 800, 30);
    for (const MapLayer& l : layers) {
        view.include_all(l.points);
        view.include(l.position);
    }
    Document doc(view.width(), view.height());
    for (const MapLayer& l : layers)
        for (std::size_t k = 0; k < l.points.size(); ++k)
            doc.cross(view.map(l.points[k]), 3, k < l.inlier.size() && l.inlier[k] ? "green" : "red");
    for (const MapLayer& l : layers) doc.circle(view.map(l.position), 6, "black");
    return doc.str();
}

struct TraceSeries {
    std::string label;
    std::vector<TraceRecord> records;
};

// UB (solid) and LB (dashed) against iteration on a log10 value axis. Non-positive values are
// clamped to the smallest positive value present.
inline std::string convergence_plot(std::span<const TraceSeries> series) {
    constexpr double kW = 800, kH = 500, kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;
    double floor_value = std::numeric_limits<double>::infinity();
    double top_value = 0.0;
    std::uint64_t max_iter = 1;
    for (const TraceSeries& s : series)
        for (const TraceRecord& r : s.records) {
            for (double v : {r.ub, r.lb}) {
                if (v > 0.0 && std::isfinite(v)) floor_value = std::min(floor_value, v);
                if (std::isfinite(v)) top_value = std::max(top_value, v);
            }
            max_iter = std::max(max_iter, r.iter);
        }
    if (!std::isfinite(floor_value)) floor_value = 1e-12;
    top_value = std::max(top_value, floor_value * 10);
    const double lo = std::floor(std::log10(floor_value));
    const double hi = std::ceil(std::log10(top_value));

    auto to_canvas = [&](double iter, double v) {
        const double lv = std::log10(std::max(v, floor_value));
        return Point2{kLeft + iter / static_cast<double>(max_iter) * (kW - kLeft - kRight),
                      kH - kBottom - (lv - lo) / (hi - lo) * (kH - kTop - kBottom)};
    };

    Document doc(kW, kH);
    doc.line({kLeft, kH - kBottom}, {kW - kRight, kH - kBottom}, "black");
    doc.line({kLeft, kTop}, {kLeft, kH - kBottom}, "black");
    for (double e = lo; e <= hi; e += 1.0) {
        const Point2 at = to_canvas(0, std::pow(10.0, e));
        doc.text({kLeft - 6, at.y + 4}, "1e" + std::to_string(static_cast<int>(e)), "end");
    }
    doc.text({kW / 2, kH - 15}, "iteration " + std::to_string(max_iter), "middle");

    static constexpr std::string_view kColors[] = {"blue", "red", "green", "orange", "purple", "black"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const std::string_view color = kColors[k % std::size(kColors)];
        std::vector<Point2> ub, lb;
        for (const TraceRecord& r : series[k].records) {
            if (std::isfinite(r.ub)) ub.push_back(to_canvas(static_cast<double>(r.iter), r.ub));
            if (std::isfinite(r.lb)) lb.push_back(to_canvas(static_cast<double>(r.iter), r.lb));
        }
        doc.polyline(ub, color);
        doc.polyline(lb, color, true);
        doc.text({kW - kRight - 150, kTop + 15.0 * static_cast<double>(k + 1)}, series[k].label);
    }
    return doc.str();
}

}  // namespace planreg::svg
