#include "imputekit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace imputekit {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Pads by 5% each side; a degenerate range gets unit width.
    void pad()
    {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }
};

// Maps data coordinates into a pixel box [left, left + width] x [top, top + height].
struct Frame
{
    double left, top, width, height;
    Range x, y;

    double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
    double py(double v) const { return top + height - (v - y.lo) / (y.hi - y.lo) * height; }
};

class Svg
{
  public:
    Svg(double width, double height)
    {
        out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
               num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
               "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double w = 1.0,
              const std::string& extra = "")
    {
        out_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(w) + "\"" + extra + "/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0)
    {
        out_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
                "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor = "middle",
              const std::string& extra = "")
    {
        out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" +
                escape(s) + "</text>\n";
    }
    void open_group(const std::string& id) { out_ += "<g id=\"" + escape(id) + "\">\n"; }
    void close_group() { out_ += "</g>\n"; }

    void axes(const Frame& f, const std::string& x_label, const std::string& y_label)
    {
        out_ += "<rect x=\"" + num(f.left) + "\" y=\"" + num(f.top) + "\" width=\"" + num(f.width) +
                "\" height=\"" + num(f.height) + "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int t = 0; t <= 4; ++t) {
            const double vx = f.x.lo + (f.x.hi - f.x.lo) * t / 4.0;
            const double vy = f.y.lo + (f.y.hi - f.y.lo) * t / 4.0;
            text(f.px(vx), f.top + f.height + 14, label(vx));
            text(f.left - 4, f.py(vy) + 4, label(vy), "end");
        }
        if (!x_label.empty()) {
            text(f.left + f.width / 2, f.top + f.height + 30, x_label);
        }
        if (!y_label.empty()) {
            const double x = f.left - 36;
            const double y = f.top + f.height / 2;
            text(x, y, y_label, "middle", " transform=\"rotate(-90 " + num(x) + " " + num(y) + ")\"");
        }
    }

    std::string finish()
    {
        out_ += "</svg>\n";
        return std::move(out_);
    }

  private:
    std::string out_;
};

}  // namespace

std::string scatter_panels_svg(const MaskedDataset& full,
                               std::span<const std::pair<std::string, CompletedDataset>> completions)
{
    Range x, y;
    for (std::size_t i = 0; i < full.rows(); ++i) {
        x.add(full.values(0)[i]);
        y.add(full.values(1)[i]);
    }
    for (const auto& [name, c] : completions) {
        for (std::size_t i = 0; i < c.rows(); ++i) {
            x.add(c.value(i, 0));
            y.add(c.value(i, 1));
        }
    }
    x.pad();
    y.pad();

    const double panel = 300, gap = 70;
    const std::size_t panels = completions.size() + 1;
    Svg svg(gap + static_cast<double>(panels) * (panel + gap), panel + 90);
    for (std::size_t p = 0; p < panels; ++p) {
        const Frame f{gap + static_cast<double>(p) * (panel + gap), 30, panel, panel, x, y};
        const std::string title = p == 0 ? "full data" : completions[p - 1].first;
        svg.text(f.left + panel / 2, 20, title);
        svg.axes(f, full.column(0).name, full.column(1).name);
        svg.open_group("points-" + std::to_string(p));
        if (p == 0) {
            for (std::size_t i = 0; i < full.rows(); ++i) {
                svg.circle(f.px(full.values(0)[i]), f.py(full.values(1)[i]), 1.5, "#555", 0.4);
            }
        } else {
            const auto& c = completions[p - 1].second;
            for (std::size_t i = 0; i < c.rows(); ++i) {
                const bool imputed = c.imputed_mask()(i, 0) || c.imputed_mask()(i, 1);
                svg.circle(f.px(c.value(i, 0)), f.py(c.value(i, 1)), 1.5, imputed ? "#d95f02" : "#555", 0.4);
            }
        }
        svg.close_group();
    }
    return svg.finish();
}

std::string quantile_strip_svg(std::span<const EstimateRow> rows, std::span<const MethodSummary> summary,
                               double alpha, double oracle)
{
    Range x;
    x.add(alpha);
    x.add(oracle);
    for (const auto& r : rows) {
        x.add(r.estimate);
    }
    x.pad();
    const double strip = 40;
    const double height = strip * static_cast<double>(std::max<std::size_t>(summary.size(), 1));
    Frame f{140, 30, 520, height, x, {0.0, 1.0}};
    Svg svg(700, height + 80);
    svg.text(f.left + f.width / 2, 18, "estimates by method (blue: alpha, red: complete-case oracle)");
    svg.line(f.left, f.top, f.left, f.top + f.height, "#444");
    svg.line(f.left, f.top + f.height, f.left + f.width, f.top + f.height, "#444");
    for (int t = 0; t <= 4; ++t) {
        const double v = x.lo + (x.hi - x.lo) * t / 4.0;
        svg.text(f.px(v), f.top + f.height + 14, label(v));
    }
    svg.text(f.left + f.width / 2, f.top + f.height + 32, "estimate");

    for (std::size_t k = 0; k < summary.size(); ++k) {
        const double cy = f.top + strip * (static_cast<double>(k) + 0.5);
        svg.text(f.left - 8, cy + 4, summary[k].method, "end");
        svg.open_group("strip-" + summary[k].method);
        std::size_t seen = 0;
        for (const auto& r : rows) {
            if (r.method != summary[k].method) {
                continue;
            }
            // Deterministic vertical jitter so overlapping estimates stay visible.
            const double jitter = (static_cast<double>(seen++ % 7) - 3.0) * 3.0;
            svg.circle(f.px(r.estimate), cy + jitter, 2.5, "#333", 0.6);
        }
        svg.close_group();
        svg.line(f.px(summary[k].mean), cy - 12, f.px(summary[k].mean), cy + 12, "#000", 2.0);
    }
    svg.line(f.px(alpha), f.top, f.px(alpha), f.top + f.height, "blue", 1.5);
    svg.line(f.px(oracle), f.top, f.px(oracle), f.top + f.height, "red", 1.5);
    return svg.finish();
}

std::string coverage_svg(const CoverageResult& result, double true_value)
{
    Range y;
    y.add(true_value);
    std::size_t max_rep = 1;
    for (const auto& r : result.rows) {
        y.add(r.result.lower);
        y.add(r.result.upper);
        max_rep = std::max(max_rep, r.replication);
    }
    y.pad();
    const Range x{0.0, static_cast<double>(max_rep) + 1.0};

    const double panel_w = 360, panel_h = 260, gap = 70;
    const std::size_t panels = std::max<std::size_t>(result.summary.size(), 1);
    Svg svg(gap + static_cast<double>(panels) * (panel_w + gap), panel_h + 90);
    for (std::size_t p = 0; p < result.summary.size(); ++p) {
        const auto& s = result.summary[p];
        const Frame f{gap + static_cast<double>(p) * (panel_w + gap), 30, panel_w, panel_h, x, y};
        svg.text(f.left + panel_w / 2, 20, s.method + " (coverage " + label(s.coverage) + ")");
        svg.axes(f, "replication", "interval");
        svg.open_group("intervals-" + s.method);
        for (const auto& r : result.rows) {
            if (r.method != s.method) {
                continue;
            }
            const double px = f.px(static_cast<double>(r.replication));
            svg.line(px, f.py(r.result.lower), px, f.py(r.result.upper), r.covered ? "#1b9e77" : "#d95f02", 1.5);
        }
        svg.close_group();
        svg.line(f.left, f.py(true_value), f.left + panel_w, f.py(true_value), "#000", 1.0,
                 " stroke-dasharray=\"6 4\"");
    }
    return svg.finish();
}

}  // namespace imputekit
