#include "ovicast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ovicast {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

// Fixed two-decimal coordinates keep the output byte-stable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void widen() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

Range range_of(std::initializer_list<std::span<const double>> parts) {
  double lo = INFINITY, hi = -INFINITY;
  for (auto p : parts)
    for (double v : p)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!std::isfinite(lo)) return {0.0, 1.0};
  Range r{lo, hi};
  r.widen();
  return r;
}

/// Plot area inside a fixed-size document.
struct Frame {
  double left, top, width, height;
  Range x, y;

  double px(double v) const { return left + (v - x.lo) / (x.hi - x.lo) * width; }
  double py(double v) const { return top + height - (v - y.lo) / (y.hi - y.lo) * height; }
};

class Doc {
 public:
  Doc(int w, int h) {
    os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
        << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
    os_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\" font-size=\"" << size
        << "\">" << escape(s) << "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& style) {
    os_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(std::max(w, 0.0)) << "\" height=\""
        << num(std::max(h, 0.0)) << "\" " << style << "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    os_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
        << "\" " << style << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke, const std::string& label) {
    os_ << "<polyline data-series=\"" << escape(label) << "\" fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    os_ << "\"/>\n";
  }

  void circle(double x, double y, const char* fill) {
    os_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"2.5\" fill=\"" << fill
        << "\" fill-opacity=\"0.6\"/>\n";
  }

  void axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    rect(f.left, f.top, f.width, f.height, "fill=\"none\" stroke=\"#444\"");
    for (int i = 0; i <= 4; ++i) {
      const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
      text(f.left - 6, f.py(yv) + 4, num(yv), "end", 10);
      const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
      text(f.px(xv), f.top + f.height + 14, num(xv), "middle", 10);
    }
    text(f.left + f.width / 2, f.top + f.height + 30, xlabel, "middle");
    os_ << "<text x=\"" << num(f.left - 42) << "\" y=\"" << num(f.top + f.height / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << num(f.left - 42) << ' '
        << num(f.top + f.height / 2) << ")\">" << escape(ylabel) << "</text>\n";
  }

  void legend(double x, double y, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      rect(x, y + 16.0 * i - 9, 10, 10, std::string("fill=\"") + colour(i) + "\"");
      text(x + 14, y + 16.0 * i, names[i]);
    }
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
};

// Polylines break at non-finite values rather than drawing through them.
std::vector<std::vector<std::pair<double, double>>> runs(const Frame& f, std::span<const double> v) {
  std::vector<std::vector<std::pair<double, double>>> out(1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      if (!out.back().empty()) out.emplace_back();
      continue;
    }
    out.back().emplace_back(f.px(static_cast<double>(i)), f.py(v[i]));
  }
  if (out.back().empty() && out.size() > 1) out.pop_back();
  return out;
}

}  // namespace

std::string svg_fit_plot(const std::string& title, std::span<const double> observed, std::span<const double> fitted,
                         std::size_t train_size) {
  Doc doc(800, 360);
  const double n = static_cast<double>(std::max<std::size_t>(observed.size(), 2) - 1);
  Frame f{60, 40, 700, 270, {0.0, n}, range_of({observed, fitted})};
  if (train_size < observed.size()) {
    const double x0 = f.px(static_cast<double>(train_size) - 0.5 < 0 ? 0.0 : static_cast<double>(train_size) - 0.5);
    doc.rect(x0, f.top, f.left + f.width - x0, f.height, "class=\"holdout\" fill=\"#999\" fill-opacity=\"0.2\"");
    doc.text(x0 + 4, f.top + 14, "holdout", "start", 10);
  }
  doc.axes(f, "week index", "z-score");
  doc.text(400, 22, title, "middle", 14);
  for (const auto& r : runs(f, observed)) doc.polyline(r, colour(0), "observed");
  for (const auto& r : runs(f, fitted)) doc.polyline(r, colour(1), "fitted");
  doc.legend(f.left + f.width - 80, f.top + 16, {"observed", "fitted"});
  return doc.finish();
}

std::string svg_scatter(std::span<const double> observed, const std::vector<NamedSeries>& predicted) {
  Doc doc(560, 520);
  double lo = INFINITY, hi = -INFINITY;
  auto grow = [&](std::span<const double> v) {
    for (double x : v)
      if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
  };
  grow(observed);
  for (const auto& p : predicted) grow(p.values);
  Range r = std::isfinite(lo) ? Range{lo, hi} : Range{0.0, 1.0};
  r.widen();
  Frame f{70, 40, 400, 400, r, r};
  doc.axes(f, "observed z-score", "predicted z-score");
  doc.text(280, 22, "Observed vs predicted", "middle", 14);
  doc.line(f.px(r.lo), f.py(r.lo), f.px(r.hi), f.py(r.hi), "stroke=\"#888\" stroke-dasharray=\"4 3\"");
  std::vector<std::string> names;
  for (std::size_t m = 0; m < predicted.size(); ++m) {
    names.push_back(predicted[m].name);
    const auto& v = predicted[m].values;
    for (std::size_t i = 0; i < std::min(v.size(), observed.size()); ++i)
      if (std::isfinite(v[i]) && std::isfinite(observed[i])) doc.circle(f.px(observed[i]), f.py(v[i]), colour(m + 1));
  }
  // Legend colours are offset by one: colour 0 is reserved for observed data.
  for (std::size_t i = 0; i < names.size(); ++i) {
    doc.rect(480, 60 + 16.0 * i - 9, 10, 10, std::string("fill=\"") + colour(i + 1) + "\"");
    doc.text(494, 60 + 16.0 * i, names[i]);
  }
  return doc.finish();
}

std::string svg_residual_histograms(const std::vector<NamedHistogram>& panels) {
  const int cols = 3;
  const int rows = std::max<int>(1, (static_cast<int>(panels.size()) + cols - 1) / cols);
  Doc doc(cols * 280, rows * 230 + 30);
  doc.text(cols * 140, 20, "Residual histograms", "middle", 14);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& h = panels[p].histogram;
    const double ox = 50.0 + 280.0 * static_cast<double>(p % cols);
    const double oy = 50.0 + 230.0 * static_cast<double>(p / cols);
    std::size_t peak = 1;
    for (auto c : h.counts) peak = std::max(peak, c);
    Range xr = h.edges.empty() ? Range{0.0, 1.0} : Range{h.edges.front(), h.edges.back()};
    if (!(xr.hi > xr.lo)) xr.widen();
    Frame f{ox, oy, 210, 150, xr, {0.0, static_cast<double>(peak)}};
    doc.axes(f, "residual", "count");
    doc.text(ox + 105, oy - 8, panels[p].name, "middle");
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double x0 = f.px(h.edges[b]), x1 = f.px(h.edges[b + 1]);
      const double y = f.py(static_cast<double>(h.counts[b]));
      doc.rect(x0, y, x1 - x0, f.top + f.height - y,
               std::string("fill=\"") + colour(p + 1) + "\" stroke=\"white\" stroke-width=\"0.5\"");
    }
  }
  return doc.finish();
}

std::string svg_residual_boxplots(const std::vector<NamedSummary>& boxes) {
  const double width = std::max(300.0, 90.0 * static_cast<double>(boxes.size()) + 100.0);
  Doc doc(static_cast<int>(width), 400);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& b : boxes) lo = std::min(lo, b.summary.min), hi = std::max(hi, b.summary.max);
  Range r = std::isfinite(lo) ? Range{lo, hi} : Range{0.0, 1.0};
  r.widen();
  Frame f{70, 40, width - 100, 300, {0.0, static_cast<double>(std::max<std::size_t>(boxes.size(), 1))}, r};
  doc.rect(f.left, f.top, f.width, f.height, "fill=\"none\" stroke=\"#444\"");
  for (int i = 0; i <= 4; ++i) {
    const double yv = r.lo + (r.hi - r.lo) * i / 4.0;
    doc.text(f.left - 6, f.py(yv) + 4, num(yv), "end", 10);
  }
  doc.text(width / 2, 22, "Residual boxplots", "middle", 14);
  doc.line(f.left, f.py(0.0), f.left + f.width, f.py(0.0), "stroke=\"#bbb\" stroke-dasharray=\"2 2\"");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& s = boxes[i].summary;
    const double cx = f.px(static_cast<double>(i) + 0.5);
    const std::string stroke = std::string("stroke=\"") + colour(i + 1) + "\" stroke-width=\"1.5\"";
    doc.line(cx, f.py(s.min), cx, f.py(s.q1), stroke);
    doc.line(cx, f.py(s.q3), cx, f.py(s.max), stroke);
    doc.line(cx - 10, f.py(s.min), cx + 10, f.py(s.min), stroke);
    doc.line(cx - 10, f.py(s.max), cx + 10, f.py(s.max), stroke);
    doc.rect(cx - 22, f.py(s.q3), 44, f.py(s.q1) - f.py(s.q3), "fill=\"#f4f4f4\" " + stroke);
    doc.line(cx - 22, f.py(s.median), cx + 22, f.py(s.median), "stroke=\"black\" stroke-width=\"2\"");
    doc.text(cx, f.top + f.height + 16, boxes[i].name, "middle");
  }
  return doc.finish();
}

}  // namespace ovicast
