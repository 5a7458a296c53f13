#include "llcbench/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

namespace llcbench::bench {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 130, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Point {
  double x, y;
  std::optional<double> err;
};

struct Series {
  std::string name;
  std::vector<Point> points;
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad(double fallback_lo, double fallback_hi) {
    if (empty()) {
      lo = fallback_lo;
      hi = fallback_hi;
    } else if (lo == hi) {
      const double w = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= w;
      hi += w;
    } else {
      const double w = (hi - lo) * 0.05;
      lo -= w;
      hi += w;
    }
  }
};

class Svg {
 public:
  Svg(std::string title, std::string xlabel, std::string ylabel, bool logx, bool logy)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), logx_(logx), logy_(logy) {}

  std::string render(const std::vector<Series>& series, bool lines) {
    Range xr, yr;
    for (const auto& s : series)
      for (const auto& p : s.points) {
        xr.add(tx(p.x));
        yr.add(ty(p.y));
        if (p.err) {
          yr.add(ty(p.y - *p.err));
          yr.add(ty(p.y + *p.err));
        }
      }
    if (logx_) {
      if (xr.empty()) xr = {-6, -2};
      xr.lo = std::floor(xr.lo);
      xr.hi = std::ceil(xr.hi);
      if (xr.lo == xr.hi) xr.hi += 1;
    } else {
      xr.pad(0, 1);
    }
    yr.pad(0, 1);
    x_ = xr;
    y_ = yr;

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title_) +
         "</text>\n";
    axes(o);
    for (std::size_t k = 0; k < series.size(); ++k) plot(o, series[k], kPalette[k % std::size(kPalette)], lines, k);
    o += "</svg>\n";
    return o;
  }

 private:
  double tx(double x) const { return logx_ ? (x > 0 ? std::log10(x) : std::nan("")) : x; }
  double ty(double y) const { return logy_ ? (y > 0 ? std::log10(y) : std::nan("")) : y; }
  double px(double x) const { return kLeft + (tx(x) - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    const double v = std::clamp(ty(y), y_.lo, y_.hi);
    return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }

  void axes(std::string& o) const {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    o += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) + "\" height=\"" +
         fmt(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
    if (logx_) {
      for (double e = x_.lo; e <= x_.hi + 1e-9; e += 1.0) {
        const double p = kLeft + (e - x_.lo) / (x_.hi - x_.lo) * (x1 - x0);
        o += "<line x1=\"" + fmt(p) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(p) + "\" y2=\"" + fmt(y0 + 5) +
             "\" stroke=\"black\"/>\n";
        o += "<text x=\"" + fmt(p) + "\" y=\"" + fmt(y0 + 18) + "\" text-anchor=\"middle\">1e" +
             std::to_string(static_cast<int>(std::lround(e))) + "</text>\n";
      }
    } else {
      for (int i = 0; i <= 4; ++i) {
        const double v = x_.lo + (x_.hi - x_.lo) * i / 4.0;
        const double p = kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (x1 - x0);
        o += "<text x=\"" + fmt(p) + "\" y=\"" + fmt(y0 + 18) + "\" text-anchor=\"middle\">" + label(v) +
             "</text>\n";
      }
    }
    for (int i = 0; i <= 4; ++i) {
      const double v = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      const double p = y0 - (v - y_.lo) / (y_.hi - y_.lo) * (y0 - y1);
      o += "<line x1=\"" + fmt(x0 - 5) + "\" y1=\"" + fmt(p) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(p) +
           "\" stroke=\"black\"/>\n";
      o += "<text x=\"" + fmt(x0 - 8) + "\" y=\"" + fmt(p + 4) + "\" text-anchor=\"end\">" +
           label(logy_ ? std::pow(10.0, v) : v) + "</text>\n";
    }
    o += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(kHeight - 12) + "\" text-anchor=\"middle\">" +
         escape(xlabel_) + "</text>\n";
    o += "<text transform=\"translate(16," + fmt((y0 + y1) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(ylabel_) + "</text>\n";
  }

  void plot(std::string& o, const Series& s, const char* color, bool lines, std::size_t index) const {
    std::vector<Point> pts;
    for (const auto& p : s.points)
      if (std::isfinite(tx(p.x)) && std::isfinite(ty(p.y))) pts.push_back(p);
    o += "<g stroke=\"" + std::string(color) + "\" fill=\"" + color + "\">\n";
    if (lines && pts.size() > 1) {
      o += "<polyline fill=\"none\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) o += (i ? " " : "") + fmt(px(pts[i].x)) + "," + fmt(py(pts[i].y));
      o += "\"/>\n";
    }
    for (const auto& p : pts) {
      if (p.err && std::isfinite(*p.err))
        o += "<line x1=\"" + fmt(px(p.x)) + "\" y1=\"" + fmt(py(p.y - *p.err)) + "\" x2=\"" + fmt(px(p.x)) +
             "\" y2=\"" + fmt(py(p.y + *p.err)) + "\"/>\n";
      o += "<circle cx=\"" + fmt(px(p.x)) + "\" cy=\"" + fmt(py(p.y)) + "\" r=\"3\"/>\n";
    }
    const double ly = kTop + 14.0 * static_cast<double>(index) + 8;
    const double lx = kWidth - kRight + 12;
    o += "<circle cx=\"" + fmt(lx) + "\" cy=\"" + fmt(ly - 4) + "\" r=\"3\"/>\n";
    o += "<text x=\"" + fmt(lx + 8) + "\" y=\"" + fmt(ly) + "\" stroke=\"none\">" + escape(s.name) + "</text>\n";
    o += "</g>\n";
  }

  std::string title_, xlabel_, ylabel_;
  bool logx_, logy_;
  Range x_, y_;
};

template <typename F>
std::vector<Series> by_algorithm(const SweepSummary& s, F&& point) {
  std::map<int, Series> out;
  const auto& all = all_algorithms();
  for (const auto& g : s.groups) {
    const int idx = static_cast<int>(std::find(all.begin(), all.end(), g.algorithm) - all.begin());
    auto& series = out[idx];
    series.name = std::string(to_string(g.algorithm));
    if (auto p = point(g)) series.points.push_back(*p);
  }
  std::vector<Series> v;
  for (auto& [_, series] : out) {
    std::sort(series.points.begin(), series.points.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    v.push_back(std::move(series));
  }
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const auto probe = dir / ".llcbench-write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

bool scatter_eligible(const GroupSummary& g) {
  return g.count > 0 && g.nan_fraction < kScatterNanThreshold && g.mean_relative_error && g.std_relative_error;
}

std::string relative_error_chart(const SweepSummary& s) {
  auto series = by_algorithm(s, [](const GroupSummary& g) -> std::optional<Point> {
    if (!g.mean_relative_error) return std::nullopt;
    return Point{g.epsilon, *g.mean_relative_error, g.std_relative_error};
  });
  return Svg("Mean relative error vs step size", "step size", "relative error", true, false).render(series, true);
}

std::string nan_fraction_chart(const SweepSummary& s) {
  auto series = by_algorithm(s, [](const GroupSummary& g) -> std::optional<Point> {
    if (g.count == 0) return std::nullopt;
    return Point{g.epsilon, g.nan_fraction, std::nullopt};
  });
  return Svg("NaN fraction vs step size", "step size", "NaN fraction", true, false).render(series, true);
}

std::string mean_std_scatter(const SweepSummary& s) {
  auto series = by_algorithm(s, [](const GroupSummary& g) -> std::optional<Point> {
    if (!scatter_eligible(g)) return std::nullopt;
    return Point{*g.std_relative_error, *g.mean_relative_error, std::nullopt};
  });
  return Svg("Mean vs std of relative error (NaN fraction < 10%)", "std relative error", "mean relative error", false,
             false)
      .render(series, false);
}

std::string order_preservation_chart(const SweepSummary& s) {
  auto series = by_algorithm(s, [](const GroupSummary& g) -> std::optional<Point> {
    if (!g.order_preservation) return std::nullopt;
    return Point{g.epsilon, *g.order_preservation, std::nullopt};
  });
  return Svg("Order preservation vs step size", "step size", "order preservation rate", true, false)
      .render(series, true);
}

ReportFiles emit_charts(const SweepSummary& summary, const std::filesystem::path& out_dir) {
  ensure_writable(out_dir);
  ReportFiles files;
  files.summary = out_dir / "summary.json";
  write_file(files.summary, summary_to_json(summary).dump(2) + "\n");
  const std::pair<const char*, std::string> charts[] = {
      {"relative_error.svg", relative_error_chart(summary)},
      {"nan_fraction.svg", nan_fraction_chart(summary)},
      {"mean_std_scatter.svg", mean_std_scatter(summary)},
      {"order_preservation.svg", order_preservation_chart(summary)},
  };
  for (const auto& [name, body] : charts) {
    files.charts.push_back(out_dir / name);
    write_file(files.charts.back(), body);
  }
  return files;
}

ReportFiles emit_report(const SweepSummary& summary, const json& records_header,
                        const std::vector<ExperimentRecord>& records, const std::filesystem::path& out_dir) {
  ensure_writable(out_dir);
  std::string body = records_header.dump() + "\n";
  for (const auto& r : records) body += record_to_json(r).dump() + "\n";
  const auto records_path = out_dir / "records.jsonl";
  write_file(records_path, body);
  auto files = emit_charts(summary, out_dir);
  files.records = records_path;
  return files;
}

}  // namespace llcbench::bench
