#pragma once

// Minimal standalone SVG plots of the CSV outputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pvn/error.hpp"
#include "pvn/io/csv.hpp"

namespace pvn {

enum class PlotKind { convergence, efficiency, scaling, cells };

inline PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "convergence") return PlotKind::convergence;
  if (s == "efficiency") return PlotKind::efficiency;
  if (s == "scaling") return PlotKind::scaling;
  if (s == "cells") return PlotKind::cells;
  throw ContractViolation("unknown plot kind '" + s + "'");
}

struct PlotOptions {
  bool timestamp = true;
};

namespace detail {

constexpr double kW = 640, kH = 440, kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;
inline const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  void fit(const std::vector<double>& v) {
    double a = std::numeric_limits<double>::infinity(), b = -a;
    for (double x : v)
      if (std::isfinite(x) && (!log || x > 0)) a = std::min(a, x), b = std::max(b, x);
    if (!std::isfinite(a)) a = log ? 1.0 : 0.0, b = log ? 10.0 : 1.0;
    if (log) {
      lo = std::floor(std::log10(a));
      hi = std::ceil(std::log10(b));
      if (hi == lo) hi += 1;
    } else {
      const double pad = (b > a ? (b - a) : std::max(1.0, std::abs(a))) * 0.05;
      lo = a - pad, hi = b + pad;
    }
  }
  double frac(double v) const {
    const double t = log ? std::log10(v) : v;
    return (t - lo) / (hi - lo);
  }
  std::vector<std::pair<double, std::string>> ticks() const {
    std::vector<std::pair<double, std::string>> out;
    char buf[32];
    if (log) {
      const int step = std::max(1, static_cast<int>((hi - lo) / 8));
      for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); e += step) {
        std::snprintf(buf, sizeof buf, "1e%d", e);
        out.push_back({std::pow(10.0, e), buf});
      }
    } else {
      for (int i = 0; i <= 5; ++i) {
        const double v = lo + (hi - lo) * i / 5;
        std::snprintf(buf, sizeof buf, "%.3g", v);
        out.push_back({v, buf});
      }
    }
    return out;
  }
};

class Canvas {
 public:
  Canvas(Axis x, Axis y, const std::string& title, const std::string& xl, const std::string& yl,
         const PlotOptions& opts)
      : x_(x), y_(y) {
    o_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (opts.timestamp) {
      char buf[64];
      const std::time_t now = std::time(nullptr);
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      o_ << "<!-- generated " << buf << " -->\n";
    }
    o_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o_ << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
    o_ << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
       << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const auto& [v, label] : x_.ticks()) {
      const double px = sx(v);
      o_ << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5
         << "\" stroke=\"black\"/><text x=\"" << px << "\" y=\"" << y0 + 18
         << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    for (const auto& [v, label] : y_.ticks()) {
      const double py = sy(v);
      o_ << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
         << "\" stroke=\"black\"/><text x=\"" << x0 - 8 << "\" y=\"" << py + 4
         << "\" text-anchor=\"end\">" << label << "</text>\n";
    }
    o_ << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">"
       << xl << "</text>\n";
    o_ << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << (y0 + y1) / 2 << ")\">" << yl << "</text>\n";
  }

  double sx(double v) const { return kLeft + x_.frac(v) * (kW - kRight - kLeft); }
  double sy(double v) const { return kH - kBottom - y_.frac(v) * (kH - kBottom - kTop); }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, int series,
                const std::string& name) {
    const char* color = kColors[series % 6];
    o_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (ok(xs[i], x_) && ok(ys[i], y_)) o_ << sx(xs[i]) << "," << sy(ys[i]) << " ";
    o_ << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (ok(xs[i], x_) && ok(ys[i], y_))
        o_ << "<circle cx=\"" << sx(xs[i]) << "\" cy=\"" << sy(ys[i]) << "\" r=\"2.5\" fill=\""
           << color << "\"/>\n";
    const double ly = kTop + 10 + 18 * series;
    o_ << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 30
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\""
       << kW - kRight + 35 << "\" y=\"" << ly + 4 << "\">" << name << "</text>\n";
  }

  void rect(double xc, double yc, double w, double h, bool filled) {
    const double px0 = sx(xc - w / 2), px1 = sx(xc + w / 2);
    const double py0 = sy(yc + h / 2), py1 = sy(yc - h / 2);
    o_ << "<rect x=\"" << px0 << "\" y=\"" << py0 << "\" width=\"" << px1 - px0 << "\" height=\""
       << py1 - py0 << "\" fill=\"" << (filled ? "#e040e0" : "none")
       << "\" fill-opacity=\"0.6\" stroke=\"#555555\" stroke-width=\"0.8\"/>\n";
  }

  std::string finish() {
    o_ << "</svg>\n";
    return o_.str();
  }

 private:
  static bool ok(double v, const Axis& a) { return std::isfinite(v) && (!a.log || v > 0); }
  Axis x_, y_;
  std::ostringstream o_;
};

/// Rows grouped by the value of a label column, in first-seen order.
inline std::vector<std::pair<std::string, std::vector<std::size_t>>> group_rows(const CsvTable& t,
                                                                                 int col) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& key = t.rows[r][col];
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == key; });
    if (it == out.end()) out.push_back({key, {r}});
    else it->second.push_back(r);
  }
  return out;
}

inline double cell_pitch(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
          v.end());
  return v.size() > 1 ? (v.back() - v.front()) / static_cast<double>(v.size() - 1) : 1.0;
}

}  // namespace detail

/// SVG for a CSV of the given kind. Throws on an empty table or a missing column.
inline std::string render_plot(const CsvTable& t, PlotKind kind, const PlotOptions& opts = {}) {
  using namespace detail;
  if (t.rows.empty()) throw ContractViolation("CSV has no data rows; nothing to plot");
  switch (kind) {
    case PlotKind::convergence: {
      const int m = t.require("method"), n = t.require("basis_size"), e = t.require("abs_error");
      Axis ax, ay{0, 1, true};
      std::vector<double> xs, ys;
      for (std::size_t r = 0; r < t.rows.size(); ++r)
        xs.push_back(t.number(r, n)), ys.push_back(t.number(r, e));
      ax.fit(xs);
      ay.fit(ys);
      Canvas c(ax, ay, "Convergence of the target level", "basis size", "|E - E_exact|", opts);
      int s = 0;
      for (const auto& [name, idx] : group_rows(t, m)) {
        std::vector<double> gx, gy;
        for (std::size_t r : idx) gx.push_back(t.number(r, n)), gy.push_back(t.number(r, e));
        c.polyline(gx, gy, s++, name);
      }
      return c.finish();
    }
    case PlotKind::efficiency: {
      const int h = t.require("hbar"), m = t.require("method"), q = t.require("ratio");
      Axis ax{0, 1, true}, ay;
      std::vector<double> xs, ys;
      for (std::size_t r = 0; r < t.rows.size(); ++r)
        xs.push_back(t.number(r, h)), ys.push_back(t.number(r, q));
      ax.fit(xs);
      ys.push_back(1.0);
      ay.fit(ys);
      Canvas c(ax, ay, "Efficiency ratio", "hbar", "basis functions per converged level", opts);
      int s = 0;
      for (const auto& [name, idx] : group_rows(t, m)) {
        std::vector<double> gx, gy;
        for (std::size_t r : idx) gx.push_back(t.number(r, h)), gy.push_back(t.number(r, q));
        c.polyline(gx, gy, s++, name);
      }
      return c.finish();
    }
    case PlotKind::scaling: {
      const int d = t.require("D");
      const char* series[] = {"V_mc", "V_semiclassical", "V_exponential_ref", "G_exact"};
      std::vector<int> cols;
      for (const char* name : series) cols.push_back(t.require(name));
      Axis ax, ay{0, 1, true};
      std::vector<double> xs, ys;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        xs.push_back(t.number(r, d));
        for (int col : cols) ys.push_back(t.number(r, col));
      }
      ax.fit(xs);
      ay.fit(ys);
      Canvas c(ax, ay, "Phase-space volume and state count", "D", "value", opts);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        std::vector<double> gy;
        for (std::size_t r = 0; r < t.rows.size(); ++r) gy.push_back(t.number(r, cols[k]));
        c.polyline(xs, gy, static_cast<int>(k), series[k]);
      }
      return c.finish();
    }
    case PlotKind::cells: {
      const int x = t.require("x_c"), p = t.require("p_c"), k = t.require("kept");
      if (t.column("y_c") >= 0)
        throw NotAvailable("cells plot draws 1-D lattices; this CSV has a 2-D lattice");
      std::vector<double> xs, ps;
      for (std::size_t r = 0; r < t.rows.size(); ++r)
        xs.push_back(t.number(r, x)), ps.push_back(t.number(r, p));
      const double a = cell_pitch(xs), dp = cell_pitch(ps);
      Axis ax, ay;
      std::vector<double> ex = xs, ep = ps;
      for (std::size_t r = 0; r < xs.size(); ++r)
        ex.push_back(xs[r] + a / 2), ex.push_back(xs[r] - a / 2), ep.push_back(ps[r] + dp / 2),
            ep.push_back(ps[r] - dp / 2);
      ax.fit(ex);
      ay.fit(ep);
      Canvas c(ax, ay, "Lattice cells (filled: kept)", "x", "p", opts);
      for (std::size_t r = 0; r < xs.size(); ++r) c.rect(xs[r], ps[r], a, dp, t.number(r, k) != 0.0);
      return c.finish();
    }
  }
  return "";
}

}  // namespace pvn
