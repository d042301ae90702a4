#include "catou/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "catou/io.hpp"
#include "catou/stats.hpp"

namespace catou::plot {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (map(v) - lo) / (hi - lo); }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) t.push_back(std::pow(10.0, e));
      if (t.size() < 2) t = {std::pow(10.0, lo), std::pow(10.0, hi)};
      return t;
    }
    const double raw = (hi - lo) / 5.0, mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }
};

Axis make_axis(std::span<const Series> series, bool use_x, bool log) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) throw std::invalid_argument("render_svg: non-finite value");
      if (log && !(v > 0.0)) throw std::invalid_argument("render_svg: non-positive value on a log axis");
      const double m = log ? std::log10(v) : v;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  const double pad = hi > lo ? 0.05 * (hi - lo) : (log ? 0.5 : std::max(0.5, 0.1 * std::abs(lo)));
  return {lo - pad, hi + pad, log};
}

}  // namespace

double loglog_slope(const Series& s) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) throw std::invalid_argument("loglog_slope: non-positive value");
    lx.push_back(std::log(s.x[i]));
    ly.push_back(std::log(s.y[i]));
  }
  return stats::least_squares(lx, ly).slope;
}

std::string render_svg(std::span<const Series> series, const PlotOptions& opt) {
  if (series.empty()) throw std::invalid_argument("render_svg: no series");
  for (const auto& s : series)
    if (s.x.empty() || s.x.size() != s.y.size()) throw std::invalid_argument("render_svg: empty or ragged series");
  const Axis ax = make_axis(series, true, opt.loglog), ay = make_axis(series, false, opt.loglog);
  const double W = opt.width, H = opt.height, left = 70, right = 20, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double v) { return left + ax.frac(v) * pw; };
  auto py = [&](double v) { return top + (1.0 - ay.frac(v)) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n"
     << "<text x=\"" << num(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
     << "</text>\n"
     << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    if (ax.frac(t) < -1e-9 || ax.frac(t) > 1 + 1e-9) continue;
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(px(t)) << "\" y2=\""
       << num(top + ph + 5) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
       << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    if (ay.frac(t) < -1e-9 || ay.frac(t) > 1 + 1e-9) continue;
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left) << "\" y2=\""
       << num(py(t)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\">"
     << escape(opt.xlabel) << (opt.loglog ? " (log)" : "") << "</text>\n"
     << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num(top + ph / 2) << ")\">" << escape(opt.ylabel) << (opt.loglog ? " (log)" : "") << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    if (s.line && s.x.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
      os << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    const double ly = top + 16 + 16 * static_cast<double>(k);
    os << "<rect x=\"" << num(left + 10) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\"" << color
       << "\"/>\n"
       << "<text x=\"" << num(left + 26) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
  }
  if (opt.fit_slope_of) {
    if (*opt.fit_slope_of >= series.size()) throw std::invalid_argument("render_svg: fit_slope_of out of range");
    char buf[64];
    std::snprintf(buf, sizeof buf, "fitted slope %.4f", loglog_slope(series[*opt.fit_slope_of]));
    os << "<text x=\"" << num(left + pw - 10) << "\" y=\"" << num(top + ph - 12) << "\" text-anchor=\"end\">" << buf
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(std::span<const Series> series, const std::filesystem::path& path, const PlotOptions& opt) {
  io::write_text(path, render_svg(series, opt));
}

}  // namespace catou::plot
