#include "evanshock/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evanshock/types.hpp"

namespace evanshock::artifacts {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void comment_lines(std::ostringstream& os, const std::string& prefix, const std::string& text) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) os << prefix << line << '\n';
}

}  // namespace

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows, const std::string& config) {
  std::ostringstream os;
  os << "# schema: " << kSchema << '\n';
  comment_lines(os, "# ", config);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw DomainError("csv: row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

nlohmann::ordered_json document(nlohmann::ordered_json body, const std::string& config) {
  nlohmann::ordered_json doc;
  doc["schema"] = kSchema;
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  doc["config"] = config;
  return doc;
}

const char* to_string(SvgKind kind) {
  switch (kind) {
    case SvgKind::g_curve: return "g_curve";
    case SvgKind::boundary_map: return "boundary_map";
    case SvgKind::contour_pair: return "contour_pair";
    case SvgKind::snapshot_panel: return "snapshot_panel";
  }
  return "unknown";
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double x, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

// Ticks at 1, 2, 5 times powers of ten.
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return t;
}

void draw_panel(std::ostringstream& os, const Panel& p, double ox, double oy, double w, double h) {
  const double ml = 62, mr = 14, mt = 26, mb = 44;
  const double pw = w - ml - mr, ph = h - mt - mb;
  auto tx = [&](double x) { return p.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return p.log_y ? std::log10(y) : y; };

  Range rx, ry;
  for (const Series& s : p.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if ((p.log_x && !(s.x[i] > 0)) || (p.log_y && !(s.y[i] > 0))) continue;
      rx.add(tx(s.x[i]));
      ry.add(ty(s.y[i]));
    }
  if (!(rx.lo <= rx.hi) || !(ry.lo <= ry.hi)) throw DomainError("emit_svg: panel has no finite data");
  if (rx.hi - rx.lo < 1e-300) rx.lo -= 0.5, rx.hi += 0.5;
  if (ry.hi - ry.lo < 1e-300) ry.lo -= 0.5, ry.hi += 0.5;
  const double padx = 0.03 * (rx.hi - rx.lo), pady = 0.05 * (ry.hi - ry.lo);
  rx.lo -= padx, rx.hi += padx, ry.lo -= pady, ry.hi += pady;

  auto px = [&](double x) { return ox + ml + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double y) { return oy + mt + (ry.hi - y) / (ry.hi - ry.lo) * ph; };

  os << "<g>\n";
  os << "<rect x=\"" << fmt(ox + ml, 6) << "\" y=\"" << fmt(oy + mt, 6) << "\" width=\""
     << fmt(pw, 6) << "\" height=\"" << fmt(ph, 6)
     << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << fmt(ox + ml + pw / 2, 6) << "\" y=\"" << fmt(oy + 17, 6)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.title) << "</text>\n";
  os << "<text x=\"" << fmt(ox + ml + pw / 2, 6) << "\" y=\"" << fmt(oy + h - 6, 6)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.x_label) << "</text>\n";
  os << "<text transform=\"translate(" << fmt(ox + 14, 6) << "," << fmt(oy + mt + ph / 2, 6)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.y_label)
     << "</text>\n";

  auto tick_label = [](double v, bool log) { return log ? "1e" + fmt(v, 3) : fmt(v); };
  for (double t : linear_ticks(rx.lo, rx.hi)) {
    if (p.log_x && t != std::round(t)) continue;
    os << "<line x1=\"" << fmt(px(t), 6) << "\" y1=\"" << fmt(oy + mt + ph, 6) << "\" x2=\""
       << fmt(px(t), 6) << "\" y2=\"" << fmt(oy + mt + ph + 4, 6) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fmt(px(t), 6) << "\" y=\"" << fmt(oy + mt + ph + 16, 6)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(t, p.log_x) << "</text>\n";
  }
  for (double t : linear_ticks(ry.lo, ry.hi)) {
    if (p.log_y && t != std::round(t)) continue;
    os << "<line x1=\"" << fmt(ox + ml - 4, 6) << "\" y1=\"" << fmt(py(t), 6) << "\" x2=\""
       << fmt(ox + ml, 6) << "\" y2=\"" << fmt(py(t), 6) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fmt(ox + ml - 6, 6) << "\" y=\"" << fmt(py(t) + 3, 6)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(t, p.log_y) << "</text>\n";
  }

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const Series& s = p.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::ostringstream pts;
    std::vector<std::pair<double, double>> marks;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if ((p.log_x && !(s.x[i] > 0)) || (p.log_y && !(s.y[i] > 0))) continue;
      const double X = tx(s.x[i]), Y = ty(s.y[i]);
      if (!std::isfinite(X) || !std::isfinite(Y)) continue;
      pts << fmt(px(X), 6) << ',' << fmt(py(Y), 6) << ' ';
      marks.emplace_back(px(X), py(Y));
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    if (s.markers)
      for (auto [mx, my] : marks)
        os << "<circle cx=\"" << fmt(mx, 6) << "\" cy=\"" << fmt(my, 6) << "\" r=\"1.8\" fill=\""
           << color << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = oy + mt + 14 + 14 * k;
      os << "<line x1=\"" << fmt(ox + ml + pw - 120, 6) << "\" y1=\"" << fmt(ly - 4, 6)
         << "\" x2=\"" << fmt(ox + ml + pw - 100, 6) << "\" y2=\"" << fmt(ly - 4, 6)
         << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
      os << "<text x=\"" << fmt(ox + ml + pw - 96, 6) << "\" y=\"" << fmt(ly, 6)
         << "\" font-size=\"10\">" << escape(s.label) << "</text>\n";
    }
  }
  os << "</g>\n";
}

}  // namespace

std::string emit_svg(SvgKind kind, const std::vector<Panel>& panels, const std::string& config) {
  std::size_t expected = 1, cols = 1;
  switch (kind) {
    case SvgKind::g_curve:
    case SvgKind::boundary_map: expected = 1, cols = 1; break;
    case SvgKind::contour_pair: expected = 2, cols = 2; break;
    case SvgKind::snapshot_panel: expected = 4, cols = 2; break;
  }
  if (panels.size() != expected)
    throw DomainError(std::string("emit_svg: ") + to_string(kind) + " takes " +
                      std::to_string(expected) + " panel(s)");
  for (const Panel& p : panels) {
    bool any = false;
    for (const Series& s : p.series) any = any || (!s.x.empty() && !s.y.empty());
    if (!any) throw DomainError("emit_svg: empty dataset");
  }

  const double w = 440, h = 330;
  const std::size_t rows = (expected + cols - 1) / cols;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w * cols, 6) << "\" height=\""
     << fmt(h * rows, 6) << "\" viewBox=\"0 0 " << fmt(w * cols, 6) << ' ' << fmt(h * rows, 6)
     << "\" font-family=\"sans-serif\">\n";
  os << "<!--\nschema: " << kSchema << "\nkind: " << to_string(kind) << '\n';
  std::string cfg = config;
  for (std::size_t pos; (pos = cfg.find("--")) != std::string::npos;) cfg.replace(pos, 2, "- -");
  os << cfg << (cfg.empty() || cfg.back() == '\n' ? "" : "\n") << "-->\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i)
    draw_panel(os, panels[i], w * (i % cols), h * (i / cols), w, h);
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

}  // namespace evanshock::artifacts
