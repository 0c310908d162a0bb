#include "lightpath/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lightpath::harness {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 60;

struct Scale {
  double lo;
  double hi;
  double px_lo;
  double px_hi;
  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

std::pair<double, double> Padded(double lo, double hi) {
  if (hi <= lo) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

class Svg {
 public:
  Svg() {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  std::ostringstream& os() { return os_; }

  void Line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0,
            const std::string& dash = "") {
    os_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2 << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << width << "\"";
    if (!dash.empty()) os_ << " stroke-dasharray=\"" << dash << "\"";
    os_ << "/>\n";
  }
  void Rect(double x, double y, double w, double h, const std::string& fill, const std::string& stroke = "none") {
    os_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h << "\" fill=\"" << fill
        << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void Text(double x, double y, const std::string& text, const std::string& anchor = "middle", double rotate = 0) {
    os_ << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor << "\"";
    if (rotate != 0) os_ << " transform=\"rotate(" << rotate << ' ' << x << ' ' << y << ")\"";
    os_ << ">" << Escape(text) << "</text>\n";
  }

  void Frame(const Scale& y, const std::string& title, const std::string& y_label) {
    Text(kWidth / 2, 24, title);
    Line(kLeft, kTop, kLeft, kHeight - kBottom, "black");
    Line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "black");
    for (int i = 0; i <= 5; ++i) {
      const double v = y.lo + (y.hi - y.lo) * i / 5.0;
      const double py = y(v);
      Line(kLeft - 4, py, kLeft, py, "black");
      std::ostringstream label;
      label.precision(4);
      label << v;
      Text(kLeft - 6, py + 4, label.str(), "end");
    }
    if (!y_label.empty()) Text(18, (kTop + kHeight - kBottom) / 2, y_label, "middle", -90);
  }

  void Save(const std::filesystem::path& path) {
    os_ << "</svg>\n";
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << os_.str();
  }

 private:
  std::ostringstream os_;
};

}  // namespace

void WriteBoxplotSvg(const std::filesystem::path& path, const std::vector<std::pair<std::string, Summary>>& boxes,
                     const std::string& title, const std::string& y_label) {
  if (boxes.empty()) throw std::invalid_argument("boxplot needs at least one box");
  double lo = boxes.front().second.min;
  double hi = boxes.front().second.max;
  for (const auto& [_, s] : boxes) {
    lo = std::min(lo, s.min);
    hi = std::max(hi, s.max);
  }
  const auto [ylo, yhi] = Padded(lo, hi);
  const Scale y{ylo, yhi, kHeight - kBottom, kTop};
  Svg svg;
  svg.Frame(y, title, y_label);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Summary& s = boxes[i].second;
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(30.0, slot * 0.3);
    svg.Line(cx, y(s.whisker_low), cx, y(s.q1), "black");
    svg.Line(cx, y(s.q3), cx, y(s.whisker_high), "black");
    svg.Line(cx - half / 2, y(s.whisker_low), cx + half / 2, y(s.whisker_low), "black");
    svg.Line(cx - half / 2, y(s.whisker_high), cx + half / 2, y(s.whisker_high), "black");
    svg.Rect(cx - half, y(s.q3), 2 * half, y(s.q1) - y(s.q3), "#9ecae1", "black");
    svg.Line(cx - half, y(s.median), cx + half, y(s.median), "#d62728", 2.0);
    svg.Text(cx, kHeight - kBottom + 18, boxes[i].first);
  }
  svg.Save(path);
}

void WriteWaterfallSvg(const std::filesystem::path& path, std::vector<int> deltas, const std::string& title) {
  if (deltas.empty()) throw std::invalid_argument("waterfall needs at least one value");
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  const double lo = std::min(0, deltas.back());
  const double hi = std::max(0, deltas.front());
  const auto [ylo, yhi] = Padded(lo, hi);
  const Scale y{ylo, yhi, kHeight - kBottom, kTop};
  Svg svg;
  svg.Frame(y, title, "accepted services (A - B)");
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double x = kLeft + slot * static_cast<double>(i);
    const double top = y(std::max(0, deltas[i]));
    const double bottom = y(std::min(0, deltas[i]));
    svg.Rect(x + slot * 0.1, top, slot * 0.8, std::max(0.5, bottom - top), deltas[i] >= 0 ? "#2ca02c" : "#d62728");
  }
  svg.Line(kLeft, y(0), kWidth - kRight, y(0), "black");
  svg.Text(kWidth / 2, kHeight - 20, "episodes, sorted by delta");
  svg.Save(path);
}

void WriteCurveSvg(const std::filesystem::path& path, const CurveSeries& curve, std::optional<double> baseline,
                   const std::string& baseline_label, const std::string& title) {
  const std::size_t n = curve.x.size();
  if (n == 0 || curve.mean.size() != n || curve.std.size() != n) throw std::invalid_argument("curve series shape mismatch");
  double lo = curve.mean[0] - curve.std[0];
  double hi = curve.mean[0] + curve.std[0];
  for (std::size_t i = 0; i < n; ++i) {
    lo = std::min(lo, curve.mean[i] - curve.std[i]);
    hi = std::max(hi, curve.mean[i] + curve.std[i]);
  }
  if (baseline) {
    lo = std::min(lo, *baseline);
    hi = std::max(hi, *baseline);
  }
  const auto [ylo, yhi] = Padded(lo, hi);
  const auto [xlo, xhi] = Padded(curve.x.front(), curve.x.back());
  const Scale y{ylo, yhi, kHeight - kBottom, kTop};
  const Scale x{xlo, xhi, kLeft, kWidth - kRight};
  Svg svg;
  svg.Frame(y, title, "accepted services");
  auto& os = svg.os();
  os << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < n; ++i) os << x(curve.x[i]) << ',' << y(curve.mean[i] + curve.std[i]) << ' ';
  for (std::size_t i = n; i-- > 0;) os << x(curve.x[i]) << ',' << y(curve.mean[i] - curve.std[i]) << ' ';
  os << "\"/>\n<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < n; ++i) os << x(curve.x[i]) << ',' << y(curve.mean[i]) << ' ';
  os << "\"/>\n";
  if (baseline) {
    svg.Line(kLeft, y(*baseline), kWidth - kRight, y(*baseline), "#d62728", 1.5, "6,4");
    svg.Text(kWidth - kRight - 4, y(*baseline) - 6, baseline_label, "end");
  }
  std::ostringstream right;
  right << curve.x.back();
  svg.Text(kLeft, kHeight - kBottom + 18, std::to_string(static_cast<long long>(curve.x.front())), "start");
  svg.Text(kWidth - kRight, kHeight - kBottom + 18, right.str(), "end");
  svg.Text(kWidth / 2, kHeight - 20, "environment steps");
  svg.Save(path);
}

}  // namespace lightpath::harness
