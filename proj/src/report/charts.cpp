#include "adaudit/report/charts.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "adaudit/common/error.hpp"

namespace adaudit::report {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * (kHeight - kTop - kBottom); }
};

std::string header(const ChartLabels& labels) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n"
      "<text x=\"{2}\" y=\"{4}\" text-anchor=\"middle\">{5}</text>\n"
      "<text x=\"16\" y=\"{6}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {6})\">{7}</text>\n",
      kWidth, kHeight, (kLeft + kWidth - kRight) / 2, escape_xml(labels.title), kHeight - 12,
      escape_xml(labels.x_label), (kTop + kHeight - kBottom) / 2, escape_xml(labels.y_label));
}

std::string axes(const Frame& f, bool numeric_x) {
  std::string out = fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
      kLeft, kHeight - kBottom, kWidth - kRight, kTop);
  for (int i = 0; i <= 5; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / 5.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6, f.py(y) + 4, y);
    if (numeric_x) {
      const double x = f.x0 + (f.x1 - f.x0) * i / 5.0;
      out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", f.px(x),
                         kHeight - kBottom + 18, x);
    }
  }
  return out;
}

Frame frame_for(const std::vector<double>& xs, const std::vector<double>& ys) {
  Frame f{0, 1, 0, 1};
  if (!xs.empty()) {
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    f.x0 = *xmin;
    f.x1 = *xmax;
  }
  if (!ys.empty()) {
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    f.y0 = std::min(0.0, *ymin);
    f.y1 = std::max(*ymax, f.y0 + 1e-9);
  }
  return f;
}

}  // namespace

std::string line_chart_svg(const std::vector<LineSeries>& series, const ChartLabels& labels) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    require(s.x.size() == s.y.size(), "line chart series '" + s.name + "' has mismatched x/y");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Frame f = frame_for(xs, ys);
  std::string svg = header(labels) + axes(f, true);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < series[k].x.size(); ++i)
      pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", f.px(series[k].x[i]), f.py(series[k].y[i]));
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", colour, pts);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", kWidth - kRight - 150,
                       kTop + 14.0 * static_cast<double>(k + 1), colour, escape_xml(series[k].name));
  }
  return svg + "</svg>\n";
}

std::string bar_chart_svg(const std::vector<std::string>& categories, const std::vector<double>& values,
                          const ChartLabels& labels) {
  require(categories.size() == values.size(), "bar chart categories and values differ in length");
  Frame f = frame_for({}, values);
  std::string svg = header(labels) + axes(f, false);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(1, values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = kLeft + slot * static_cast<double>(i);
    const double top = f.py(values[i]);
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", x + slot * 0.1,
                       top, slot * 0.8, f.py(0.0) - top, kPalette[0]);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x + slot / 2,
                       kHeight - kBottom + 18, escape_xml(categories[i]));
  }
  return svg + "</svg>\n";
}

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& group,
                        const std::vector<std::string>& group_names, const ChartLabels& labels) {
  require(x.size() == y.size() && x.size() == group.size(), "scatter inputs differ in length");
  const Frame f = frame_for(x, y);
  std::string svg = header(labels) + axes(f, true);
  for (std::size_t i = 0; i < x.size(); ++i)
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n", f.px(x[i]),
                       f.py(y[i]), kPalette[static_cast<std::size_t>(group[i]) % std::size(kPalette)]);
  for (std::size_t g = 0; g < group_names.size(); ++g)
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", kWidth - kRight - 150,
                       kTop + 14.0 * static_cast<double>(g + 1), kPalette[g % std::size(kPalette)],
                       escape_xml(group_names[g]));
  return svg + "</svg>\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  out << content;
}

}  // namespace adaudit::report
