#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace adaudit::report {

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Static SVG line chart; axes span the data range (y always includes 0).
std::string line_chart_svg(const std::vector<LineSeries>& series, const ChartLabels& labels);

/// Static SVG bar chart with one bar per category.
std::string bar_chart_svg(const std::vector<std::string>& categories, const std::vector<double>& values,
                          const ChartLabels& labels);

/// Scatter plot; `group` selects the colour of each point (0 or 1).
std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& group,
                        const std::vector<std::string>& group_names, const ChartLabels& labels);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace adaudit::report
