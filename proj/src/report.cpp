#include "threadsumm/report.hpp"

#include <algorithm>
#include <sstream>

namespace threadsumm {

namespace {
std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}
}  // namespace

std::string position_scatter_svg(const PositionReport& report) {
  const int width = 640, height = 160, margin = 40;
  const std::size_t n = report.sentences.size();
  std::size_t max_index = 0;
  for (const auto& s : report.sentences) max_index = std::max(max_index, s.global_index);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "  <text x=\"" << margin << "\" y=\"20\" font-size=\"12\">"
      << "Represented (top) vs not represented (bottom) by sentence index</text>\n";
  svg << "  <line x1=\"" << margin << "\" y1=\"" << height - 30 << "\" x2=\""
      << width - margin << "\" y2=\"" << height - 30
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = report.sentences[i];
    double frac = max_index == 0 ? 0.0
                                 : static_cast<double>(s.global_index) /
                                       static_cast<double>(max_index);
    int x = margin + static_cast<int>(frac * (width - 2 * margin));
    int y = s.represented ? 60 : 100;
    const char* color = s.represented ? "#2a9d2a" : "#d03a3a";
    svg << "  <circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color
        << "\"><title>" << s.global_index << "</title></circle>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string coverage_bar_svg(const std::vector<std::pair<std::string, double>>& bars) {
  const int width = 520, bar_height = 24, gap = 10, margin = 140;
  const int height = 30 + static_cast<int>(bars.size()) * (bar_height + gap);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  int y = 20;
  for (const auto& [label, value] : bars) {
    int w = static_cast<int>(value * (width - margin - 40));
    svg << "  <text x=\"4\" y=\"" << y + bar_height - 8 << "\" font-size=\"12\">"
        << xml_escape(label) << "</text>\n";
    svg << "  <rect x=\"" << margin << "\" y=\"" << y << "\" width=\"" << w
        << "\" height=\"" << bar_height << "\" fill=\"#4a7ebb\"/>\n";
    std::ostringstream val;
    val.precision(3);
    val << value;
    svg << "  <text x=\"" << margin + w + 6 << "\" y=\"" << y + bar_height - 8
        << "\" font-size=\"12\">" << val.str() << "</text>\n";
    y += bar_height + gap;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string comparison_csv(
    const std::vector<std::string>& metric_names,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& rows) {
  std::ostringstream csv;
  csv << "run";
  for (const auto& m : metric_names) csv << "," << csv_escape(m);
  csv << "\n";
  for (const auto& [run, values] : rows) {
    csv << csv_escape(run);
    for (std::size_t i = 0; i < metric_names.size(); ++i)
      csv << "," << (i < values.size() ? csv_escape(values[i]) : "");
    csv << "\n";
  }
  return csv.str();
}

}  // namespace threadsumm
