#include <algorithm>
#include <cmath>
#include <cstdio>

#include "specnego/error.hpp"
#include "specnego/io.hpp"

namespace specnego::io {

namespace {

constexpr double kWidth = 760, kHeight = 440;
constexpr double kLeft = 80, kRight = 170, kTop = 50, kBottom = 70;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
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

double y_value(const experiments::MetricsRow& r, const std::string& column) {
  if (column == "total_messages") return static_cast<double>(r.total_messages);
  if (column == "run_response") return r.run_response;
  throw StructuralError("unsupported plot column '" + column + "'");
}

// Rounds up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
  if (v <= 0) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= v) return m * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v) {
  char buf[32];
  if (std::fabs(v - std::round(v)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", v);
  }
  return buf;
}

void frame(std::string& svg, const experiments::MetricsTable& t, const std::string& y_col,
           double y_max) {
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fx(kWidth) + "\" height=\"" +
         fx(kHeight) + "\" viewBox=\"0 0 " + fx(kWidth) + " " + fx(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fx(kWidth) + "\" height=\"" + fx(kHeight) +
         "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fx(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(std::string(experiments::to_string(t.id)) + ": " + t.title) + "</text>\n";
  const double x0 = kLeft, y0 = kTop + kPlotH;
  svg += "<line x1=\"" + fx(x0) + "\" y1=\"" + fx(y0) + "\" x2=\"" + fx(x0 + kPlotW) + "\" y2=\"" +
         fx(y0) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fx(x0) + "\" y1=\"" + fx(kTop) + "\" x2=\"" + fx(x0) + "\" y2=\"" +
         fx(y0) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = y0 - kPlotH * i / 5.0;
    svg += "<line x1=\"" + fx(x0 - 4) + "\" y1=\"" + fx(y) + "\" x2=\"" + fx(x0 + kPlotW) +
           "\" y2=\"" + fx(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fx(x0 - 8) + "\" y=\"" + fx(y + 4) + "\" text-anchor=\"end\">" +
           tick_label(v) + "</text>\n";
  }
  svg += "<text x=\"" + fx(x0 + kPlotW / 2) + "\" y=\"" + fx(kHeight - 18) +
         "\" text-anchor=\"middle\">" + escape(t.swept_name) + "</text>\n";
  svg += "<text x=\"20\" y=\"" + fx(kTop + kPlotH / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + fx(kTop + kPlotH / 2) + ")\">" +
         escape(y_col) + "</text>\n";
}

void legend(std::string& svg, const std::vector<std::string>& names) {
  for (std::size_t s = 0; s < names.size(); ++s) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(s);
    const double x = kLeft + kPlotW + 20;
    svg += "<rect x=\"" + fx(x) + "\" y=\"" + fx(y - 9) + "\" width=\"12\" height=\"12\" fill=\"" +
           kPalette[s % std::size(kPalette)] + "\"/>\n";
    svg += "<text x=\"" + fx(x + 18) + "\" y=\"" + fx(y + 2) + "\">" + escape(names[s]) +
           "</text>\n";
  }
}

std::string line_chart(const experiments::MetricsTable& t, const std::string& y_col) {
  double y_max = 0, x_min = t.rows.front().swept, x_max = x_min;
  for (const auto& r : t.rows) {
    y_max = std::max(y_max, y_value(r, y_col));
    x_min = std::min(x_min, r.swept);
    x_max = std::max(x_max, r.swept);
  }
  y_max = nice_ceiling(y_max);
  std::string svg;
  frame(svg, t, y_col, y_max);
  auto px = [&](double x) {
    if (x_max == x_min) return kLeft + kPlotW / 2;
    return kLeft + 20 + (kPlotW - 40) * (x - x_min) / (x_max - x_min);
  };
  auto py = [&](double y) { return kTop + kPlotH - kPlotH * y / y_max; };

  std::string points;
  for (const auto& r : t.rows) {
    if (!points.empty()) points += ' ';
    points += fx(px(r.swept)) + "," + fx(py(y_value(r, y_col)));
  }
  svg += "<polyline fill=\"none\" stroke=\"" + std::string(kPalette[0]) +
         "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  for (const auto& r : t.rows) {
    const double x = px(r.swept), y = py(y_value(r, y_col));
    svg += "<circle cx=\"" + fx(x) + "\" cy=\"" + fx(y) + "\" r=\"4\" fill=\"" + kPalette[0] +
           "\"/>\n";
    svg += "<text x=\"" + fx(x) + "\" y=\"" + fx(kTop + kPlotH + 18) +
           "\" text-anchor=\"middle\">" + escape(r.label) + "</text>\n";
  }
  legend(svg, {y_col});
  svg += "</svg>\n";
  return svg;
}

std::string bar_chart(const experiments::MetricsTable& t, const std::string& y_col) {
  std::vector<double> categories;
  std::vector<std::string> series;
  double y_max = 0;
  for (const auto& r : t.rows) {
    if (std::find(categories.begin(), categories.end(), r.swept) == categories.end()) {
      categories.push_back(r.swept);
    }
    if (std::find(series.begin(), series.end(), r.label) == series.end()) series.push_back(r.label);
    y_max = std::max(y_max, y_value(r, y_col));
  }
  y_max = nice_ceiling(y_max);
  std::string svg;
  frame(svg, t, y_col, y_max);

  const double slot = kPlotW / static_cast<double>(categories.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    std::vector<const experiments::MetricsRow*> in_cat;
    for (const auto& r : t.rows) {
      if (r.swept == categories[c]) in_cat.push_back(&r);
    }
    const double bar_w = slot * 0.8 / static_cast<double>(in_cat.size());
    const double start = kLeft + slot * static_cast<double>(c) + slot * 0.1;
    for (std::size_t b = 0; b < in_cat.size(); ++b) {
      const auto& r = *in_cat[b];
      const double v = y_value(r, y_col);
      const double h = kPlotH * v / y_max;
      const auto sidx = static_cast<std::size_t>(
          std::find(series.begin(), series.end(), r.label) - series.begin());
      svg += "<rect x=\"" + fx(start + bar_w * static_cast<double>(b)) + "\" y=\"" +
             fx(kTop + kPlotH - h) + "\" width=\"" + fx(bar_w * 0.95) + "\" height=\"" + fx(h) +
             "\" fill=\"" + kPalette[sidx % std::size(kPalette)] + "\"><title>" +
             escape(r.label) + ": " + tick_label(v) + "</title></rect>\n";
    }
    svg += "<text x=\"" + fx(start + slot * 0.4) + "\" y=\"" + fx(kTop + kPlotH + 18) +
           "\" text-anchor=\"middle\">" + tick_label(categories[c]) + "</text>\n";
  }
  legend(svg, series);
  svg += "</svg>\n";
  return svg;
}

}  // namespace

PlotSpec default_plot(experiments::ExperimentId id) {
  switch (id) {
    case experiments::ExperimentId::CsuCapacity:
    case experiments::ExperimentId::CsuCount: return {PlotKind::Line, "run_response"};
    case experiments::ExperimentId::MessagesVsCsu: return {PlotKind::Bar, "total_messages"};
    case experiments::ExperimentId::Topologies: return {PlotKind::Bar, "total_messages"};
  }
  return {};
}

std::string render_svg(const experiments::MetricsTable& table, const PlotSpec& spec) {
  if (table.rows.empty()) throw StructuralError("cannot plot an empty metrics table");
  return spec.kind == PlotKind::Line ? line_chart(table, spec.y_column)
                                     : bar_chart(table, spec.y_column);
}

void emit_plot(const experiments::MetricsTable& table, const PlotSpec& spec,
               const std::filesystem::path& path) {
  write_file(path, render_svg(table, spec));
}

}  // namespace specnego::io
