#include "klmdp/cli/svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "klmdp/chains.hpp"
#include "klmdp/csv.hpp"
#include "klmdp/error.hpp"

namespace klmdp::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr int kTicks = 5;

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) return {lo - 1.0, hi + 1.0};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string tick_label(double v) { return fmt::format("{:.4g}", v); }

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

SummaryTable parse_summary_csv(std::string_view text) {
  const auto newline = text.find('\n');
  std::string_view header = text.substr(0, newline);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (header != kSummaryHeader) {
    throw ParseError("expected header '" + std::string(kSummaryHeader) + "'", 1);
  }
  if (newline == std::string_view::npos) throw ParseError("summary has no data rows", 1);
  Matrix body;
  try {
    body = parse_matrix_csv(text.substr(newline + 1));
  } catch (const ParseError& e) {
    // body lines are numbered from the line after the header
    throw ParseError(e.message(), e.line() > 0 ? e.line() + 1 : 0);
  }
  if (body.cols() != 5) throw ParseError("summary rows need 5 columns", 2);
  SummaryTable table;
  for (Eigen::Index i = 0; i < body.rows(); ++i) {
    table.t.push_back(body(i, 0));
    table.mean_hindsight.push_back(body(i, 1));
    table.std_hindsight.push_back(body(i, 2));
    table.mean_pool.push_back(body(i, 3));
    table.std_pool.push_back(body(i, 4));
  }
  return table;
}

std::string render_regret_svg(const PlotSeries& series) {
  const std::size_t n = series.t.size();
  if (n == 0) throw ValidationError("nothing to plot");
  if (series.mean.size() != n || series.stddev.size() != n) throw DimensionError("plot series lengths differ");

  double y_lo = 0.0;
  double y_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y_lo = std::min(y_lo, series.mean[i] - series.stddev[i]);
    y_hi = std::max(y_hi, series.mean[i] + series.stddev[i]);
  }
  const auto [t_min, t_max] = std::minmax_element(series.t.begin(), series.t.end());
  const Range xr = *t_max > *t_min ? Range{*t_min, *t_max} : padded(*t_min, *t_max);
  const Range yr = padded(y_lo, y_hi);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + (t - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };
  auto point = [&](double t, double y) { return fmt::format("{:.2f},{:.2f}", px(t), py(y)); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", kWidth / 2,
                     escape(series.label));

  // band: upper edge forward, lower edge back
  svg += "<polygon class=\"band\" fill=\"#4a90d9\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    svg += point(series.t[i], series.mean[i] + series.stddev[i]);
    svg += ' ';
  }
  for (std::size_t i = n; i-- > 0;) {
    svg += point(series.t[i], series.mean[i] - series.stddev[i]);
    if (i > 0) svg += ' ';
  }
  svg += "\"/>\n";

  svg += "<polyline class=\"mean\" fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) svg += ' ';
    svg += point(series.t[i], series.mean[i]);
  }
  svg += "\"/>\n";

  if (yr.lo < 0.0 && yr.hi > 0.0) {
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#999\" "
                       "stroke-dasharray=\"4 3\"/>\n",
                       kLeft, py(0.0), kLeft + plot_w, py(0.0));
  }

  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop,
                     kTop + plot_h);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft,
                     kTop + plot_h, kLeft + plot_w);
  for (int k = 0; k <= kTicks; ++k) {
    const double frac = static_cast<double>(k) / kTicks;
    const double tx = xr.lo + frac * (xr.hi - xr.lo);
    const double ty = yr.lo + frac * (yr.hi - yr.lo);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(tx),
                       kTop + plot_h + 18, tick_label(tx));
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, py(ty) + 4,
                       tick_label(ty));
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">t</text>\n", kLeft + plot_w / 2,
                     kHeight - 16);
  svg += fmt::format(
      "<text x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.2f})\">regret "
      "(mean &#177; 1 sd)</text>\n",
      kTop + plot_h / 2);
  svg += "</svg>\n";
  return svg;
}

}  // namespace klmdp::cli
