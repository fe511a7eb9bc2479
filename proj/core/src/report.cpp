#include "gpmisspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gpmisspec/error.hpp"

namespace gpmisspec {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

ordered_json scenario_json(const MisspecScenario& s) {
  ordered_json j;
  j["truth"] = format_kernel_spec(s.truth);
  j["model"] = format_kernel_spec(s.model);
  j["d"] = s.dim;
  j["alpha0"] = s.alpha0();
  j["alpha"] = s.alpha();
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string rate_csv(const RateFitReport& report) {
  std::string out = "n,expected_mle,mc_mean,mc_stderr,jitter_true,jitter_model,fill,separation\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.n) + "," + format_double(r.expected_mle) + "," + cell(r.mc_mean) + "," +
           cell(r.mc_stderr) + "," + cell(r.jitter_true) + "," + format_double(r.jitter_model) + "," +
           format_double(r.fill) + "," + format_double(r.separation) + "\n";
  }
  return out;
}

std::string rate_json(const RateFitReport& report) {
  ordered_json j;
  j["scenario"] = scenario_json(report.scenario);
  j["design"] = to_string(report.family);
  j["sizes"] = report.sizes();
  j["values"] = report.values();
  j["slope"] = report.fit.slope;
  j["intercept"] = report.fit.intercept;
  j["r2"] = report.fit.r_squared;
  j["theoretical_slope"] = report.theoretical_slope;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  j["tail_slope"] = report.tail_slope ? ordered_json(*report.tail_slope) : ordered_json(nullptr);
  j["incomplete"] = report.incomplete;
  j["failures"] = report.failures;
  if (!report.banner.empty()) j["banner"] = report.banner;
  return dump(j);
}

std::string decomposition_csv(const DecompositionReport& report) {
  std::string out = "n,numerator,denominator,ratio_sq,running_mean\n";
  for (const auto& t : report.terms) {
    out += std::to_string(t.n) + "," + format_double(t.numerator) + "," + format_double(t.denominator) + "," +
           format_double(t.ratio_sq) + "," + format_double(t.running_mean) + "\n";
  }
  return out;
}

std::string driscoll_csv(const DriscollReport& report) {
  std::string out = "n,trace,trace_over_n\n";
  for (std::size_t i = 0; i < report.sizes.size(); ++i) {
    out += std::to_string(report.sizes[i]) + "," + format_double(report.traces[i]) + "," +
           format_double(report.traces[i] / static_cast<double>(report.sizes[i])) + "\n";
  }
  return out;
}

std::string driscoll_json(const DriscollReport& report) {
  ordered_json j;
  j["slope"] = report.fit.slope;
  j["classification"] = to_string(report.classification);
  j["r2"] = report.fit.r_squared;
  j["label"] = report.label;
  j["sizes"] = report.sizes;
  j["traces"] = report.traces;
  return dump(j);
}

std::string variance_csv(const VarianceDecayReport& report) {
  std::string out = "n,sup_variance,argmax,jitter,clamped\n";
  for (const auto& r : report.rows) {
    std::string where;
    for (std::size_t a = 0; a < r.argmax.size(); ++a) where += (a ? ";" : "") + format_double(r.argmax[a]);
    out += std::to_string(r.n) + "," + format_double(r.sup_variance) + "," + where + "," + format_double(r.jitter) +
           "," + std::to_string(r.clamped) + "\n";
  }
  return out;
}

std::string variance_json(const VarianceDecayReport& report) {
  ordered_json j;
  j["kernel"] = report.kernel_tag;
  j["test_grid"] = report.test_grid;
  std::vector<std::size_t> sizes;
  std::vector<double> values;
  for (const auto& r : report.rows) {
    sizes.push_back(r.n);
    values.push_back(r.sup_variance);
  }
  j["sizes"] = sizes;
  j["values"] = values;
  j["slope"] = report.fit.slope;
  j["intercept"] = report.fit.intercept;
  j["r2"] = report.fit.r_squared;
  j["theoretical_slope"] = report.theoretical_slope;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  return dump(j);
}

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 60;

std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
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

}  // namespace

std::string render_svg(const LogLogPlot& plot) {
  const std::size_t m = plot.sizes.size();
  if (m < 3 || plot.values.size() != m) throw Error(ErrorCode::domain, "plot needs at least 3 points");
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(plot.sizes[i] > 0) || !(plot.values[i] > 0)) throw Error(ErrorCode::domain, "log-log plot needs positive data");
    lx[i] = std::log10(plot.sizes[i]);
    ly[i] = std::log10(plot.values[i]);
  }
  // theory line through the centroid of the points in log space
  double cx = 0, cy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    cx += lx[i];
    cy += ly[i];
  }
  cx /= static_cast<double>(m);
  cy /= static_cast<double>(m);
  const double x0 = *std::min_element(lx.begin(), lx.end());
  const double x1 = *std::max_element(lx.begin(), lx.end());
  const double ln10 = std::log(10.0);
  auto fit_y = [&](double x) { return (plot.fit.intercept + plot.fit.slope * x * ln10) / ln10; };
  auto theory_y = [&](double x) { return cy + plot.theoretical_slope * (x - cx); };

  double y0 = std::min({*std::min_element(ly.begin(), ly.end()), fit_y(x0), fit_y(x1), theory_y(x0), theory_y(x1)});
  double y1 = std::max({*std::max_element(ly.begin(), ly.end()), fit_y(x0), fit_y(x1), theory_y(x0), theory_y(x1)});
  double xa = std::floor(x0 * 10) / 10, xb = std::ceil(x1 * 10) / 10;
  if (xb - xa < 0.2) xb = xa + 0.2;
  double ya = std::floor(y0 * 10) / 10, yb = std::ceil(y1 * 10) / 10;
  if (yb - ya < 0.2) {
    ya -= 0.1;
    yb += 0.1;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xa) / (xb - xa) * pw; };
  auto py = [&](double y) { return kTop + (yb - y) / (yb - ya) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
     << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = static_cast<int>(std::ceil(xa)); k <= static_cast<int>(std::floor(xb)); ++k) {
    os << "<line x1=\"" << fixed(px(k)) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(px(k)) << "\" y2=\""
       << fixed(kTop + ph) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fixed(px(k)) << "\" y=\"" << fixed(kTop + ph + 18)
       << "\" text-anchor=\"middle\">1e" << k << "</text>\n";
  }
  for (std::size_t i = 0; i < m; ++i) {
    os << "<text x=\"" << fixed(px(lx[i])) << "\" y=\"" << fixed(kTop + ph + 32) << "\" text-anchor=\"middle\" "
       << "font-size=\"10\">" << fixed(plot.sizes[i], 0) << "</text>\n";
  }
  for (int k = static_cast<int>(std::ceil(ya)); k <= static_cast<int>(std::floor(yb)); ++k) {
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(k)) << "\" x2=\"" << fixed(kLeft + pw) << "\" y2=\""
       << fixed(py(k)) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py(k) + 4) << "\" text-anchor=\"end\">1e" << k
       << "</text>\n";
  }
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 8) << "\" text-anchor=\"middle\">N</text>\n";
  os << "<text x=\"16\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fixed(kTop + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

  os << "<line x1=\"" << fixed(px(x0)) << "\" y1=\"" << fixed(py(fit_y(x0))) << "\" x2=\"" << fixed(px(x1))
     << "\" y2=\"" << fixed(py(fit_y(x1))) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  os << "<line x1=\"" << fixed(px(x0)) << "\" y1=\"" << fixed(py(theory_y(x0))) << "\" x2=\"" << fixed(px(x1))
     << "\" y2=\"" << fixed(py(theory_y(x1))) << "\" stroke=\"#d62728\" stroke-width=\"1.5\" "
     << "stroke-dasharray=\"6 4\"/>\n";
  for (std::size_t i = 0; i < m; ++i) {
    os << "<circle cx=\"" << fixed(px(lx[i])) << "\" cy=\"" << fixed(py(ly[i])) << "\" r=\"4\" fill=\"black\"/>\n";
  }

  const double lx0 = kLeft + 12;
  const double ly0 = kTop + 18;
  os << "<line x1=\"" << fixed(lx0) << "\" y1=\"" << fixed(ly0 - 4) << "\" x2=\"" << fixed(lx0 + 24) << "\" y2=\""
     << fixed(ly0 - 4) << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << fixed(lx0 + 30) << "\" y=\"" << fixed(ly0) << "\">fit slope " << fixed(plot.fit.slope)
     << "</text>\n";
  os << "<line x1=\"" << fixed(lx0) << "\" y1=\"" << fixed(ly0 + 14) << "\" x2=\"" << fixed(lx0 + 24) << "\" y2=\""
     << fixed(ly0 + 14) << "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  os << "<text x=\"" << fixed(lx0 + 30) << "\" y=\"" << fixed(ly0 + 18) << "\">theory slope "
     << fixed(plot.theoretical_slope) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

LogLogPlot make_plot(const RateFitReport& report) {
  LogLogPlot plot;
  plot.title = "E[sigma^2 MLE]: " + format_kernel_spec(report.scenario.truth) + " vs " +
               format_kernel_spec(report.scenario.model) + ", d=" + std::to_string(report.scenario.dim);
  plot.y_label = "tr(K R^-1) / N";
  for (const auto& r : report.rows) {
    plot.sizes.push_back(static_cast<double>(r.n));
    plot.values.push_back(r.expected_mle);
  }
  plot.fit = report.fit;
  plot.theoretical_slope = report.theoretical_slope;
  return plot;
}

LogLogPlot make_plot(const VarianceDecayReport& report) {
  LogLogPlot plot;
  plot.title = "sup variance: " + report.kernel_tag;
  plot.y_label = "max conditional variance";
  for (const auto& r : report.rows) {
    plot.sizes.push_back(static_cast<double>(r.n));
    plot.values.push_back(r.sup_variance);
  }
  plot.fit = report.fit;
  plot.theoretical_slope = report.theoretical_slope;
  return plot;
}

void emit_svg(const RateFitReport& report, const std::string& path) { write_text_file(path, render_svg(make_plot(report))); }

void emit_svg(const VarianceDecayReport& report, const std::string& path) {
  write_text_file(path, render_svg(make_plot(report)));
}

}  // namespace gpmisspec
