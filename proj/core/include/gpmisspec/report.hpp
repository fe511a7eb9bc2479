#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gpmisspec/experiments.hpp"
#include "gpmisspec/mle.hpp"

namespace gpmisspec {

/// %.17g: every double round-trips through its text form.
[[nodiscard]] std::string format_double(double value);

/// Writes `content` to `path`; Error(io) naming the path on failure.
void write_text_file(const std::string& path, const std::string& content);

/// n,expected_mle,mc_mean,mc_stderr,jitter_true,jitter_model,fill,separation
/// Monte-Carlo cells are empty when no replicates were requested.
[[nodiscard]] std::string rate_csv(const RateFitReport& report);
[[nodiscard]] std::string rate_json(const RateFitReport& report);

/// n,numerator,denominator,ratio_sq,running_mean
[[nodiscard]] std::string decomposition_csv(const DecompositionReport& report);

/// n,trace,trace_over_n
[[nodiscard]] std::string driscoll_csv(const DriscollReport& report);
[[nodiscard]] std::string driscoll_json(const DriscollReport& report);

/// n,sup_variance,argmax,jitter,clamped
[[nodiscard]] std::string variance_csv(const VarianceDecayReport& report);
[[nodiscard]] std::string variance_json(const VarianceDecayReport& report);

struct LogLogPlot {
  std::string title;
  std::string y_label;
  std::vector<double> sizes;
  std::vector<double> values;
  LogLogFit fit;
  double theoretical_slope = 0;
};

/// Static SVG: log-log axes, points, fitted line and a reference line of the
/// theoretical slope through the data centroid. Byte-deterministic.
[[nodiscard]] std::string render_svg(const LogLogPlot& plot);

[[nodiscard]] LogLogPlot make_plot(const RateFitReport& report);
[[nodiscard]] LogLogPlot make_plot(const VarianceDecayReport& report);

/// Needs >= 3 points; Error(domain) otherwise.
void emit_svg(const RateFitReport& report, const std::string& path);
void emit_svg(const VarianceDecayReport& report, const std::string& path);

}  // namespace gpmisspec
