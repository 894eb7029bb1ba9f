#pragma once

#include <span>
#include <vector>

namespace pinlab::stats {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
};

/// Weighted least squares y = intercept + slope·x. Empty weights mean equal
/// weights. Standard errors come from the weighted residual scatter (zero with
/// exactly two points).
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

/// Slope of log y against log x; requires x, y > 0.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// `count` points geometrically spaced on [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int count);
std::vector<double> linear_grid(double lo, double hi, int count);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // 0 for a single value
};

MeanStderr mean_stderr(std::span<const double> xs);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

/// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson(long successes, long trials, double z = 1.959963984540054);

/// Upper tail P(χ²_dof ≥ stat).
double chi_square_p_value(double stat, int dof);

}  // namespace pinlab::stats
