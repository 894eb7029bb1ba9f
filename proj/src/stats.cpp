#include "pinlab/stats.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "pinlab/error.hpp"

namespace pinlab::stats {

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || (!w.empty() && w.size() != n)) throw DomainError("fit_line: need >= 2 paired points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = w.empty() ? 1.0 : w[i];
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += wi * r * r;
    }
    const double s2 = rss / (static_cast<double>(n) - 2.0);
    fit.slope_stderr = std::sqrt(s2 / sxx);
    fit.intercept_stderr = std::sqrt(s2 * (1.0 / sw + mx * mx / sxx));
  }
  return fit;
}

LineFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_power_law: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("geometric_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> out;
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(lo * std::exp(step * i));
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw DomainError("linear_grid: need lo < hi and count >= 2");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

MeanStderr mean_stderr(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean_stderr: empty sample");
  MeanStderr out;
  double s = 0;
  for (double v : xs) s += v;
  out.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double v : xs) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) / static_cast<double>(xs.size()));
  }
  return out;
}

Interval wilson(long successes, long trials, double z) {
  if (trials <= 0 || successes < 0 || successes > trials) throw DomainError("wilson: invalid counts");
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  // The endpoints are exact at the extremes; rounding would leave a residue.
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

double chi_square_p_value(double stat, int dof) {
  if (dof < 1) throw DomainError("chi_square_p_value: dof must be >= 1");
  if (stat <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

}  // namespace pinlab::stats
