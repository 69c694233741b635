#include "latdisp/fitting.hpp"

#include <cmath>
#include <vector>

#include "latdisp/error.hpp"

namespace latdisp {

LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> pairs) {
  detail::require(pairs.size() >= 3, "fit_loglog_slope: need at least 3 pairs");
  const double n = static_cast<double>(pairs.size());
  std::vector<double> x, y;
  double mx = 0.0, my = 0.0;
  for (const auto& [a, v] : pairs) {
    detail::require(a > 0.0 && v > 0.0 && std::isfinite(a) && std::isfinite(v),
                    "fit_loglog_slope: abscissas and values must be positive and finite");
    x.push_back(std::log(a));
    y.push_back(std::log(v));
    mx += x.back();
    my += y.back();
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  detail::require(sxx > 0.0, "fit_loglog_slope: abscissas must not all coincide");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace latdisp
