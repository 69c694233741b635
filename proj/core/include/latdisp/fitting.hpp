#pragma once

#include <span>
#include <utility>

namespace latdisp {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  ///< log of the prefactor
  double residual = 0.0;   ///< RMS of the residuals in log space
};

/// Ordinary least squares of log(value) against log(abscissa).
/// Requires at least 3 pairs, all strictly positive and finite.
LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> pairs);

}  // namespace latdisp
