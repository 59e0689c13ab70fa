#include "psp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psp {

double EnsembleStats::stddev() const {
  return variance ? std::sqrt(*variance) : 0.0;
}

EnsembleStats ensemble_stats(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("ensemble_stats: need at least one sample");
  }
  // Two passes with a compensated second moment. Deviations from the mean
  // cancel exactly for tightly clustered samples, so large common offsets
  // do not leak into the variance.
  const std::size_t n = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(n);
  EnsembleStats out;
  out.mean = mean;
  out.count = n;
  if (n >= 2) {
    double squares = 0.0;
    double residual = 0.0;
    for (double x : samples) {
      const double d = x - mean;
      squares += d * d;
      residual += d;
    }
    // The residual term corrects for the rounding of the mean itself.
    const double m2 = squares - residual * residual / static_cast<double>(n);
    out.variance = std::max(0.0, m2) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace psp
