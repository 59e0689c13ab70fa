#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace psp {

/// Ensemble mean and unbiased sample variance (denominator count - 1).
/// The variance is absent for ensembles of a single realization.
struct EnsembleStats {
  double mean = 0.0;
  std::optional<double> variance;
  std::size_t count = 0;

  /// Square root of the sample variance; 0 when the variance is absent.
  double stddev() const;
};

/// Computes ensemble statistics over scalar samples. Throws on empty input.
EnsembleStats ensemble_stats(std::span<const double> samples);

}  // namespace psp
