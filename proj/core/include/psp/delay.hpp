#pragma once

#include "psp/random.hpp"

namespace psp {

/// Translated Weibull delay: delta + lambda * (-ln(1 - U))^(1/beta).
///
/// Shape beta < 1 gives a decreasing hazard rate (heavy-tailed, bursty
/// network traffic); beta > 1 an increasing hazard rate (scheduled,
/// predictable timing). Every sample is >= delta.
class DelayModel {
 public:
  DelayModel(double delta, double lambda, double beta);

  double delta() const { return delta_; }
  double lambda() const { return lambda_; }
  double beta() const { return beta_; }

  /// Expected delay: delta + lambda * Gamma(1 + 1/beta).
  double mean() const;

  /// Distribution function of the translated Weibull law.
  double cdf(double x) const;

  /// Same model with the scale multiplied by `factor`.
  DelayModel scaled_lambda(double factor) const;

  /// Same model with translation and scale both multiplied by `factor`.
  DelayModel slowed(double factor) const;

 private:
  double delta_;
  double lambda_;
  double beta_;
};

/// Inverse-transform sample for a given uniform draw u in [0, 1).
double delay_from_uniform(const DelayModel& model, double u);

/// Draws one delay from the stream. Strictly >= model.delta().
double sample_delay(const DelayModel& model, RngStream& stream);

struct DelayModels {
  DelayModel comm;
  DelayModel eval;
};

/// Default communication and evaluation renewal processes:
/// comm = (delta 0.1 s, lambda 1.0, beta 0.75), a heavy-tailed message
/// latency; eval = (delta 1.0 s, lambda 0.25, beta 1.5), a scheduled
/// market-analysis interval.
DelayModels default_delay_models();

}  // namespace psp
