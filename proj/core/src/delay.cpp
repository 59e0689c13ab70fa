#include "psp/delay.hpp"

#include <cmath>
#include <stdexcept>

namespace psp {

DelayModel::DelayModel(double delta, double lambda, double beta)
    : delta_(delta), lambda_(lambda), beta_(beta) {
  if (!(delta >= 0.0) || !(lambda > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument(
        "DelayModel: need delta >= 0, lambda > 0, beta > 0");
  }
}

double DelayModel::mean() const {
  return delta_ + lambda_ * std::tgamma(1.0 + 1.0 / beta_);
}

double DelayModel::cdf(double x) const {
  if (x <= delta_) return 0.0;
  return 1.0 - std::exp(-std::pow((x - delta_) / lambda_, beta_));
}

DelayModel DelayModel::scaled_lambda(double factor) const {
  return DelayModel(delta_, lambda_ * factor, beta_);
}

DelayModel DelayModel::slowed(double factor) const {
  return DelayModel(delta_ * factor, lambda_ * factor, beta_);
}

double delay_from_uniform(const DelayModel& model, double u) {
  if (!(u >= 0.0) || !(u < 1.0)) {
    throw std::invalid_argument("delay_from_uniform: u must lie in [0, 1)");
  }
  // u < 1 keeps log1p(-u) finite.
  return model.delta() +
         model.lambda() * std::pow(-std::log1p(-u), 1.0 / model.beta());
}

double sample_delay(const DelayModel& model, RngStream& stream) {
  return delay_from_uniform(model, stream.next_unit());
}

DelayModels default_delay_models() {
  return DelayModels{
      .comm = DelayModel(0.1, 1.0, 0.75),
      .eval = DelayModel(1.0, 0.25, 1.5),
  };
}

}  // namespace psp
