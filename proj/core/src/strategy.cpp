#include "psp/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psp {
namespace {

void validate(const StrategyParams& params) {
  if (!(params.epsilon > 0.0) || !(params.compromise_tolerance > 0.0) ||
      params.max_rounds < 1) {
    throw std::invalid_argument(
        "StrategyParams: need epsilon > 0, tolerance > 0, max_rounds >= 1");
  }
}

void require_full_profile(const BidProfile& profile, const Population& pop) {
  for (const Buyer& b : pop.buyers()) {
    if (!profile.contains(b.id)) {
      throw std::invalid_argument("driver: initial profile missing buyer " +
                                  std::to_string(b.id));
    }
  }
}

/// One gated best-reply pass over all buyers in ascending id order.
/// Returns the number of bids replaced.
int best_reply_phase(BidProfile& profile, const Population& pop,
                     double epsilon, int round, const DriverTrace& trace) {
  int updates = 0;
  for (const Buyer& b : pop.buyers()) {
    const OpposingView view(profile, b.id);
    const Bid candidate = best_reply_from(view, b.valuation, epsilon);
    const double u_new = view.utility(candidate, b.valuation);
    const Bid current = profile.at(b.id);
    const double u_cur = view.utility(current, b.valuation);
    if (u_new >= u_cur + epsilon) {
      profile.set(candidate);
      ++updates;
      if (trace) {
        trace(DriverStep{round, Phase::best_reply, b.id, current, candidate,
                         u_new - u_cur});
      }
    }
  }
  return updates;
}

}  // namespace

OpposingView::OpposingView(const BidProfile& profile, int buyer)
    : buyer_(buyer), supply_(profile.supply()) {
  bids_.reserve(profile.size());
  for (const Bid& x : profile.bids()) {
    if (x.buyer != buyer) {
      bids_.push_back(ViewBid{x.buyer, x.quantity, x.price, 0.0, 0.0, 0.0});
    }
  }
  std::sort(bids_.begin(), bids_.end(), [](const ViewBid& l, const ViewBid& r) {
    return l.price != r.price ? l.price > r.price : l.buyer < r.buyer;
  });
  double above = 0.0;
  for (std::size_t g = 0; g < bids_.size();) {
    std::size_t h = g;
    double sum = 0.0;
    while (h < bids_.size() && bids_[h].price == bids_[g].price) {
      sum += bids_[h].quantity;
      ++h;
    }
    const double avail = std::max(supply_ - above, 0.0);
    for (std::size_t k = g; k < h; ++k) {
      bids_[k].above = above;
      bids_[k].tied = sum;
      if (bids_[k].quantity > 0.0) {
        bids_[k].base_alloc =
            (bids_[k].quantity / sum) * std::min(bids_[k].quantity, avail);
      }
    }
    group_price_.push_back(bids_[g].price);
    group_above_.push_back(above);
    group_sum_.push_back(sum);
    above += sum;
    g = h;
  }
  group_above_.push_back(above);
}

std::size_t OpposingView::first_at_or_below(double y) const {
  std::size_t lo = 0;
  std::size_t hi = group_price_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (group_price_[mid] > y) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double OpposingView::available(double y) const {
  return std::max(supply_ - group_above_[first_at_or_below(y)], 0.0);
}

double OpposingView::own_allocation(double z, double y) const {
  if (!(z > 0.0)) return 0.0;
  const std::size_t g = first_at_or_below(y);
  const double avail = std::max(supply_ - group_above_[g], 0.0);
  const double eq =
      (g < group_price_.size() && group_price_[g] == y) ? group_sum_[g] : 0.0;
  return (z / (z + eq)) * std::min(z, avail);
}

double OpposingView::externality(double z, double y) const {
  double total = 0.0;
  for (const ViewBid& k : bids_) {
    double alloc = 0.0;
    if (k.quantity > 0.0) {
      const double displaced = k.above + (y > k.price ? z : 0.0);
      const double avail = std::max(supply_ - displaced, 0.0);
      const double tied = k.tied + (y == k.price ? z : 0.0);
      alloc = (k.quantity / tied) * std::min(k.quantity, avail);
    }
    total += k.price * (k.base_alloc - alloc);
  }
  return total;
}

double OpposingView::utility(const Bid& bid, const Valuation& valuation) const {
  return valuation.value(own_allocation(bid.quantity, bid.price)) -
         externality(bid.quantity, bid.price);
}

double OpposingView::tied_quantity(double y) const {
  const std::size_t g = first_at_or_below(y);
  return (g < group_price_.size() && group_price_[g] == y) ? group_sum_[g]
                                                           : 0.0;
}

double OpposingView::sup_feasible(const Valuation& valuation) const {
  const double qbar = valuation.qbar();
  const auto feasible = [&](double z) {
    return z <= available(valuation.marginal(z));
  };
  if (feasible(qbar)) return qbar;

  // Availability is nonincreasing along the truthful price curve, so the
  // feasible demands form an interval starting at zero. Bisection keeps
  // the lower end feasible and converges to within one representable step
  // of the interval's edge.
  double lo = 0.0;
  double hi = qbar;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Bid best_reply_from(const OpposingView& view, const Valuation& valuation,
                    double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("best_reply_from: epsilon must be > 0");
  }
  const double sup = view.sup_feasible(valuation);
  double z = std::max(0.0, sup - epsilon / valuation.pbar());
  double price = valuation.marginal(z);
  // An exact price tie with a nonempty opposing bid would split the
  // allocation proportionally and void the reply's near-optimality, so
  // step the price just past the tie and request the matching quantity.
  for (int i = 0; i < 4 && z > 0.0 && view.tied_quantity(price) > 0.0; ++i) {
    price = std::nextafter(price, std::numeric_limits<double>::infinity());
    z = valuation.demand(price);
  }
  return Bid{view.buyer(), z, price};
}

Bid compromise_from(const OpposingView& view, const Bid& current,
                    const Valuation& valuation) {
  const double received =
      view.own_allocation(current.quantity, current.price);
  const double z = 0.5 * (received + current.quantity);
  return Bid{view.buyer(), z, valuation.marginal(z)};
}

double sup_feasible_demand(const BidProfile& profile, int buyer,
                           const Valuation& valuation) {
  return OpposingView(profile, buyer).sup_feasible(valuation);
}

Bid epsilon_best_reply(const BidProfile& profile, int buyer,
                       const Valuation& valuation, double epsilon) {
  return best_reply_from(OpposingView(profile, buyer), valuation, epsilon);
}

Bid compromise_reply(const BidProfile& profile, int buyer,
                     const Valuation& valuation) {
  return compromise_from(OpposingView(profile, buyer), profile.at(buyer),
                         valuation);
}

double estimated_utility(const BidProfile& profile, const Bid& candidate,
                         const Valuation& valuation) {
  BidProfile hypothetical = profile;
  hypothetical.set(candidate);
  const double received =
      allocation_of(allocate(hypothetical), candidate.buyer);
  return valuation.value(received) - cost(hypothetical, candidate.buyer);
}

DriverResult run_best_reply_driver(const Population& pop, BidProfile initial,
                                   const StrategyParams& params,
                                   const DriverTrace& trace) {
  validate(params);
  require_full_profile(initial, pop);
  BidProfile profile = std::move(initial);
  int round = 0;
  bool converged = false;
  while (round < params.max_rounds) {
    ++round;
    if (best_reply_phase(profile, pop, params.epsilon, round, trace) == 0) {
      converged = true;
      break;
    }
  }
  MarketOutcome final_outcome = outcome(profile, pop);
  return DriverResult{std::move(profile), std::move(final_outcome), round,
                      converged};
}

DriverResult run_alternating_driver(const Population& pop, BidProfile initial,
                                    const StrategyParams& params,
                                    const DriverTrace& trace) {
  validate(params);
  require_full_profile(initial, pop);
  BidProfile profile = std::move(initial);
  int round = 0;
  bool converged = false;
  while (round < params.max_rounds) {
    ++round;
    const int updates =
        best_reply_phase(profile, pop, params.epsilon, round, trace);
    double max_change = 0.0;
    for (const Buyer& b : pop.buyers()) {
      const OpposingView view(profile, b.id);
      const Bid current = profile.at(b.id);
      const Bid candidate = compromise_from(view, current, b.valuation);
      max_change =
          std::max(max_change, std::abs(candidate.quantity - current.quantity));
      if (candidate == current) continue;
      double gain = 0.0;
      if (trace) {
        gain = view.utility(candidate, b.valuation) -
               view.utility(current, b.valuation);
      }
      profile.set(candidate);
      if (trace) {
        trace(DriverStep{round, Phase::compromise, b.id, current, candidate,
                         gain});
      }
    }
    if (updates == 0 && max_change < params.compromise_tolerance) {
      converged = true;
      break;
    }
  }
  MarketOutcome final_outcome = outcome(profile, pop);
  return DriverResult{std::move(profile), std::move(final_outcome), round,
                      converged};
}

NashCheck verify_epsilon_nash(const BidProfile& profile, const Population& pop,
                              double epsilon, int grid_points) {
  if (grid_points < 2) {
    throw std::invalid_argument("verify_epsilon_nash: grid too small");
  }
  NashCheck out;
  out.worst_gain = -std::numeric_limits<double>::infinity();
  if (pop.size() == 0) {
    out.worst_gain = 0.0;
    out.is_equilibrium = true;
    return out;
  }

  for (const Buyer& b : pop.buyers()) {
    const OpposingView view(profile, b.id);
    const Bid current = profile.at(b.id);
    const double u_current = estimated_utility(profile, current, b.valuation);

    double best_u = -std::numeric_limits<double>::infinity();
    double best_z = 0.0;
    const double step = b.valuation.qbar() / grid_points;
    for (int j = 0; j <= grid_points; ++j) {
      const double z = std::min(step * j, b.valuation.qbar());
      const double u =
          view.utility(Bid{b.id, z, b.valuation.marginal(z)}, b.valuation);
      if (u > best_u) {
        best_u = u;
        best_z = z;
      }
    }
    // Exact candidates on top of the grid, evaluated via the plain path.
    const double sup = view.sup_feasible(b.valuation);
    const double reply = std::max(0.0, sup - epsilon / b.valuation.pbar());
    for (double z : {sup, reply, current.quantity}) {
      const double u = estimated_utility(
          profile, Bid{b.id, z, b.valuation.marginal(z)}, b.valuation);
      if (u > best_u) {
        best_u = u;
        best_z = z;
      }
    }
    {
      const Bid tie_aware = best_reply_from(view, b.valuation, epsilon);
      const double u = estimated_utility(profile, tie_aware, b.valuation);
      if (u > best_u) {
        best_u = u;
        best_z = tie_aware.quantity;
      }
    }

    const double gain = best_u - u_current;
    if (gain > out.worst_gain) {
      out.worst_gain = gain;
      out.worst_buyer = b.id;
      out.worst_quantity = best_z;
    }
  }
  out.is_equilibrium = out.worst_gain <= epsilon + 1e-6;
  return out;
}

}  // namespace psp
