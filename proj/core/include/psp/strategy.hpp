#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "psp/market.hpp"

namespace psp {

struct StrategyParams {
  double epsilon = 5.0;
  double compromise_tolerance = 1e-6;
  int max_rounds = 10000;
};

/// Precomputed environment of one buyer: every other bid (seller included)
/// grouped by price in descending order with prefix sums, plus the
/// allocation each of those bids would receive were the buyer absent.
/// Queries cost O(n) against the fixed environment, versus O(n^2) for the
/// definitional route through allocate and cost.
class OpposingView {
 public:
  OpposingView(const BidProfile& profile, int buyer);

  int buyer() const { return buyer_; }
  double supply() const { return supply_; }

  /// Quantity left at unit price y once opposing bids priced strictly
  /// above y are served.
  double available(double y) const;

  /// Allocation a bid (z, y) would receive here, equal-priced opposing
  /// bids sharing proportionally.
  double own_allocation(double z, double y) const;

  /// Externality cost of a bid (z, y): the price-weighted allocation it
  /// displaces from the other participants, reserve bid included.
  double externality(double z, double y) const;

  /// Total opposing quantity bid at exactly price y; 0 when no opposing
  /// bid sits at y.
  double tied_quantity(double y) const;

  /// Value of the bid's allocation minus its externality cost.
  double utility(const Bid& bid, const Valuation& valuation) const;

  /// The largest quantity the buyer can self-consistently demand:
  /// sup { z in [0, qbar] : z <= available(marginal(z)) }. The feasible
  /// set is an interval [0, z*]; z* lies on an availability breakpoint or
  /// a segment fixed point and is found exactly.
  double sup_feasible(const Valuation& valuation) const;

 private:
  struct ViewBid {
    int buyer;
    double quantity;
    double price;
    double above;       // opposing quantity at strictly higher prices
    double tied;        // total quantity at exactly this price
    double base_alloc;  // allocation with the viewed buyer absent
  };

  /// Index of the first price group at or below y (groups sorted
  /// descending); size() when all groups lie above y.
  std::size_t first_at_or_below(double y) const;

  int buyer_;
  double supply_;
  std::vector<ViewBid> bids_;
  std::vector<double> group_price_;
  std::vector<double> group_sum_;
  std::vector<double> group_above_;  // one sentinel entry past the end
};

/// Truthful bid at sup_feasible minus epsilon / pbar, clamped at 0. The
/// concession keeps the bid within epsilon of the best achievable utility
/// by pricing the request strictly above the supremum's binding price and
/// thereby securing the full requested quantity. That guarantee breaks in
/// one degenerate case: a price landing exactly on an opposing bid shares
/// the allocation proportionally instead of taking it. Identical-valuation
/// buyers replying to the same market hit this case systematically, so
/// when the truthful price ties an opposing bid the concession is widened
/// by one representable price step.
Bid best_reply_from(const OpposingView& view, const Valuation& valuation,
                    double epsilon);

/// Truthful bid at the midpoint of the requested quantity and the
/// allocation the current bid receives in this environment.
Bid compromise_from(const OpposingView& view, const Bid& current,
                    const Valuation& valuation);

/// sup_feasible of a freshly built view.
double sup_feasible_demand(const BidProfile& profile, int buyer,
                           const Valuation& valuation);

/// best_reply_from a freshly built view.
Bid epsilon_best_reply(const BidProfile& profile, int buyer,
                       const Valuation& valuation, double epsilon);

/// compromise_from a freshly built view, using the buyer's current bid.
Bid compromise_reply(const BidProfile& profile, int buyer,
                     const Valuation& valuation);

/// Utility the buyer would obtain if their bid were `candidate`, all other
/// bids held fixed, computed the definitional way: insert the candidate
/// into a copy of the profile, allocate, and charge the externality cost.
/// Agrees with OpposingView::utility; kept as the exact reference path.
double estimated_utility(const BidProfile& profile, const Bid& candidate,
                         const Valuation& valuation);

enum class Phase { best_reply, compromise };

struct DriverStep {
  int round;
  Phase phase;
  int buyer;
  Bid old_bid;
  Bid new_bid;
  double utility_gain;
};

using DriverTrace = std::function<void(const DriverStep&)>;

struct DriverResult {
  BidProfile profile;
  MarketOutcome outcome;
  int rounds = 0;
  bool converged = false;
};

/// Round-robin best-reply dynamics: every buyer, in ascending id order,
/// replaces their bid with the epsilon-best reply whenever that raises
/// their utility by at least epsilon. Stops after the first full round
/// with no replacement; hitting max_rounds is reported as non-convergence.
DriverResult run_best_reply_driver(const Population& pop, BidProfile initial,
                                   const StrategyParams& params,
                                   const DriverTrace& trace = nullptr);

/// Alternating dynamics: each cycle runs a gated best-reply phase followed
/// by an unconditional compromise phase. Stops once a cycle sees no
/// best-reply update and every compromise moves the requested quantity by
/// less than the tolerance.
DriverResult run_alternating_driver(const Population& pop, BidProfile initial,
                                    const StrategyParams& params,
                                    const DriverTrace& trace = nullptr);

struct NashCheck {
  bool is_equilibrium = false;
  double worst_gain = 0.0;   // best achievable unilateral utility gain
  int worst_buyer = 0;
  double worst_quantity = 0.0;  // candidate quantity achieving it
};

/// Checks whether any single buyer can improve their utility by more than
/// epsilon (plus 1e-6 slack) with a unilateral truthful bid. Candidates
/// are a uniform grid of grid_points quantities per buyer plus the exact
/// best-reply points.
NashCheck verify_epsilon_nash(const BidProfile& profile, const Population& pop,
                              double epsilon, int grid_points = 10000);

}  // namespace psp
