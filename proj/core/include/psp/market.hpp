#pragma once

#include <optional>
#include <vector>

#include "psp/bids.hpp"
#include "psp/valuation.hpp"

namespace psp {

/// Quantity of resource still available to `buyer` at marginal price
/// `price`: the supply minus everything requested by opposing bids at
/// strictly higher prices. The seller's reserve bid opposes every buyer,
/// so any price below the reserve yields zero.
double available_quantity(const BidProfile& profile, int buyer, double price);

/// The lowest marginal price at which at least `quantity` becomes
/// available to `buyer`, which is an exact breakpoint of the availability
/// step function (an opposing bid price, or 0). Rejects quantity > supply.
double market_price(const BidProfile& profile, int buyer, double quantity);

/// Allocation for every id in the profile, seller included (the seller's
/// share is the buyback). A bid receives min(requested, available) at its
/// price; bids with equal prices split their availability in proportion
/// to the quantities requested.
std::vector<Allocation> allocate(const BidProfile& profile);

/// Externality payment of `buyer`: the value of allocation lost by every
/// other participant (seller included, at the reserve price) due to this
/// buyer's bid, computed from two full allocation passes.
double cost(const BidProfile& profile, int buyer);

struct BuyerOutcome {
  int buyer;
  double bid_quantity;
  double bid_price;
  double allocation;
  double cost;
  double value;
  double utility;
};

/// Per-buyer outcomes plus market aggregates for one bid profile. The
/// seller's buyback is reported separately and excluded from every sum.
struct MarketOutcome {
  std::vector<BuyerOutcome> buyers;  // ascending id
  double total_allocated = 0.0;      // sum of buyer allocations
  double revenue = 0.0;              // sum of buyer costs
  double total_value = 0.0;
  double total_utility = 0.0;        // total_value - revenue
  /// Allocation-weighted mean bid price; absent when nothing is allocated.
  std::optional<double> mean_price;
  double seller_buyback = 0.0;
  /// Smallest per-buyer cost seen; negative beyond -1e-9 would flag a
  /// violation of the nonnegative-externality property.
  double min_cost = 0.0;
};

/// Computes the outcome of a profile against its population. The profile's
/// buyer ids must coincide with the population's.
MarketOutcome outcome(const BidProfile& profile, const Population& pop);

}  // namespace psp
