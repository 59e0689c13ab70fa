#include "psp/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psp {
namespace {

constexpr int kNobody = std::numeric_limits<int>::min();

double avail_excluding(std::span<const Bid> bids, int excluded, double price,
                       double supply) {
  double opposing = 0.0;
  for (const Bid& b : bids) {
    if (b.buyer != excluded && b.price > price) opposing += b.quantity;
  }
  return std::max(supply - opposing, 0.0);
}

/// Evaluates one bid of the profile, ignoring the bid of `excluded` (if
/// any) everywhere: in the availability sum and in the tie group.
double allocate_one(std::span<const Bid> bids, const Bid& bid, int excluded,
                    double supply) {
  if (bid.quantity == 0.0) return 0.0;
  double opposing = 0.0;
  double tied = 0.0;  // bids at exactly this price, the bid itself included
  for (const Bid& b : bids) {
    if (b.buyer == excluded) continue;
    if (b.buyer != bid.buyer && b.price > bid.price) opposing += b.quantity;
    if (b.price == bid.price) tied += b.quantity;
  }
  const double available = std::max(supply - opposing, 0.0);
  return (bid.quantity / tied) * std::min(bid.quantity, available);
}

std::vector<Allocation> allocate_excluding(const BidProfile& profile,
                                           int excluded) {
  const auto bids = profile.bids();
  std::vector<Allocation> out;
  out.reserve(bids.size());
  for (const Bid& bid : bids) {
    if (bid.buyer == excluded) continue;
    out.push_back(Allocation{
        bid.buyer, allocate_one(bids, bid, excluded, profile.supply())});
  }
  return out;
}

}  // namespace

double available_quantity(const BidProfile& profile, int buyer, double price) {
  if (!(price >= 0.0)) {
    throw std::invalid_argument("available_quantity: negative price");
  }
  return avail_excluding(profile.bids(), buyer, price, profile.supply());
}

double market_price(const BidProfile& profile, int buyer, double quantity) {
  if (!(quantity >= 0.0) || quantity > profile.supply()) {
    throw std::invalid_argument(
        "market_price: quantity must lie in [0, supply]");
  }
  // Availability is a nondecreasing right-continuous step function of the
  // price, so the infimum is attained at 0 or at an opposing bid price.
  std::vector<double> candidates{0.0};
  for (const Bid& b : profile.bids()) {
    if (b.buyer != buyer) candidates.push_back(b.price);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  for (double y : candidates) {
    if (available_quantity(profile, buyer, y) >= quantity) return y;
  }
  // Unreachable: at the highest opposing price availability equals supply.
  throw std::logic_error("market_price: no satisfying price found");
}

std::vector<Allocation> allocate(const BidProfile& profile) {
  return allocate_excluding(profile, kNobody);
}

double cost(const BidProfile& profile, int buyer) {
  if (!profile.contains(buyer)) {
    throw std::invalid_argument("cost: buyer does not participate");
  }
  const std::vector<Allocation> with = allocate(profile);
  const std::vector<Allocation> without = allocate_excluding(profile, buyer);
  double total = 0.0;
  std::size_t wi = 0;
  for (const Allocation& w : without) {
    while (with[wi].buyer != w.buyer) ++wi;  // both ascending by id
    const double price = profile.at(w.buyer).price;
    total += price * (w.quantity - with[wi].quantity);
  }
  return total;
}

MarketOutcome outcome(const BidProfile& profile, const Population& pop) {
  // The profile must hold exactly one bid per population buyer.
  if (profile.size() != pop.size() + 1) {
    throw std::invalid_argument("outcome: profile and population disagree");
  }
  for (const Buyer& b : pop.buyers()) {
    if (!profile.contains(b.id)) {
      throw std::invalid_argument("outcome: profile missing a buyer bid");
    }
  }

  const std::vector<Allocation> alloc = allocate(profile);
  MarketOutcome out;
  out.buyers.reserve(pop.size());
  out.seller_buyback = allocation_of(alloc, kSellerId);
  out.min_cost = std::numeric_limits<double>::infinity();

  double weighted_price = 0.0;
  for (const Buyer& b : pop.buyers()) {
    const Bid& bid = profile.at(b.id);
    BuyerOutcome row;
    row.buyer = b.id;
    row.bid_quantity = bid.quantity;
    row.bid_price = bid.price;
    row.allocation = allocation_of(alloc, b.id);
    row.cost = cost(profile, b.id);
    row.value = b.valuation.value(row.allocation);
    row.utility = row.value - row.cost;
    out.total_allocated += row.allocation;
    out.revenue += row.cost;
    out.total_value += row.value;
    weighted_price += row.allocation * row.bid_price;
    out.min_cost = std::min(out.min_cost, row.cost);
    out.buyers.push_back(row);
  }
  out.total_utility = out.total_value - out.revenue;
  if (out.total_allocated > 0.0) {
    out.mean_price = weighted_price / out.total_allocated;
  }
  if (out.buyers.empty()) out.min_cost = 0.0;
  return out;
}

}  // namespace psp
