#pragma once

#include <span>
#include <vector>

namespace psp {

/// One bid: buyer id, quantity requested, and the unit price the buyer is
/// willing to pay for one more unit at that quantity. Buyer id 0 is the
/// seller's reserve bid.
struct Bid {
  int buyer;
  double quantity;
  double price;

  bool operator==(const Bid&) const = default;
};

inline constexpr int kSellerId = 0;

/// The set of all active bids, exactly one per participating id. Always
/// contains the seller bid (0, Q, P); that bid is never updated. Setting a
/// buyer's bid replaces any previous bid by the same buyer.
class BidProfile {
 public:
  BidProfile(double supply, double reserve_price);

  const Bid& seller() const { return bids_.front(); }
  double supply() const { return seller().quantity; }
  double reserve_price() const { return seller().price; }

  /// Inserts or replaces a buyer bid. Rejects id 0 and negative fields.
  void set(const Bid& bid);

  const Bid* find(int buyer) const;
  const Bid& at(int buyer) const;
  bool contains(int buyer) const { return find(buyer) != nullptr; }

  /// All bids, seller first, then buyers in ascending id order.
  std::span<const Bid> bids() const { return bids_; }
  std::size_t size() const { return bids_.size(); }

  bool operator==(const BidProfile&) const = default;

 private:
  std::vector<Bid> bids_;  // sorted by buyer id; index 0 is the seller
};

}  // namespace psp
