#include "psp/bids.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace psp {

BidProfile::BidProfile(double supply, double reserve_price) {
  if (!(supply > 0.0) || !(reserve_price >= 0.0)) {
    throw std::invalid_argument(
        "BidProfile: need supply > 0 and reserve price >= 0");
  }
  bids_.push_back(Bid{kSellerId, supply, reserve_price});
}

void BidProfile::set(const Bid& bid) {
  if (bid.buyer == kSellerId) {
    throw std::invalid_argument("BidProfile: the seller bid is never updated");
  }
  if (!(bid.quantity >= 0.0) || !(bid.price >= 0.0) ||
      !std::isfinite(bid.quantity) || !std::isfinite(bid.price)) {
    throw std::invalid_argument(
        "BidProfile: bid quantity and price must be finite and >= 0");
  }
  auto it = std::lower_bound(
      bids_.begin(), bids_.end(), bid.buyer,
      [](const Bid& b, int id) { return b.buyer < id; });
  if (it != bids_.end() && it->buyer == bid.buyer) {
    *it = bid;
  } else {
    bids_.insert(it, bid);
  }
}

const Bid* BidProfile::find(int buyer) const {
  auto it = std::lower_bound(
      bids_.begin(), bids_.end(), buyer,
      [](const Bid& b, int id) { return b.buyer < id; });
  if (it != bids_.end() && it->buyer == buyer) return &*it;
  return nullptr;
}

const Bid& BidProfile::at(int buyer) const {
  const Bid* b = find(buyer);
  if (b == nullptr) {
    throw std::out_of_range("BidProfile: no bid from buyer " +
                            std::to_string(buyer));
  }
  return *b;
}

}  // namespace psp
