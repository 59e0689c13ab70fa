#include "psp/initial_bids.hpp"

namespace psp {

BidProfile random_initial_bids(const Population& pop, RngStream& stream) {
  BidProfile profile(pop.supply(), pop.reserve_price());
  for (const Buyer& b : pop.buyers()) {
    const double q = stream.next_unit() * b.valuation.qbar();
    profile.set(Bid{b.id, q, b.valuation.marginal(q)});
  }
  return profile;
}

}  // namespace psp
