#pragma once

#include "psp/bids.hpp"
#include "psp/random.hpp"
#include "psp/valuation.hpp"

namespace psp {

/// Truthful random starting profile: every buyer requests a quantity drawn
/// uniformly from [0, qbar) and prices it at their marginal value there.
/// The seller bid comes from the population's supply and reserve price.
BidProfile random_initial_bids(const Population& pop, RngStream& stream);

}  // namespace psp
