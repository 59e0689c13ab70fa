#include "psp/market.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace psp {
namespace {

TEST(BidProfile, AlwaysCarriesTheSellerBid) {
  BidProfile profile(1000.0, 12.0);
  EXPECT_EQ(profile.size(), 1u);
  EXPECT_EQ(profile.seller().buyer, kSellerId);
  EXPECT_EQ(profile.supply(), 1000.0);
  EXPECT_EQ(profile.reserve_price(), 12.0);
  profile.set(Bid{3, 50.0, 14.0});
  profile.set(Bid{1, 20.0, 15.0});
  ASSERT_EQ(profile.size(), 3u);
  EXPECT_EQ(profile.bids()[0].buyer, kSellerId);
  EXPECT_EQ(profile.bids()[1].buyer, 1);
  EXPECT_EQ(profile.bids()[2].buyer, 3);
  profile.set(Bid{3, 60.0, 13.0});
  EXPECT_EQ(profile.size(), 3u) << "setting an existing buyer replaces";
  EXPECT_EQ(profile.at(3).quantity, 60.0);
  EXPECT_THROW(profile.set(Bid{kSellerId, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(profile.set(Bid{2, -1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(profile.at(7), std::out_of_range);
  EXPECT_EQ(profile.find(7), nullptr);
}

TEST(AvailableQuantity, SubtractsOnlyStrictlyHigherPricedOpponents) {
  BidProfile profile(100.0, 0.0);
  profile.set(Bid{1, 30.0, 10.0});
  profile.set(Bid{2, 50.0, 8.0});
  // Buyer 3's view: at y above every opponent all supply remains.
  EXPECT_DOUBLE_EQ(available_quantity(profile, 3, 11.0), 100.0);
  // Equal price does not displace.
  EXPECT_DOUBLE_EQ(available_quantity(profile, 3, 10.0), 100.0);
  EXPECT_DOUBLE_EQ(available_quantity(profile, 3, 9.0), 70.0);
  EXPECT_DOUBLE_EQ(available_quantity(profile, 3, 8.0), 70.0);
  EXPECT_DOUBLE_EQ(available_quantity(profile, 3, 7.9), 20.0);
  // A buyer's own bid never counts against itself; buyer 1's only
  // opponent bids below 9, so the full supply is available.
  EXPECT_DOUBLE_EQ(available_quantity(profile, 1, 9.0), 100.0);
}

TEST(AvailableQuantity, ReserveBidBlocksPricesBelowTheReserve) {
  BidProfile profile(100.0, 12.0);
  profile.set(Bid{1, 10.0, 14.0});
  EXPECT_DOUBLE_EQ(available_quantity(profile, 2, 11.9), 0.0);
  EXPECT_DOUBLE_EQ(available_quantity(profile, 2, 12.0), 90.0);
  EXPECT_DOUBLE_EQ(available_quantity(profile, 2, 14.5), 100.0);
}

TEST(AvailableQuantity, ClampsAtZeroUnderHeavyCompetition) {
  BidProfile profile(100.0, 0.0);
  profile.set(Bid{1, 80.0, 10.0});
  profile.set(Bid{2, 70.0, 9.0});
  EXPECT_DOUBLE_EQ(available_quantity(profile, 3, 5.0), 0.0);
}

TEST(MarketPrice, FindsTheExactBreakpoint) {
  BidProfile profile(100.0, 2.0);
  profile.set(Bid{1, 30.0, 10.0});
  profile.set(Bid{2, 50.0, 8.0});
  // Buyer 3 wants 100: needs every opponent displaced, price 10.
  EXPECT_DOUBLE_EQ(market_price(profile, 3, 100.0), 10.0);
  // 70 available once the price reaches 8 (only buyer 1 above).
  EXPECT_DOUBLE_EQ(market_price(profile, 3, 70.0), 8.0);
  EXPECT_DOUBLE_EQ(market_price(profile, 3, 20.0), 2.0);
  EXPECT_DOUBLE_EQ(market_price(profile, 3, 0.0), 0.0);
  EXPECT_THROW(market_price(profile, 3, 101.0), std::invalid_argument);
}

TEST(MarketPrice, IsConsistentWithAvailability) {
  std::mt19937 rng(21);
  for (int i = 0; i < 200; ++i) {
    const BidProfile profile = test::random_profile(rng, 4, 200.0, 3.0);
    std::uniform_real_distribution<double> qty(0.0, 200.0);
    const double q = qty(rng);
    const double y = market_price(profile, 1, q);
    EXPECT_GE(available_quantity(profile, 1, y), q - 1e-9);
    if (y > 0.0) {
      // Just below the breakpoint the quantity is not yet available.
      EXPECT_LT(available_quantity(profile, 1, std::nexttoward(y, 0.0)), q);
    }
  }
}

TEST(Allocate, FillsInPriceOrderWithoutTies) {
  BidProfile profile(100.0, 0.0);
  profile.set(Bid{1, 60.0, 10.0});
  profile.set(Bid{2, 60.0, 8.0});
  profile.set(Bid{3, 60.0, 6.0});
  const std::vector<Allocation> a = allocate(profile);
  EXPECT_DOUBLE_EQ(allocation_of(a, 1), 60.0);
  EXPECT_DOUBLE_EQ(allocation_of(a, 2), 40.0);
  EXPECT_DOUBLE_EQ(allocation_of(a, 3), 0.0);
  EXPECT_DOUBLE_EQ(allocation_of(a, kSellerId), 0.0);
}

TEST(Allocate, SharesTiedPricesProportionally) {
  BidProfile profile(90.0, 0.0);
  profile.set(Bid{1, 60.0, 10.0});
  profile.set(Bid{2, 30.0, 10.0});
  const std::vector<Allocation> a = allocate(profile);
  // Each bid is capped at min(q_i, available) then scaled by its share of
  // the tied quantity: 60/90 * min(60, 90) and 30/90 * min(30, 90).
  EXPECT_DOUBLE_EQ(allocation_of(a, 1), 40.0);
  EXPECT_DOUBLE_EQ(allocation_of(a, 2), 10.0);
}

TEST(Allocate, SellerTakesTheUnsoldRemainder) {
  BidProfile profile(100.0, 12.0);
  profile.set(Bid{1, 30.0, 14.0});
  profile.set(Bid{2, 50.0, 11.0});
  const std::vector<Allocation> a = allocate(profile);
  EXPECT_DOUBLE_EQ(allocation_of(a, 1), 30.0);
  EXPECT_DOUBLE_EQ(allocation_of(a, 2), 0.0) << "priced under the reserve";
  EXPECT_DOUBLE_EQ(allocation_of(a, kSellerId), 70.0);
}

TEST(Allocate, ConservesSupplyWithoutPriceTies) {
  std::mt19937 rng(33);
  for (int i = 0; i < 300; ++i) {
    BidProfile profile(150.0, 1.0);
    std::uniform_real_distribution<double> qty(0.0, 120.0);
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int id = 1; id <= n; ++id) {
      // Distinct prices by construction.
      profile.set(Bid{id, qty(rng), 2.0 + id * 0.37});
    }
    const std::vector<Allocation> a = allocate(profile);
    double total = 0.0;
    for (const Allocation& x : a) total += x.quantity;
    EXPECT_NEAR(total, 150.0, 1e-9)
        << "seller bid absorbs whatever buyers leave";
  }
}

TEST(Allocate, MatchesSortAndWalkOracle) {
  std::mt19937 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const BidProfile profile = test::random_profile(rng, 4, 200.0, 3.0);
    const std::vector<Allocation> got = allocate(profile);
    const std::vector<Allocation> want = test::brute_allocate(profile);
    ASSERT_EQ(got.size(), want.size());
    for (const Allocation& g : got) {
      EXPECT_NEAR(g.quantity, allocation_of(want, g.buyer), 1e-9);
    }
  }
}

TEST(Cost, MatchesTwoPassOracle) {
  std::mt19937 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const BidProfile profile = test::random_profile(rng, 4, 200.0, 3.0);
    for (const Bid& b : profile.bids()) {
      if (b.buyer == kSellerId) continue;
      EXPECT_NEAR(cost(profile, b.buyer), test::brute_cost(profile, b.buyer),
                  1e-9);
    }
  }
}

TEST(Cost, IsZeroWhenNobodyIsDisplaced) {
  BidProfile profile(100.0, 0.0);
  profile.set(Bid{1, 40.0, 10.0});
  profile.set(Bid{2, 50.0, 8.0});
  EXPECT_DOUBLE_EQ(cost(profile, 1), 0.0);
  EXPECT_DOUBLE_EQ(cost(profile, 2), 0.0);
}

TEST(Cost, ChargesTheDisplacedValue) {
  BidProfile profile(100.0, 0.0);
  profile.set(Bid{1, 60.0, 10.0});
  profile.set(Bid{2, 60.0, 8.0});
  // Without buyer 1, buyer 2 would get 60; with it, only 40.
  EXPECT_DOUBLE_EQ(cost(profile, 1), 8.0 * 20.0);
  EXPECT_DOUBLE_EQ(cost(profile, 2), 0.0);
}

TEST(Cost, CountsTheSellerAtTheReservePrice) {
  BidProfile profile(100.0, 12.0);
  profile.set(Bid{1, 30.0, 14.0});
  // Buyer 1 takes 30 units the seller would otherwise keep at price 12.
  EXPECT_DOUBLE_EQ(cost(profile, 1), 12.0 * 30.0);
}

TEST(Cost, NeverMeaningfullyNegative) {
  std::mt19937 rng(8);
  for (int i = 0; i < 500; ++i) {
    const BidProfile profile = test::random_profile(rng, 4, 200.0, 3.0);
    for (const Bid& b : profile.bids()) {
      if (b.buyer == kSellerId) continue;
      EXPECT_GE(cost(profile, b.buyer), -1e-9);
    }
  }
}

TEST(Outcome, AggregatesPerBuyerRows) {
  const Population pop({Buyer{1, Valuation(80, 15)}, Buyer{2, Valuation(80, 12)}},
                       100.0, 0.0);
  BidProfile profile(100.0, 0.0);
  profile.set(Bid{1, 60.0, 15.0 * (1.0 - 60.0 / 80.0)});
  profile.set(Bid{2, 60.0, 12.0 * (1.0 - 60.0 / 80.0)});
  const MarketOutcome out = outcome(profile, pop);
  ASSERT_EQ(out.buyers.size(), 2u);
  const std::vector<Allocation> a = allocate(profile);
  double revenue = 0.0;
  double value = 0.0;
  for (const BuyerOutcome& row : out.buyers) {
    EXPECT_DOUBLE_EQ(row.allocation, allocation_of(a, row.buyer));
    EXPECT_DOUBLE_EQ(row.cost, cost(profile, row.buyer));
    EXPECT_DOUBLE_EQ(row.value,
                     pop.valuation_of(row.buyer).value(row.allocation));
    EXPECT_DOUBLE_EQ(row.utility, row.value - row.cost);
    revenue += row.cost;
    value += row.value;
  }
  EXPECT_DOUBLE_EQ(out.revenue, revenue);
  EXPECT_DOUBLE_EQ(out.total_value, value);
  EXPECT_DOUBLE_EQ(out.total_utility, value - revenue);
  EXPECT_DOUBLE_EQ(out.seller_buyback, allocation_of(a, kSellerId));
  EXPECT_DOUBLE_EQ(out.total_allocated,
                   out.buyers[0].allocation + out.buyers[1].allocation);
  EXPECT_LE(out.min_cost, out.buyers[0].cost);
  EXPECT_LE(out.min_cost, out.buyers[1].cost);
  EXPECT_GE(out.min_cost, -1e-9);
  ASSERT_TRUE(out.mean_price.has_value());
  const double expected_mean =
      (out.buyers[0].bid_price * out.buyers[0].allocation +
       out.buyers[1].bid_price * out.buyers[1].allocation) /
      (out.buyers[0].allocation + out.buyers[1].allocation);
  EXPECT_DOUBLE_EQ(*out.mean_price, expected_mean);
}

TEST(Outcome, MeanPriceAbsentWhenNothingSells) {
  const Population pop({Buyer{1, Valuation(50, 5)}}, 100.0, 10.0);
  BidProfile profile(100.0, 10.0);
  profile.set(Bid{1, 20.0, 3.0});
  const MarketOutcome out = outcome(profile, pop);
  EXPECT_FALSE(out.mean_price.has_value());
  EXPECT_DOUBLE_EQ(out.seller_buyback, 100.0);
  EXPECT_DOUBLE_EQ(out.total_allocated, 0.0);
}

}  // namespace
}  // namespace psp
