#include "psp/valuation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace psp {
namespace {

TEST(Valuation, ClosedFormValues) {
  const Valuation v(100.0, 20.0);
  EXPECT_DOUBLE_EQ(v.value(0.0), 0.0);
  // Integral of 20 * (1 - z/100) from 0 to 50.
  EXPECT_DOUBLE_EQ(v.value(50.0), 750.0);
  EXPECT_DOUBLE_EQ(v.value(100.0), 1000.0);
  EXPECT_DOUBLE_EQ(v.value(250.0), 1000.0) << "value saturates at qbar";
  EXPECT_DOUBLE_EQ(v.marginal(0.0), 20.0);
  EXPECT_DOUBLE_EQ(v.marginal(50.0), 10.0);
  EXPECT_DOUBLE_EQ(v.marginal(100.0), 0.0);
  EXPECT_DOUBLE_EQ(v.marginal(140.0), 0.0);
  EXPECT_DOUBLE_EQ(v.demand(0.0), 100.0);
  EXPECT_DOUBLE_EQ(v.demand(10.0), 50.0);
  EXPECT_DOUBLE_EQ(v.demand(20.0), 0.0);
  EXPECT_DOUBLE_EQ(v.demand(25.0), 0.0) << "no demand above pbar";
}

TEST(Valuation, MarginalIsDerivativeOfValue) {
  const Valuation v(73.0, 14.5);
  const double h = 1e-6;
  for (double z : {0.5, 10.0, 36.5, 60.0, 72.0}) {
    const double numeric = (v.value(z + h) - v.value(z - h)) / (2.0 * h);
    EXPECT_NEAR(numeric, v.marginal(z), 1e-5);
  }
}

TEST(Valuation, DemandInvertsMarginal) {
  const Valuation v(61.0, 17.0);
  for (double z = 0.0; z <= 61.0; z += 6.1) {
    EXPECT_NEAR(v.demand(v.marginal(z)), z, 1e-9);
  }
  for (double y = 0.0; y <= 17.0; y += 1.7) {
    EXPECT_NEAR(v.marginal(v.demand(y)), y, 1e-9);
  }
}

TEST(Valuation, ValueIsConcaveAndNondecreasing) {
  const Valuation v(50.0, 10.0);
  double prev = v.value(0.0);
  double prev_inc = 1e300;
  for (int i = 1; i <= 60; ++i) {
    const double z = i * 1.0;
    const double cur = v.value(z);
    EXPECT_GE(cur, prev - 1e-12);
    const double inc = cur - prev;
    EXPECT_LE(inc, prev_inc + 1e-12);
    prev = cur;
    prev_inc = inc;
  }
}

TEST(Valuation, RejectsBadArguments) {
  EXPECT_THROW(Valuation(0.0, 10.0), std::invalid_argument);
  EXPECT_THROW(Valuation(10.0, -1.0), std::invalid_argument);
  const Valuation v(10.0, 10.0);
  EXPECT_THROW(v.value(-0.1), std::invalid_argument);
  EXPECT_THROW(v.marginal(-0.1), std::invalid_argument);
  EXPECT_THROW(v.demand(-0.1), std::invalid_argument);
}

TEST(Population, LooksUpBuyersById) {
  const Population pop({Buyer{1, Valuation(10, 5)}, Buyer{4, Valuation(20, 8)}},
                       100.0, 2.0);
  EXPECT_EQ(pop.size(), 2u);
  EXPECT_TRUE(pop.contains(4));
  EXPECT_FALSE(pop.contains(2));
  EXPECT_EQ(pop.valuation_of(4).qbar(), 20.0);
  EXPECT_THROW(pop.valuation_of(2), std::out_of_range);
  const Population repriced = pop.with_reserve_price(7.0);
  EXPECT_EQ(repriced.reserve_price(), 7.0);
  EXPECT_EQ(repriced.supply(), 100.0);
  EXPECT_EQ(pop.reserve_price(), 2.0) << "original population unchanged";
}

TEST(Population, SamplingIsDeterministicAndInRange) {
  const Interval qr{50.0, 100.0};
  const Interval pr{10.0, 20.0};
  const Population a = sample_population(100, 42, qr, pr, 1000.0, 0.0);
  const Population b = sample_population(100, 42, qr, pr, 1000.0, 0.0);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Buyer& ba = a.buyers()[i];
    EXPECT_EQ(ba.id, static_cast<int>(i) + 1);
    EXPECT_EQ(ba.valuation, b.buyers()[i].valuation);
    EXPECT_GE(ba.valuation.qbar(), qr.lo);
    EXPECT_LE(ba.valuation.qbar(), qr.hi);
    EXPECT_GE(ba.valuation.pbar(), pr.lo);
    EXPECT_LE(ba.valuation.pbar(), pr.hi);
  }
  const Population c = sample_population(100, 43, qr, pr, 1000.0, 0.0);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    any_differs = any_differs ||
                  !(a.buyers()[i].valuation == c.buyers()[i].valuation);
  }
  EXPECT_TRUE(any_differs) << "different seeds should differ";
}

TEST(Welfare, TwoIdenticalBuyersSplitTheSupply) {
  const Population pop({Buyer{1, Valuation(10, 10)}, Buyer{2, Valuation(10, 10)}},
                       10.0, 0.0);
  const WelfareOptimum opt = optimal_welfare(pop);
  EXPECT_NEAR(allocation_of(opt.allocation, 1), 5.0, 1e-12);
  EXPECT_NEAR(allocation_of(opt.allocation, 2), 5.0, 1e-12);
  EXPECT_NEAR(opt.marginal_price, 5.0, 1e-12);
  EXPECT_NEAR(opt.total_value, 75.0, 1e-12);
}

TEST(Welfare, SlackSupplySaturatesEveryBuyer) {
  const Population pop({Buyer{1, Valuation(10, 10)}, Buyer{2, Valuation(20, 5)}},
                       100.0, 0.0);
  const WelfareOptimum opt = optimal_welfare(pop);
  EXPECT_DOUBLE_EQ(allocation_of(opt.allocation, 1), 10.0);
  EXPECT_DOUBLE_EQ(allocation_of(opt.allocation, 2), 20.0);
  EXPECT_DOUBLE_EQ(opt.marginal_price, 0.0);
  EXPECT_DOUBLE_EQ(opt.total_value, 100.0);
}

TEST(Welfare, MatchesBisectionOracleOnRandomInstances) {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Population pop = test::random_population(rng, 6);
    const WelfareOptimum opt = optimal_welfare(pop);
    const test::BruteWelfare ref = test::brute_welfare(pop);
    EXPECT_NEAR(opt.total_value, ref.total_value,
                1e-9 * (1.0 + std::abs(ref.total_value)));
    EXPECT_NEAR(opt.marginal_price, ref.marginal_price, 1e-9);
    double allocated = 0.0;
    for (const Allocation& a : opt.allocation) {
      EXPECT_NEAR(a.quantity, allocation_of(ref.allocation, a.buyer), 1e-7);
      allocated += a.quantity;
    }
    EXPECT_LE(allocated, pop.supply() + 1e-9);
  }
}

TEST(Welfare, DominatesTruncatedAllocations) {
  // Any feasible allocation built by truncating demands must not beat the
  // reported optimum.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Population pop = test::random_population(rng, 5);
    const WelfareOptimum opt = optimal_welfare(pop);
    double remaining = pop.supply();
    double value = 0.0;
    for (const Buyer& b : pop.buyers()) {
      const double z =
          std::min(remaining, b.valuation.qbar() * unit(rng));
      value += b.valuation.value(z);
      remaining -= z;
    }
    EXPECT_LE(value, opt.total_value + 1e-9);
  }
}

TEST(Buyback, GuaranteedExactlyWhenDemandAtReserveFallsShort) {
  const Population pop({Buyer{1, Valuation(100, 20)}, Buyer{2, Valuation(100, 20)}},
                       100.0, 0.0);
  // Demand at price P: 2 * 100 * (1 - P/20); short of 100 iff P > 10.
  EXPECT_FALSE(buyback_guaranteed(pop, 0.0));
  EXPECT_FALSE(buyback_guaranteed(pop, 10.0));
  EXPECT_TRUE(buyback_guaranteed(pop, 10.1));
  EXPECT_TRUE(buyback_guaranteed(pop, 25.0));
}

}  // namespace
}  // namespace psp
