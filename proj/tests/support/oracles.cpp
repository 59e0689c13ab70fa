#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psp/market.hpp"
#include "psp/strategy.hpp"

namespace psp::test {

std::vector<Allocation> brute_allocate(const BidProfile& profile) {
  std::vector<Bid> sorted(profile.bids().begin(), profile.bids().end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Bid& l, const Bid& r) { return l.price > r.price; });
  std::vector<Allocation> out;
  out.reserve(sorted.size());
  double claimed_above = 0.0;
  for (std::size_t g = 0; g < sorted.size();) {
    std::size_t h = g;
    double group = 0.0;
    while (h < sorted.size() && sorted[h].price == sorted[g].price) {
      group += sorted[h].quantity;
      ++h;
    }
    const double avail = std::max(profile.supply() - claimed_above, 0.0);
    for (std::size_t k = g; k < h; ++k) {
      const Bid& b = sorted[k];
      double share = 0.0;
      if (b.quantity > 0.0) {
        share = (b.quantity / group) * std::min(b.quantity, avail);
      }
      out.push_back(Allocation{b.buyer, share});
    }
    claimed_above += group;
    g = h;
  }
  std::sort(out.begin(), out.end(),
            [](const Allocation& l, const Allocation& r) {
              return l.buyer < r.buyer;
            });
  return out;
}

double brute_cost(const BidProfile& profile, int buyer) {
  BidProfile reduced(profile.supply(), profile.reserve_price());
  for (const Bid& b : profile.bids()) {
    if (b.buyer != buyer && b.buyer != kSellerId) reduced.set(b);
  }
  const std::vector<Allocation> with = brute_allocate(profile);
  const std::vector<Allocation> without = brute_allocate(reduced);
  double total = 0.0;
  for (const Bid& b : profile.bids()) {
    if (b.buyer == buyer) continue;
    total += b.price *
             (allocation_of(without, b.buyer) - allocation_of(with, b.buyer));
  }
  return total;
}

double bisect_sup_feasible(const BidProfile& profile, int buyer,
                           const Valuation& valuation) {
  const auto avail = [&](double y) {
    double claimed = 0.0;
    for (const Bid& b : profile.bids()) {
      if (b.buyer != buyer && b.price > y) claimed += b.quantity;
    }
    return std::max(profile.supply() - claimed, 0.0);
  };
  const auto feasible = [&](double z) {
    return z <= avail(valuation.marginal(z));
  };
  double lo = 0.0;
  double hi = valuation.qbar();
  if (feasible(hi)) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double grid_best_utility(const BidProfile& profile, int buyer,
                         const Valuation& valuation, double epsilon,
                         int grid_points) {
  double best = -1e300;
  const auto consider = [&](double z) {
    const Bid candidate{buyer, z, valuation.marginal(z)};
    best = std::max(best, estimated_utility(profile, candidate, valuation));
  };
  for (int j = 0; j <= grid_points; ++j) {
    consider(valuation.qbar() * j / grid_points);
  }
  const double sup = bisect_sup_feasible(profile, buyer, valuation);
  consider(sup);
  consider(std::max(0.0, sup - epsilon / valuation.pbar()));
  if (profile.contains(buyer)) consider(profile.at(buyer).quantity);
  return best;
}

BruteWelfare brute_welfare(const Population& pop) {
  double total_demand_at_zero = 0.0;
  double price_cap = 0.0;
  for (const Buyer& b : pop.buyers()) {
    total_demand_at_zero += b.valuation.qbar();
    price_cap = std::max(price_cap, b.valuation.pbar());
  }
  const auto demand = [&](double y) {
    double total = 0.0;
    for (const Buyer& b : pop.buyers()) total += b.valuation.demand(y);
    return total;
  };
  double mu = 0.0;
  if (total_demand_at_zero > pop.supply()) {
    double lo = 0.0;
    double hi = price_cap;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (demand(mid) > pop.supply()) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    mu = 0.5 * (lo + hi);
  }
  BruteWelfare out;
  out.marginal_price = mu;
  out.total_value = 0.0;
  for (const Buyer& b : pop.buyers()) {
    const double z = b.valuation.demand(mu);
    out.allocation.push_back(Allocation{b.id, z});
    out.total_value += b.valuation.value(z);
  }
  return out;
}

TwoPassStats two_pass_stats(std::span<const double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("two_pass_stats: empty sample");
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double variance =
      samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
  return TwoPassStats{mean, variance};
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_distance: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double sign_test_p(int wins, int trials) {
  if (trials < 0 || wins < 0 || wins > trials) {
    throw std::invalid_argument("sign_test_p: bad counts");
  }
  if (trials == 0) return 1.0;
  // P(X = j) for X ~ Binomial(trials, 1/2), built iteratively.
  std::vector<double> pmf(static_cast<std::size_t>(trials) + 1);
  pmf[0] = std::pow(0.5, trials);
  for (int j = 1; j <= trials; ++j) {
    pmf[j] = pmf[j - 1] * static_cast<double>(trials - j + 1) /
             static_cast<double>(j);
  }
  double lower = 0.0;
  double upper = 0.0;
  for (int j = 0; j <= trials; ++j) {
    if (j <= wins) lower += pmf[j];
    if (j >= wins) upper += pmf[j];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

BidProfile random_profile(std::mt19937& rng, int max_buyers, double supply,
                          double reserve_price) {
  std::uniform_int_distribution<int> count(1, max_buyers);
  std::uniform_real_distribution<double> qty(0.0, supply);
  std::uniform_real_distribution<double> price(0.0, 25.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BidProfile profile(supply, reserve_price);
  const int n = count(rng);
  for (int id = 1; id <= n; ++id) {
    double q = qty(rng);
    double p = price(rng);
    if (unit(rng) < 0.1) q = 0.0;
    if (id > 1 && unit(rng) < 0.3) {
      // Deliberate exact tie with an earlier bid to exercise proportional
      // sharing.
      std::uniform_int_distribution<int> pick(1, id - 1);
      p = profile.at(pick(rng)).price;
    } else if (unit(rng) < 0.1) {
      p = reserve_price;
    }
    profile.set(Bid{id, q, p});
  }
  return profile;
}

Population random_population(std::mt19937& rng, int max_buyers) {
  std::uniform_int_distribution<int> count(1, max_buyers);
  std::uniform_real_distribution<double> qbar(5.0, 120.0);
  std::uniform_real_distribution<double> pbar(5.0, 25.0);
  std::vector<Buyer> buyers;
  const int n = count(rng);
  for (int id = 1; id <= n; ++id) {
    buyers.push_back(Buyer{id, Valuation(qbar(rng), pbar(rng))});
  }
  std::uniform_real_distribution<double> supply(50.0, 400.0);
  std::uniform_real_distribution<double> reserve(0.0, 10.0);
  return Population(std::move(buyers), supply(rng), reserve(rng));
}

}  // namespace psp::test
