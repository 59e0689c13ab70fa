#pragma once

#include <span>
#include <vector>

#include "psp/random.hpp"

namespace psp {

/// Quadratic buyer valuation, parameterized by the maximum quantity the
/// buyer values (qbar) and the greatest marginal price they would pay
/// (pbar). Value grows concavely up to qbar and saturates at qbar*pbar/2.
class Valuation {
 public:
  Valuation(double qbar, double pbar);

  double qbar() const { return qbar_; }
  double pbar() const { return pbar_; }

  /// Value of holding quantity z. Nondecreasing and concave; constant for
  /// z >= qbar. Rejects negative z.
  double value(double z) const;

  /// Marginal value at quantity z: pbar * (1 - z/qbar), zero from qbar on.
  /// marginal(0) == pbar. Rejects negative z.
  double marginal(double z) const;

  /// Inverse of the marginal value: the quantity demanded at unit price y.
  /// Zero for y > pbar, qbar at y = 0. Rejects negative y.
  double demand(double y) const;

  bool operator==(const Valuation&) const = default;

 private:
  double qbar_;
  double pbar_;
};

struct Buyer {
  int id;
  Valuation valuation;
};

/// Closed interval used for uniform population sampling.
struct Interval {
  double lo;
  double hi;
};

/// Per-buyer quantity of resource; also used for welfare optima.
struct Allocation {
  int buyer;
  double quantity;
};

/// Looks up the quantity assigned to `buyer`; throws if absent.
double allocation_of(std::span<const Allocation> allocations, int buyer);

/// The fixed market: buyers with ids 1..n, the auctioned supply Q, and the
/// seller's reserve price P (the seller participates as the static bid
/// (0, Q, P)).
class Population {
 public:
  Population(std::vector<Buyer> buyers, double supply, double reserve_price);

  std::span<const Buyer> buyers() const { return buyers_; }
  std::size_t size() const { return buyers_.size(); }

  /// Valuation of a buyer id in 1..n; throws for unknown ids.
  const Valuation& valuation_of(int buyer) const;
  bool contains(int buyer) const;

  double supply() const { return supply_; }
  double reserve_price() const { return reserve_price_; }

  Population with_reserve_price(double reserve_price) const;

 private:
  std::vector<Buyer> buyers_;  // ascending unique ids >= 1
  double supply_;
  double reserve_price_;
};

/// Draws n buyers with qbar and pbar uniform on the given intervals, from
/// the "population" substream of `seed`. Deterministic for a fixed seed.
Population sample_population(int n, std::uint64_t seed, Interval qbar_range,
                             Interval pbar_range, double supply,
                             double reserve_price);

/// Welfare-optimal allocation of the supply across buyers (the seller's
/// linear valuation is not counted), solved exactly by water-filling.
struct WelfareOptimum {
  std::vector<Allocation> allocation;
  double total_value;
  /// Common marginal value of interior buyers; 0 when supply is slack.
  double marginal_price;
};

WelfareOptimum optimal_welfare(const Population& pop);

/// True iff total buyer demand at unit price P falls short of the supply,
/// in which case the seller is guaranteed to buy back some resource.
bool buyback_guaranteed(const Population& pop, double price);

}  // namespace psp
