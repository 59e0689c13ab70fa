#include "psp/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace psp {

Valuation::Valuation(double qbar, double pbar) : qbar_(qbar), pbar_(pbar) {
  if (!(qbar > 0.0) || !(pbar > 0.0) || !std::isfinite(qbar) ||
      !std::isfinite(pbar)) {
    throw std::invalid_argument("Valuation: qbar and pbar must be positive");
  }
}

double Valuation::value(double z) const {
  if (!(z >= 0.0)) {
    throw std::invalid_argument("Valuation::value: negative quantity");
  }
  if (z >= qbar_) return 0.5 * qbar_ * pbar_;
  return (1.0 - 0.5 * z / qbar_) * z * pbar_;
}

double Valuation::marginal(double z) const {
  if (!(z >= 0.0)) {
    throw std::invalid_argument("Valuation::marginal: negative quantity");
  }
  if (z >= qbar_) return 0.0;
  return pbar_ * (1.0 - z / qbar_);
}

double Valuation::demand(double y) const {
  if (!(y >= 0.0)) {
    throw std::invalid_argument("Valuation::demand: negative price");
  }
  if (y > pbar_) return 0.0;
  return std::clamp(qbar_ * (1.0 - y / pbar_), 0.0, qbar_);
}

double allocation_of(std::span<const Allocation> allocations, int buyer) {
  for (const Allocation& a : allocations) {
    if (a.buyer == buyer) return a.quantity;
  }
  throw std::out_of_range("allocation_of: unknown buyer id " +
                          std::to_string(buyer));
}

Population::Population(std::vector<Buyer> buyers, double supply,
                       double reserve_price)
    : buyers_(std::move(buyers)),
      supply_(supply),
      reserve_price_(reserve_price) {
  if (!(supply > 0.0)) {
    throw std::invalid_argument("Population: supply must be positive");
  }
  if (!(reserve_price >= 0.0)) {
    throw std::invalid_argument("Population: reserve price must be >= 0");
  }
  std::sort(buyers_.begin(), buyers_.end(),
            [](const Buyer& a, const Buyer& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < buyers_.size(); ++i) {
    if (buyers_[i].id < 1) {
      throw std::invalid_argument(
          "Population: buyer ids must be >= 1 (id 0 is the seller)");
    }
    if (i > 0 && buyers_[i].id == buyers_[i - 1].id) {
      throw std::invalid_argument("Population: duplicate buyer id " +
                                  std::to_string(buyers_[i].id));
    }
  }
}

const Valuation& Population::valuation_of(int buyer) const {
  auto it = std::lower_bound(
      buyers_.begin(), buyers_.end(), buyer,
      [](const Buyer& b, int id) { return b.id < id; });
  if (it == buyers_.end() || it->id != buyer) {
    throw std::out_of_range("Population: unknown buyer id " +
                            std::to_string(buyer));
  }
  return it->valuation;
}

bool Population::contains(int buyer) const {
  auto it = std::lower_bound(
      buyers_.begin(), buyers_.end(), buyer,
      [](const Buyer& b, int id) { return b.id < id; });
  return it != buyers_.end() && it->id == buyer;
}

Population Population::with_reserve_price(double reserve_price) const {
  return Population(buyers_, supply_, reserve_price);
}

Population sample_population(int n, std::uint64_t seed, Interval qbar_range,
                             Interval pbar_range, double supply,
                             double reserve_price) {
  if (n < 1) {
    throw std::invalid_argument("sample_population: need n >= 1");
  }
  if (!(qbar_range.lo > 0.0) || !(qbar_range.hi >= qbar_range.lo) ||
      !(pbar_range.lo > 0.0) || !(pbar_range.hi >= pbar_range.lo)) {
    throw std::invalid_argument("sample_population: invalid ranges");
  }
  RngStream stream = substream(seed, "population");
  std::vector<Buyer> buyers;
  buyers.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double qbar =
        qbar_range.lo + stream.next_unit() * (qbar_range.hi - qbar_range.lo);
    const double pbar =
        pbar_range.lo + stream.next_unit() * (pbar_range.hi - pbar_range.lo);
    buyers.push_back(Buyer{i, Valuation(qbar, pbar)});
  }
  return Population(std::move(buyers), supply, reserve_price);
}

WelfareOptimum optimal_welfare(const Population& pop) {
  const double supply = pop.supply();
  double total_demand = 0.0;
  for (const Buyer& b : pop.buyers()) total_demand += b.valuation.qbar();

  double mu = 0.0;
  if (total_demand > supply) {
    // Total demand sum(f_i(mu)) is piecewise linear and decreasing in mu,
    // with breakpoints at the pbar values; solve the segment containing the
    // root in closed form.
    std::vector<double> breaks;
    breaks.reserve(pop.size());
    for (const Buyer& b : pop.buyers()) breaks.push_back(b.valuation.pbar());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double lo = 0.0;
    for (double hi : breaks) {
      // Buyers active on [lo, hi): those with pbar > lo.
      double a = 0.0;
      double slope = 0.0;
      for (const Buyer& b : pop.buyers()) {
        if (b.valuation.pbar() > lo) {
          a += b.valuation.qbar();
          slope += b.valuation.qbar() / b.valuation.pbar();
        }
      }
      const double candidate = (a - supply) / slope;
      if (candidate >= lo && candidate <= hi) {
        mu = candidate;
        break;
      }
      lo = hi;
      mu = hi;  // root must lie beyond this segment; demand still > supply
    }
  }

  WelfareOptimum out;
  out.marginal_price = mu;
  out.total_value = 0.0;
  out.allocation.reserve(pop.size());
  for (const Buyer& b : pop.buyers()) {
    const double a = b.valuation.demand(mu);
    out.allocation.push_back(Allocation{b.id, a});
    out.total_value += b.valuation.value(a);
  }
  return out;
}

bool buyback_guaranteed(const Population& pop, double price) {
  if (!(price >= 0.0)) {
    throw std::invalid_argument("buyback_guaranteed: negative price");
  }
  double demand = 0.0;
  for (const Buyer& b : pop.buyers()) demand += b.valuation.demand(price);
  return demand < pop.supply();
}

}  // namespace psp
