#include "psp/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "psp/random.hpp"
#include "psp/version.hpp"

namespace psp {
namespace {

using ordered_json = nlohmann::ordered_json;

/// Table precision: 10 significant digits.
std::string fd(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Full precision: doubles survive a write/read round trip exactly.
std::string ff(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

void write_meta(std::ostream& out, const ArtifactMeta& meta) {
  out << "# tool: " << meta.tool << "\n"
      << "# rng: " << meta.rng << "\n"
      << "# master_seed: " << meta.master_seed << "\n"
      << "# spec: " << meta.spec << "\n"
      << "# spec_hash: " << meta.spec_hash << "\n";
}

ordered_json meta_json(const ArtifactMeta& meta) {
  ordered_json j;
  j["tool"] = meta.tool;
  j["rng"] = meta.rng;
  j["master_seed"] = meta.master_seed;
  j["spec"] = meta.spec;
  j["spec_hash"] = meta.spec_hash;
  return j;
}

std::string stat_mean(const EnsembleStats& s) {
  return s.count == 0 ? std::string{} : fd(s.mean);
}

std::string stat_dev(const EnsembleStats& s) {
  return s.count == 0 ? std::string{} : fd(s.stddev());
}

ordered_json stats_json(const EnsembleStats& s) {
  ordered_json j;
  if (s.count == 0) {
    j["mean"] = nullptr;
    j["stddev"] = nullptr;
  } else {
    j["mean"] = s.mean;
    j["stddev"] = s.stddev();
  }
  j["count"] = s.count;
  return j;
}

/// Reads the next non-comment, non-blank line into `line`.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size() || line[i] == '#') continue;
    return true;
  }
  return false;
}

constexpr std::string_view kPhaseNames[] = {"best_reply", "compromise"};

}  // namespace

std::string canonical_spec_string(const ExperimentSpec& spec,
                                  std::string_view kind) {
  std::ostringstream out;
  const auto list = [&](std::span<const double> values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) s += ',';
      s += ff(values[i]);
    }
    return s + "]";
  };
  out << "kind=" << kind << " buyers=" << spec.buyers
      << " supply=" << ff(spec.supply) << " qbar=[" << ff(spec.qbar_range.lo)
      << ',' << ff(spec.qbar_range.hi) << "] pbar=["
      << ff(spec.pbar_range.lo) << ',' << ff(spec.pbar_range.hi) << "]"
      << " population_file="
      << (spec.population_file ? *spec.population_file : "-")
      << " epsilon=" << ff(spec.epsilon)
      << " tolerance=" << ff(spec.compromise_tolerance)
      << " max_rounds=" << spec.max_rounds << " seed=" << spec.master_seed
      << " ensemble=" << spec.ensemble << " reserves=" << list(spec.reserves)
      << " reserve=" << ff(spec.reserve_price)
      << " scales=" << list(spec.comm_scales)
      << " window=" << ff(spec.quiescence_window)
      << " max_sim_time=" << ff(spec.max_sim_time)
      << " resend=" << (spec.resend_unimproved ? 1 : 0)
      << " laziness=" << ff(spec.laziness_factor)
      << " pair=" << spec.observed_pair << " driver="
      << driver_name(spec.driver);
  return out.str();
}

std::string spec_hash(const ExperimentSpec& spec, std::string_view kind) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a(canonical_spec_string(spec, kind))));
  return buf;
}

ArtifactMeta experiment_meta(const ExperimentSpec& spec,
                             std::string_view kind) {
  ArtifactMeta meta;
  meta.tool = std::string("psp ") + std::string(kVersion);
  meta.rng = std::string(kRngId);
  meta.master_seed = spec.master_seed;
  meta.spec = canonical_spec_string(spec, kind);
  meta.spec_hash = spec_hash(spec, kind);
  return meta;
}

void write_population(std::ostream& out, const Population& pop,
                      const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "# columns: id qbar pbar (row 0: id supply reserve_price)\n";
  out << "0 " << ff(pop.supply()) << ' ' << ff(pop.reserve_price()) << '\n';
  for (const Buyer& b : pop.buyers()) {
    out << b.id << ' ' << ff(b.valuation.qbar()) << ' '
        << ff(b.valuation.pbar()) << '\n';
  }
}

Population read_population(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) {
    throw std::runtime_error("population: missing seller row");
  }
  std::istringstream seller(line);
  int id = -1;
  double supply = 0.0;
  double reserve = 0.0;
  if (!(seller >> id >> supply >> reserve) || id != 0) {
    throw std::runtime_error("population: first row must be id 0 with "
                             "supply and reserve price");
  }
  std::vector<Buyer> buyers;
  while (next_data_line(in, line)) {
    std::istringstream row(line);
    double qbar = 0.0;
    double pbar = 0.0;
    if (!(row >> id >> qbar >> pbar)) {
      throw std::runtime_error("population: malformed row: " + line);
    }
    buyers.push_back(Buyer{id, Valuation(qbar, pbar)});
  }
  return Population(std::move(buyers), supply, reserve);
}

void write_population_file(const std::filesystem::path& path,
                           const Population& pop, const ArtifactMeta& meta) {
  write_file(path, [&](std::ostream& out) { write_population(out, pop, meta); });
}

Population read_population_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open population file: " + path.string());
  }
  return read_population(in);
}

void write_profile(std::ostream& out, const BidProfile& profile,
                   const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "# columns: id quantity price (row 0: seller bid)\n";
  for (const Bid& b : profile.bids()) {
    out << b.buyer << ' ' << ff(b.quantity) << ' ' << ff(b.price) << '\n';
  }
}

BidProfile read_profile(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) {
    throw std::runtime_error("profile: missing seller row");
  }
  std::istringstream seller(line);
  int id = -1;
  double supply = 0.0;
  double reserve = 0.0;
  if (!(seller >> id >> supply >> reserve) || id != 0) {
    throw std::runtime_error("profile: first row must be the seller bid");
  }
  BidProfile profile(supply, reserve);
  while (next_data_line(in, line)) {
    std::istringstream row(line);
    double quantity = 0.0;
    double price = 0.0;
    if (!(row >> id >> quantity >> price)) {
      throw std::runtime_error("profile: malformed row: " + line);
    }
    profile.set(Bid{id, quantity, price});
  }
  return profile;
}

void write_profile_file(const std::filesystem::path& path,
                        const BidProfile& profile, const ArtifactMeta& meta) {
  write_file(path,
             [&](std::ostream& out) { write_profile(out, profile, meta); });
}

BidProfile read_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open profile file: " + path.string());
  }
  return read_profile(in);
}

void write_outcome_csv(std::ostream& out, const MarketOutcome& outcome,
                       const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "# seller_buyback: " << fd(outcome.seller_buyback) << '\n';
  out << "# mean_price: "
      << (outcome.mean_price ? fd(*outcome.mean_price) : "absent") << '\n';
  out << "buyer,bid_quantity,bid_price,allocation,cost,value,utility\n";
  for (const BuyerOutcome& b : outcome.buyers) {
    out << b.buyer << ',' << fd(b.bid_quantity) << ',' << fd(b.bid_price)
        << ',' << fd(b.allocation) << ',' << fd(b.cost) << ',' << fd(b.value)
        << ',' << fd(b.utility) << '\n';
  }
  out << "total,,," << fd(outcome.total_allocated) << ','
      << fd(outcome.revenue) << ',' << fd(outcome.total_value) << ','
      << fd(outcome.total_utility) << '\n';
}

void write_reserve_sweep_csv(std::ostream& out,
                             std::span<const ReserveCell> cells,
                             const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "quantity,statistic";
  for (const ReserveCell& c : cells) out << ',' << fd(c.reserve);
  out << '\n';
  const auto row = [&](std::string_view name, std::string_view stat,
                       const auto& field) {
    out << name << ',' << stat;
    for (const ReserveCell& c : cells) out << ',' << field(c);
    out << '\n';
  };
  row("bid_price", "mean",
      [](const ReserveCell& c) { return stat_mean(c.bid_price); });
  row("bid_price", "stddev",
      [](const ReserveCell& c) { return stat_dev(c.bid_price); });
  row("total_value", "mean",
      [](const ReserveCell& c) { return stat_mean(c.total_value); });
  row("total_value", "stddev",
      [](const ReserveCell& c) { return stat_dev(c.total_value); });
  row("total_utility", "mean",
      [](const ReserveCell& c) { return stat_mean(c.total_utility); });
  row("total_utility", "stddev",
      [](const ReserveCell& c) { return stat_dev(c.total_utility); });
  row("total_revenue", "mean",
      [](const ReserveCell& c) { return stat_mean(c.total_revenue); });
  row("total_revenue", "stddev",
      [](const ReserveCell& c) { return stat_dev(c.total_revenue); });
  row("non_converged", "count", [](const ReserveCell& c) {
    return std::to_string(c.non_converged);
  });
  row("realizations", "count", [](const ReserveCell& c) {
    return std::to_string(c.realizations);
  });
}

void write_latency_aggregate_csv(std::ostream& out,
                                 std::span<const ScalePoint> table,
                                 const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "scale,realizations,timeouts,mean_price_mean,mean_price_stddev,"
         "total_utility_mean,total_utility_stddev\n";
  for (const ScalePoint& p : table) {
    out << fd(p.scale) << ',' << p.realizations << ',' << p.timeouts << ','
        << stat_mean(p.mean_price) << ',' << stat_dev(p.mean_price) << ','
        << stat_mean(p.total_utility) << ',' << stat_dev(p.total_utility)
        << '\n';
  }
}

void write_latency_buyers_csv(std::ostream& out,
                              std::span<const ScalePoint> table,
                              const Population& pop,
                              const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "scale,buyer,value_mean,value_stddev,cost_mean,cost_stddev,"
         "utility_mean,utility_stddev\n";
  const std::span<const Buyer> buyers = pop.buyers();
  for (const ScalePoint& p : table) {
    if (p.buyer_value.size() != buyers.size()) {
      throw std::invalid_argument(
          "latency table and population sizes disagree");
    }
    for (std::size_t b = 0; b < buyers.size(); ++b) {
      out << fd(p.scale) << ',' << buyers[b].id << ','
          << stat_mean(p.buyer_value[b]) << ',' << stat_dev(p.buyer_value[b])
          << ',' << stat_mean(p.buyer_cost[b]) << ','
          << stat_dev(p.buyer_cost[b]) << ','
          << stat_mean(p.buyer_utility[b]) << ','
          << stat_dev(p.buyer_utility[b]) << '\n';
    }
  }
}

void write_twin_pairs_csv(std::ostream& out, const TwinsResult& twins,
                          const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "industrious,lazy,industrious_mean,industrious_stddev,lazy_mean,"
         "lazy_stddev,mean_difference,pooled_stddev\n";
  for (const TwinPair& p : twins.pairs) {
    out << p.industrious << ',' << p.lazy << ','
        << stat_mean(p.industrious_utility) << ','
        << stat_dev(p.industrious_utility) << ',' << stat_mean(p.lazy_utility)
        << ',' << stat_dev(p.lazy_utility) << ',';
    if (p.industrious_utility.count == 0) {
      out << ",\n";
      continue;
    }
    const double diff = p.industrious_utility.mean - p.lazy_utility.mean;
    const double vi = p.industrious_utility.variance.value_or(0.0);
    const double vl = p.lazy_utility.variance.value_or(0.0);
    out << fd(diff) << ',' << fd(std::sqrt(0.5 * (vi + vl))) << '\n';
  }
}

void write_twin_transient_csv(std::ostream& out, const TwinsResult& twins,
                              const ArtifactMeta& meta) {
  write_meta(out, meta);
  out << "# observed_pair: " << twins.observed_pair << '\n';
  out << "time,industrious_utility,lazy_utility\n";
  for (const TransientSample& s : twins.transient) {
    out << fd(s.time) << ',' << fd(s.industrious_utility) << ','
        << fd(s.lazy_utility) << '\n';
  }
}

void write_driver_trace(std::ostream& out, std::span<const DriverStep> steps,
                        const ArtifactMeta& meta) {
  ordered_json head;
  head["meta"] = meta_json(meta);
  out << head.dump() << '\n';
  for (const DriverStep& s : steps) {
    ordered_json j;
    j["round"] = s.round;
    j["phase"] = kPhaseNames[static_cast<int>(s.phase)];
    j["buyer"] = s.buyer;
    j["old_quantity"] = s.old_bid.quantity;
    j["old_price"] = s.old_bid.price;
    j["new_quantity"] = s.new_bid.quantity;
    j["new_price"] = s.new_bid.price;
    j["gain"] = s.utility_gain;
    out << j.dump() << '\n';
  }
}

void write_sim_trace(std::ostream& out, std::span<const SimStep> steps,
                     const ArtifactMeta& meta) {
  ordered_json head;
  head["meta"] = meta_json(meta);
  out << head.dump() << '\n';
  for (const SimStep& s : steps) {
    ordered_json j;
    j["time"] = s.time;
    j["event"] = s.kind == EventKind::evaluate ? "evaluate" : "activate";
    j["buyer"] = s.buyer;
    j["quantity"] = s.bid.quantity;
    j["price"] = s.bid.price;
    j["sent"] = s.sent;
    out << j.dump() << '\n';
  }
}

void write_reserve_sweep_summary(std::ostream& out,
                                 const ReserveSweepResult& result,
                                 const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["kind"] = "reserve-sweep";
  j["population"] = {{"buyers", result.population.size()},
                     {"supply", result.population.supply()}};
  ordered_json cells = ordered_json::array();
  for (const ReserveCell& c : result.cells) {
    ordered_json cell;
    cell["reserve"] = c.reserve;
    cell["realizations"] = c.realizations;
    cell["non_converged"] = c.non_converged;
    cell["bid_price"] = stats_json(c.bid_price);
    cell["total_value"] = stats_json(c.total_value);
    cell["total_utility"] = stats_json(c.total_utility);
    cell["total_revenue"] = stats_json(c.total_revenue);
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  out << j.dump(2) << '\n';
}

void write_latency_sweep_summary(std::ostream& out,
                                 const LatencySweepResult& result,
                                 const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["kind"] = "latency-sweep";
  j["population"] = {{"buyers", result.population.size()},
                     {"supply", result.population.supply()},
                     {"reserve", result.population.reserve_price()}};
  ordered_json scales = ordered_json::array();
  for (const ScalePoint& p : result.table) {
    ordered_json point;
    point["scale"] = p.scale;
    point["realizations"] = p.realizations;
    point["timeouts"] = p.timeouts;
    point["mean_price"] = stats_json(p.mean_price);
    point["total_utility"] = stats_json(p.total_utility);
    scales.push_back(std::move(point));
  }
  j["scales"] = std::move(scales);
  out << j.dump(2) << '\n';
}

void write_twins_summary(std::ostream& out,
                         const TwinsExperimentResult& result,
                         const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["kind"] = "twins";
  j["population"] = {{"buyers", result.population.size()},
                     {"supply", result.population.supply()},
                     {"reserve", result.population.reserve_price()}};
  j["realizations"] = result.twins.realizations;
  j["timeouts"] = result.twins.timeouts;
  j["observed_pair"] = result.twins.observed_pair;
  double worst_diff = 0.0;
  double worst_ratio = 0.0;
  ordered_json pairs = ordered_json::array();
  for (const TwinPair& p : result.twins.pairs) {
    ordered_json pair;
    pair["industrious"] = p.industrious;
    pair["lazy"] = p.lazy;
    pair["industrious_utility"] = stats_json(p.industrious_utility);
    pair["lazy_utility"] = stats_json(p.lazy_utility);
    if (p.industrious_utility.count > 0) {
      const double diff =
          std::abs(p.industrious_utility.mean - p.lazy_utility.mean);
      const double vi = p.industrious_utility.variance.value_or(0.0);
      const double vl = p.lazy_utility.variance.value_or(0.0);
      const double pooled = std::sqrt(0.5 * (vi + vl));
      pair["abs_mean_difference"] = diff;
      pair["pooled_stddev"] = pooled;
      worst_diff = std::max(worst_diff, diff);
      if (pooled > 0.0) worst_ratio = std::max(worst_ratio, diff / pooled);
    }
    pairs.push_back(std::move(pair));
  }
  j["max_abs_mean_difference"] = worst_diff;
  j["max_difference_over_pooled"] = worst_ratio;
  j["pairs"] = std::move(pairs);
  out << j.dump(2) << '\n';
}

void write_single_run_summary(std::ostream& out,
                              const SingleRunResult& result,
                              const ArtifactMeta& meta) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  j["kind"] = "run";
  j["population"] = {{"buyers", result.population.size()},
                     {"supply", result.population.supply()},
                     {"reserve", result.population.reserve_price()}};
  const MarketOutcome* outcome = nullptr;
  if (result.driver) {
    j["driver"] = result.driver->converged ? "converged" : "non-converged";
    j["rounds"] = result.driver->rounds;
    outcome = &result.driver->outcome;
  }
  if (result.sim) {
    j["termination"] = result.sim->termination == Termination::quiescent
                           ? "quiescent"
                           : "timeout";
    j["end_time"] = result.sim->end_time;
    j["evaluations"] = result.sim->evaluations;
    j["bids_sent"] = result.sim->bids_sent;
    j["bids_activated"] = result.sim->bids_activated;
    j["out_of_order_activations"] = result.sim->out_of_order_activations;
    outcome = &result.sim->outcome;
  }
  ordered_json nash;
  nash["is_equilibrium"] = result.nash.is_equilibrium;
  nash["worst_gain"] = result.nash.worst_gain;
  nash["worst_buyer"] = result.nash.worst_buyer;
  nash["worst_quantity"] = result.nash.worst_quantity;
  j["nash"] = std::move(nash);
  if (outcome != nullptr) {
    ordered_json o;
    o["total_allocated"] = outcome->total_allocated;
    o["revenue"] = outcome->revenue;
    o["total_value"] = outcome->total_value;
    o["total_utility"] = outcome->total_utility;
    if (outcome->mean_price) {
      o["mean_price"] = *outcome->mean_price;
    } else {
      o["mean_price"] = nullptr;
    }
    o["seller_buyback"] = outcome->seller_buyback;
    j["outcome"] = std::move(o);
  }
  out << j.dump(2) << '\n';
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  body(out);
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace psp
