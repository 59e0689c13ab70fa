#include "psp/experiment.hpp"

#include <stdexcept>

#include "psp/io.hpp"
#include "psp/parallel.hpp"

namespace psp {
namespace {

void validate(const ExperimentSpec& spec) {
  if (spec.buyers < 1) {
    throw std::invalid_argument("ExperimentSpec: buyers must be >= 1");
  }
  if (!(spec.supply > 0.0)) {
    throw std::invalid_argument("ExperimentSpec: supply must be > 0");
  }
  if (!(spec.epsilon > 0.0)) {
    throw std::invalid_argument("ExperimentSpec: epsilon must be > 0");
  }
  if (spec.ensemble < 1) {
    throw std::invalid_argument("ExperimentSpec: ensemble must be >= 1");
  }
  if (spec.jobs < 1) {
    throw std::invalid_argument("ExperimentSpec: jobs must be >= 1");
  }
  if (!(spec.reserve_price >= 0.0)) {
    throw std::invalid_argument("ExperimentSpec: reserve must be >= 0");
  }
}

StrategyParams strategy_params(const ExperimentSpec& spec) {
  StrategyParams params;
  params.epsilon = spec.epsilon;
  params.compromise_tolerance = spec.compromise_tolerance;
  params.max_rounds = spec.max_rounds;
  return params;
}

SimConfig sim_config(const ExperimentSpec& spec, Population pop,
                     BidProfile initial) {
  SimConfig cfg(std::move(pop), std::move(initial));
  cfg.epsilon = spec.epsilon;
  cfg.quiescence_window = spec.quiescence_window;
  cfg.max_sim_time = spec.max_sim_time;
  cfg.resend_unimproved = spec.resend_unimproved;
  return cfg;
}

}  // namespace

std::string_view driver_name(DriverKind kind) {
  switch (kind) {
    case DriverKind::best_reply:
      return "best-reply";
    case DriverKind::alternating:
      return "alternating";
    case DriverKind::event_sim:
      return "event-sim";
  }
  throw std::invalid_argument("unknown driver kind");
}

Population experiment_population(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.population_file) {
    return read_population_file(*spec.population_file);
  }
  return sample_population(spec.buyers, spec.master_seed, spec.qbar_range,
                           spec.pbar_range, spec.supply, spec.reserve_price);
}

Population twin_experiment_population(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.population_file) {
    return read_population_file(*spec.population_file);
  }
  if (spec.buyers % 2 != 0) {
    throw std::invalid_argument(
        "twins need an even buyer count (half are duplicates)");
  }
  return make_twin_population(spec.buyers / 2, spec.master_seed,
                              spec.qbar_range, spec.pbar_range, spec.supply,
                              spec.reserve_price);
}

BidProfile experiment_initial_bids(const Population& pop,
                                   const ExperimentSpec& spec,
                                   int realization) {
  RngStream stream =
      substream(spec.master_seed, "initial-bids", 0, realization);
  return random_initial_bids(pop, stream);
}

ReserveSweepResult run_reserve_sweep(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.reserves.empty()) {
    throw std::invalid_argument("reserve sweep: no reserve prices given");
  }
  const Population base = experiment_population(spec);
  const StrategyParams params = strategy_params(spec);

  std::vector<ReserveCell> cells;
  cells.reserve(spec.reserves.size());
  for (const double reserve : spec.reserves) {
    if (!(reserve >= 0.0)) {
      throw std::invalid_argument("reserve sweep: reserves must be >= 0");
    }
    const Population pop = base.with_reserve_price(reserve);

    struct RunRow {
      bool converged = false;
      double revenue = 0.0;
      double value = 0.0;
      double utility = 0.0;
      std::optional<double> mean_price;
    };
    std::vector<RunRow> rows(spec.ensemble);
    parallel_for(spec.ensemble, spec.jobs, [&](int r) {
      const BidProfile initial = experiment_initial_bids(pop, spec, r);
      const DriverResult res = run_alternating_driver(pop, initial, params);
      rows[r] = RunRow{res.converged, res.outcome.revenue,
                       res.outcome.total_value, res.outcome.total_utility,
                       res.outcome.mean_price};
    });

    ReserveCell cell;
    cell.reserve = reserve;
    cell.realizations = spec.ensemble;
    std::vector<double> prices;
    std::vector<double> values;
    std::vector<double> utilities;
    std::vector<double> revenues;
    for (const RunRow& row : rows) {
      if (!row.converged) {
        ++cell.non_converged;
        continue;
      }
      if (row.mean_price) prices.push_back(*row.mean_price);
      values.push_back(row.value);
      utilities.push_back(row.utility);
      revenues.push_back(row.revenue);
    }
    if (!prices.empty()) cell.bid_price = ensemble_stats(prices);
    if (!values.empty()) {
      cell.total_value = ensemble_stats(values);
      cell.total_utility = ensemble_stats(utilities);
      cell.total_revenue = ensemble_stats(revenues);
    }
    cells.push_back(std::move(cell));
  }
  return ReserveSweepResult{base, std::move(cells)};
}

LatencySweepResult run_latency_sweep(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.comm_scales.empty()) {
    throw std::invalid_argument("latency sweep: no scales given");
  }
  Population pop = experiment_population(spec);
  BidProfile initial = experiment_initial_bids(pop, spec, 0);
  const SimConfig cfg = sim_config(spec, pop, initial);
  std::vector<ScalePoint> table =
      sweep_comm_scale(cfg, spec.comm_scales, spec.ensemble,
                       spec.master_seed, spec.jobs);
  return LatencySweepResult{std::move(pop), std::move(initial),
                            std::move(table)};
}

TwinsExperimentResult run_twins_experiment(const ExperimentSpec& spec) {
  validate(spec);
  Population pop = twin_experiment_population(spec);
  BidProfile initial = experiment_initial_bids(pop, spec, 0);
  const SimConfig cfg = sim_config(spec, pop, initial);
  TwinsResult twins =
      run_twins(cfg, spec.laziness_factor, spec.ensemble, spec.master_seed,
                spec.observed_pair, spec.jobs);
  return TwinsExperimentResult{std::move(pop), std::move(initial),
                               std::move(twins)};
}

bool SingleRunResult::succeeded() const {
  if (driver) return driver->converged;
  if (sim) return sim->termination == Termination::quiescent;
  return false;
}

SingleRunResult run_single(const ExperimentSpec& spec) {
  validate(spec);
  Population pop = experiment_population(spec);
  BidProfile initial = experiment_initial_bids(pop, spec, 0);
  SingleRunResult result{pop, initial,    std::nullopt, std::nullopt,
                         NashCheck{}, {}, {}};

  if (spec.driver == DriverKind::event_sim) {
    const SimConfig cfg = sim_config(spec, pop, initial);
    const SimTrace trace = [&](const SimStep& step) {
      result.sim_trace.push_back(step);
    };
    result.sim = run_simulation(cfg, spec.master_seed, 0, trace);
    result.nash = result.sim->nash
                      ? *result.sim->nash
                      : verify_epsilon_nash(result.sim->profile, pop,
                                            spec.epsilon);
  } else {
    const StrategyParams params = strategy_params(spec);
    const DriverTrace trace = [&](const DriverStep& step) {
      result.driver_trace.push_back(step);
    };
    result.driver = spec.driver == DriverKind::best_reply
                        ? run_best_reply_driver(pop, initial, params, trace)
                        : run_alternating_driver(pop, initial, params, trace);
    result.nash = verify_epsilon_nash(result.driver->profile, pop,
                                      spec.epsilon);
  }
  return result;
}

}  // namespace psp
