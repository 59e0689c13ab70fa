#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "psp/engine.hpp"
#include "psp/initial_bids.hpp"

namespace psp {

enum class DriverKind { best_reply, alternating, event_sim };

std::string_view driver_name(DriverKind kind);

/// Everything needed to reproduce one experiment. Defaults describe the
/// reference scenario: 100 buyers with qbar uniform on [50, 100] and pbar
/// uniform on [10, 20], supply 1000, epsilon 5, ensembles of 100.
struct ExperimentSpec {
  int buyers = 100;
  double supply = 1000.0;
  Interval qbar_range{50.0, 100.0};
  Interval pbar_range{10.0, 20.0};
  /// When set, the population is read from this file instead of sampled.
  std::optional<std::string> population_file;

  double epsilon = 5.0;
  double compromise_tolerance = 1e-6;
  int max_rounds = 10000;

  std::uint64_t master_seed = 42;
  int ensemble = 100;
  int jobs = 1;

  /// Reserve prices of the sweep experiment.
  std::vector<double> reserves{0.0, 6.0, 12.0, 14.0, 16.0};
  /// Reserve price of every other experiment.
  double reserve_price = 12.0;

  /// Communication-scale multipliers of the latency sweep.
  std::vector<double> comm_scales{1.0, 2.0, 5.0, 10.0, 20.0};
  double quiescence_window = 0.0;  // nonpositive selects the automatic window
  double max_sim_time = 1e5;
  bool resend_unimproved = false;

  double laziness_factor = 17.0;
  int observed_pair = 1;

  /// Driver of the single-run experiment.
  DriverKind driver = DriverKind::alternating;
};

/// The population an experiment runs on: loaded from population_file when
/// set (reserve price taken from the file), sampled otherwise.
Population experiment_population(const ExperimentSpec& spec);

/// Twin layout of the same source: pairs = buyers/2 sampled buyers, each
/// duplicated. Requires an even buyer count.
Population twin_experiment_population(const ExperimentSpec& spec);

/// Truthful random starting bids for one realization, drawn from a stream
/// keyed by the realization index only, so a fixed (seed, realization)
/// yields the same quantities at every reserve price.
BidProfile experiment_initial_bids(const Population& pop,
                                   const ExperimentSpec& spec,
                                   int realization);

/// Ensemble summary of one reserve price. Statistics cover converged
/// realizations; the rest are counted in non_converged.
struct ReserveCell {
  double reserve = 0.0;
  int realizations = 0;
  int non_converged = 0;
  EnsembleStats bid_price;
  EnsembleStats total_value;
  EnsembleStats total_utility;
  EnsembleStats total_revenue;
};

struct ReserveSweepResult {
  Population population;
  std::vector<ReserveCell> cells;
};

/// Alternating-driver ensembles over random initial bids, one cell per
/// reserve price, all on the same population.
ReserveSweepResult run_reserve_sweep(const ExperimentSpec& spec);

struct LatencySweepResult {
  Population population;
  /// The starting profile shared by every realization and scale.
  BidProfile initial;
  std::vector<ScalePoint> table;
};

LatencySweepResult run_latency_sweep(const ExperimentSpec& spec);

struct TwinsExperimentResult {
  Population population;
  BidProfile initial;
  TwinsResult twins;
};

TwinsExperimentResult run_twins_experiment(const ExperimentSpec& spec);

/// One fully traced run of the selected driver, with an equilibrium check
/// of the final profile.
struct SingleRunResult {
  Population population;
  BidProfile initial;
  std::optional<DriverResult> driver;  // round-robin drivers
  std::optional<SimResult> sim;        // event simulation
  NashCheck nash;
  std::vector<DriverStep> driver_trace;
  std::vector<SimStep> sim_trace;

  bool succeeded() const;
};

SingleRunResult run_single(const ExperimentSpec& spec);

}  // namespace psp
