#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "psp/delay.hpp"
#include "psp/stats.hpp"
#include "psp/strategy.hpp"

namespace psp {

/// Delay models of one buyer agent: communication latency of its outgoing
/// bid messages and the interval between its market evaluations.
struct AgentModels {
  DelayModel comm;
  DelayModel eval;
};

enum class Termination { quiescent, timeout };

/// Configuration of one asynchronous market simulation. Agents evaluate
/// replies at random intervals; accepted bids take effect only after a
/// random communication delay, so several may be in flight at once.
struct SimConfig {
  SimConfig(Population pop, BidProfile start)
      : population(std::move(pop)),
        initial(std::move(start)),
        comm(default_delay_models().comm),
        eval(default_delay_models().eval) {}

  Population population;
  BidProfile initial;
  double epsilon = 5.0;

  /// Shared delay models; `overrides` replaces both for selected buyers.
  DelayModel comm;
  DelayModel eval;
  std::map<int, AgentModels> overrides;

  /// Multiplies the scale (lambda) of every communication model,
  /// overrides included. 1.0 leaves the models untouched.
  double comm_scale = 1.0;

  /// Simulated seconds with no bid activation processed or pending after
  /// which the run counts as settled. Nonpositive selects the automatic
  /// window: 50 expected evaluation intervals of the slowest agent.
  double quiescence_window = 0.0;
  double max_sim_time = 1e5;

  /// Also resend a candidate that fails the utility gate whenever the
  /// buyer's active bid differs from the bid they last sent.
  bool resend_unimproved = false;

  /// Check the final profile of quiescent runs for epsilon-equilibrium.
  bool verify_quiescent = true;
  int verify_grid_points = 10000;
};

enum class EventKind { evaluate, activate };

/// One line of the simulation trace.
struct SimStep {
  double time;
  EventKind kind;
  int buyer;
  /// The candidate reply (evaluate) or the bid entering force (activate).
  Bid bid;
  /// Gate decision on evaluate steps; always true on activations.
  bool sent;
};

using SimTrace = std::function<void(const SimStep&)>;

/// Called after every activation with the updated active profile.
using ProfileProbe = std::function<void(double time, const BidProfile&)>;

struct SimResult {
  BidProfile profile;
  MarketOutcome outcome;
  Termination termination = Termination::quiescent;
  double end_time = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t bids_sent = 0;
  std::int64_t bids_activated = 0;
  /// Activations that applied a bid sent earlier than one already applied
  /// for the same buyer (possible under heavy-tailed latency).
  std::int64_t out_of_order_activations = 0;
  /// Present for quiescent runs when verification is enabled.
  std::optional<NashCheck> nash;
};

/// Runs one simulation. All randomness derives from (seed, realization):
/// buyer delay streams are keyed by purpose, buyer id and realization, so
/// rescaling communication latency never perturbs evaluation times.
SimResult run_simulation(const SimConfig& cfg, std::uint64_t seed,
                         int realization = 0, const SimTrace& trace = nullptr,
                         const ProfileProbe& probe = nullptr);

/// Ensemble summary of one communication-latency scale.
struct ScalePoint {
  double scale = 1.0;
  int realizations = 0;
  int timeouts = 0;
  /// Statistics over quiescent realizations only.
  EnsembleStats mean_price;
  EnsembleStats total_utility;
  /// Per-buyer statistics in population (ascending id) order.
  std::vector<EnsembleStats> buyer_value;
  std::vector<EnsembleStats> buyer_cost;
  std::vector<EnsembleStats> buyer_utility;
};

/// Repeats the ensemble at each latency scale with paired randomness:
/// realization r uses the same delay substreams at every scale, and the
/// initial profile from `base` is shared by all runs.
std::vector<ScalePoint> sweep_comm_scale(const SimConfig& base,
                                         std::span<const double> scales,
                                         int ensemble, std::uint64_t seed,
                                         int jobs = 1);

/// Samples `pairs` buyers and duplicates their valuations, so buyer i and
/// buyer i + pairs value the resource identically.
Population make_twin_population(int pairs, std::uint64_t seed,
                                Interval qbar_range, Interval pbar_range,
                                double supply, double reserve_price);

struct TwinPair {
  int industrious;
  int lazy;
  EnsembleStats industrious_utility;
  EnsembleStats lazy_utility;
};

/// Utilities of the observed pair at one activation instant.
struct TransientSample {
  double time;
  double industrious_utility;
  double lazy_utility;
};

struct TwinsResult {
  std::vector<TwinPair> pairs;
  int realizations = 0;
  int timeouts = 0;
  /// Buyer id of the industrious twin whose pair is traced over time.
  int observed_pair = 1;
  /// Utility-versus-time trace of the observed pair in realization 0.
  std::vector<TransientSample> transient;
};

/// Twin experiment: the upper half of an even population (ids pairs+1 ..
/// 2*pairs) runs with both delay models slowed by `laziness_factor`
/// (translation and scale multiplied), the lower half with the shared
/// models. Requires duplicated valuations between the halves.
TwinsResult run_twins(const SimConfig& base, double laziness_factor,
                      int ensemble, std::uint64_t seed, int observed_pair = 1,
                      int jobs = 1);

}  // namespace psp
