#include "psp/engine.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

#include "psp/parallel.hpp"

namespace psp {
namespace {

struct Event {
  double time;
  std::uint64_t order;  // scheduling order, breaks timestamp ties
  EventKind kind;
  int buyer;
  Bid bid{};                  // activations only
  std::uint64_t send_seq{0};  // activations only
};

struct EventAfter {
  bool operator()(const Event& l, const Event& r) const {
    return l.time != r.time ? l.time > r.time : l.order > r.order;
  }
};

struct Agent {
  int id;
  const Valuation* valuation;
  DelayModel comm;
  DelayModel eval;
  RngStream comm_stream;
  RngStream eval_stream;
  Bid last_sent;
  std::uint64_t sends = 0;
  std::uint64_t newest_applied = 0;
  bool any_applied = false;
};

void validate(const SimConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("SimConfig: epsilon must be > 0");
  }
  if (!(cfg.comm_scale > 0.0)) {
    throw std::invalid_argument("SimConfig: comm_scale must be > 0");
  }
  if (cfg.initial.supply() != cfg.population.supply() ||
      cfg.initial.reserve_price() != cfg.population.reserve_price()) {
    throw std::invalid_argument(
        "SimConfig: initial profile and population disagree on the seller "
        "bid");
  }
  for (const Buyer& b : cfg.population.buyers()) {
    if (!cfg.initial.contains(b.id)) {
      throw std::invalid_argument("SimConfig: no initial bid for buyer " +
                                  std::to_string(b.id));
    }
  }
  if (cfg.initial.size() != cfg.population.size() + 1) {
    throw std::invalid_argument(
        "SimConfig: initial profile has bids outside the population");
  }
  for (const auto& [id, models] : cfg.overrides) {
    if (!cfg.population.contains(id)) {
      throw std::invalid_argument("SimConfig: delay override for unknown "
                                  "buyer " +
                                  std::to_string(id));
    }
  }
}

}  // namespace

SimResult run_simulation(const SimConfig& cfg, std::uint64_t seed,
                         int realization, const SimTrace& trace,
                         const ProfileProbe& probe) {
  validate(cfg);

  std::vector<Agent> agents;
  agents.reserve(cfg.population.size());
  double slowest_eval = 0.0;
  for (const Buyer& b : cfg.population.buyers()) {
    const auto it = cfg.overrides.find(b.id);
    const DelayModel comm =
        (it != cfg.overrides.end() ? it->second.comm : cfg.comm)
            .scaled_lambda(cfg.comm_scale);
    const DelayModel eval =
        it != cfg.overrides.end() ? it->second.eval : cfg.eval;
    slowest_eval = std::max(slowest_eval, eval.mean());
    agents.push_back(Agent{b.id, &b.valuation, comm, eval,
                           substream(seed, "comm", b.id, realization),
                           substream(seed, "eval", b.id, realization),
                           cfg.initial.at(b.id)});
  }
  const double window = cfg.quiescence_window > 0.0 ? cfg.quiescence_window
                                                    : 50.0 * slowest_eval;
  if (!(cfg.max_sim_time > window)) {
    throw std::invalid_argument(
        "SimConfig: max_sim_time must exceed the quiescence window");
  }
  const auto agent_of = [&](int id) -> Agent& {
    const auto it = std::lower_bound(
        agents.begin(), agents.end(), id,
        [](const Agent& a, int key) { return a.id < key; });
    return *it;
  };

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::uint64_t order = 0;
  for (Agent& a : agents) {
    queue.push(Event{sample_delay(a.eval, a.eval_stream), order++,
                     EventKind::evaluate, a.id});
  }

  BidProfile active = cfg.initial;
  SimResult result{active,      MarketOutcome{}, Termination::quiescent,
                   0.0,         0,               0,
                   0,           0,               std::nullopt};
  double last_activation = 0.0;
  int in_flight = 0;

  while (!queue.empty()) {
    const Event event = queue.top();
    if (in_flight == 0 && event.time - last_activation >= window) {
      result.termination = Termination::quiescent;
      result.end_time = last_activation + window;
      break;
    }
    if (event.time > cfg.max_sim_time) {
      result.termination = Termination::timeout;
      result.end_time = cfg.max_sim_time;
      break;
    }
    queue.pop();
    const double t = event.time;
    Agent& agent = agent_of(event.buyer);
    if (event.kind == EventKind::evaluate) {
      ++result.evaluations;
      const OpposingView view(active, agent.id);
      const Bid candidate =
          best_reply_from(view, *agent.valuation, cfg.epsilon);
      const double u_candidate = view.utility(candidate, *agent.valuation);
      const double u_sent = view.utility(agent.last_sent, *agent.valuation);
      const bool improved = u_candidate >= u_sent + cfg.epsilon;
      const bool lagging = !(active.at(agent.id) == agent.last_sent);
      const bool send = improved || (cfg.resend_unimproved && lagging);
      if (send) {
        agent.last_sent = candidate;
        ++result.bids_sent;
        ++in_flight;
        queue.push(Event{t + sample_delay(agent.comm, agent.comm_stream),
                         order++, EventKind::activate, agent.id, candidate,
                         agent.sends++});
      }
      queue.push(Event{t + sample_delay(agent.eval, agent.eval_stream),
                       order++, EventKind::evaluate, agent.id});
      if (trace) {
        trace(SimStep{t, EventKind::evaluate, agent.id, candidate, send});
      }
    } else {
      active.set(event.bid);
      --in_flight;
      ++result.bids_activated;
      last_activation = t;
      if (agent.any_applied && event.send_seq < agent.newest_applied) {
        ++result.out_of_order_activations;
      } else {
        agent.newest_applied = event.send_seq;
        agent.any_applied = true;
      }
      if (trace) {
        trace(SimStep{t, EventKind::activate, agent.id, event.bid, true});
      }
      if (probe) probe(t, active);
    }
  }

  result.profile = std::move(active);
  result.outcome = outcome(result.profile, cfg.population);
  if (result.termination == Termination::quiescent && cfg.verify_quiescent) {
    result.nash = verify_epsilon_nash(result.profile, cfg.population,
                                      cfg.epsilon, cfg.verify_grid_points);
  }
  return result;
}

std::vector<ScalePoint> sweep_comm_scale(const SimConfig& base,
                                         std::span<const double> scales,
                                         int ensemble, std::uint64_t seed,
                                         int jobs) {
  if (scales.empty()) {
    throw std::invalid_argument("sweep_comm_scale: no scales given");
  }
  if (ensemble < 1) {
    throw std::invalid_argument("sweep_comm_scale: ensemble must be >= 1");
  }
  const std::size_t n = base.population.size();
  std::vector<ScalePoint> table;
  table.reserve(scales.size());
  for (const double scale : scales) {
    if (!(scale > 0.0)) {
      throw std::invalid_argument("sweep_comm_scale: scales must be > 0");
    }
    SimConfig cfg = base;
    cfg.comm_scale = base.comm_scale * scale;
    std::vector<std::optional<SimResult>> runs(ensemble);
    parallel_for(ensemble, jobs,
                 [&](int r) { runs[r] = run_simulation(cfg, seed, r); });

    ScalePoint point;
    point.scale = scale;
    point.realizations = ensemble;
    std::vector<double> prices;
    std::vector<double> utilities;
    std::vector<std::vector<double>> value(n);
    std::vector<std::vector<double>> costs(n);
    std::vector<std::vector<double>> utils(n);
    for (const std::optional<SimResult>& run : runs) {
      const SimResult& res = *run;
      if (res.termination == Termination::timeout) {
        ++point.timeouts;
        continue;
      }
      if (res.outcome.mean_price) prices.push_back(*res.outcome.mean_price);
      utilities.push_back(res.outcome.total_utility);
      for (std::size_t b = 0; b < n; ++b) {
        value[b].push_back(res.outcome.buyers[b].value);
        costs[b].push_back(res.outcome.buyers[b].cost);
        utils[b].push_back(res.outcome.buyers[b].utility);
      }
    }
    if (!prices.empty()) point.mean_price = ensemble_stats(prices);
    if (!utilities.empty()) point.total_utility = ensemble_stats(utilities);
    point.buyer_value.resize(n);
    point.buyer_cost.resize(n);
    point.buyer_utility.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
      if (value[b].empty()) continue;
      point.buyer_value[b] = ensemble_stats(value[b]);
      point.buyer_cost[b] = ensemble_stats(costs[b]);
      point.buyer_utility[b] = ensemble_stats(utils[b]);
    }
    table.push_back(std::move(point));
  }
  return table;
}

Population make_twin_population(int pairs, std::uint64_t seed,
                                Interval qbar_range, Interval pbar_range,
                                double supply, double reserve_price) {
  if (pairs < 1) {
    throw std::invalid_argument("make_twin_population: pairs must be >= 1");
  }
  const Population half = sample_population(pairs, seed, qbar_range,
                                            pbar_range, supply, reserve_price);
  std::vector<Buyer> buyers(half.buyers().begin(), half.buyers().end());
  buyers.reserve(2 * static_cast<std::size_t>(pairs));
  for (int i = 0; i < pairs; ++i) {
    buyers.push_back(Buyer{pairs + 1 + i, buyers[i].valuation});
  }
  return Population(std::move(buyers), supply, reserve_price);
}

TwinsResult run_twins(const SimConfig& base, double laziness_factor,
                      int ensemble, std::uint64_t seed, int observed_pair,
                      int jobs) {
  const int n = static_cast<int>(base.population.size());
  if (n == 0 || n % 2 != 0) {
    throw std::invalid_argument("run_twins: population size must be even");
  }
  const int pairs = n / 2;
  const std::span<const Buyer> buyers = base.population.buyers();
  for (int i = 0; i < n; ++i) {
    if (buyers[i].id != i + 1) {
      throw std::invalid_argument("run_twins: buyer ids must be 1..2m");
    }
  }
  for (int i = 0; i < pairs; ++i) {
    if (!(buyers[i].valuation == buyers[i + pairs].valuation)) {
      throw std::invalid_argument(
          "run_twins: buyers i and i+m must share a valuation");
    }
  }
  if (!(laziness_factor > 0.0)) {
    throw std::invalid_argument("run_twins: laziness factor must be > 0");
  }
  if (observed_pair < 1 || observed_pair > pairs) {
    throw std::invalid_argument("run_twins: observed pair out of range");
  }
  if (ensemble < 1) {
    throw std::invalid_argument("run_twins: ensemble must be >= 1");
  }

  SimConfig cfg = base;
  for (int id = pairs + 1; id <= n; ++id) {
    cfg.overrides.insert_or_assign(
        id, AgentModels{base.comm.slowed(laziness_factor),
                        base.eval.slowed(laziness_factor)});
  }

  TwinsResult result;
  result.realizations = ensemble;
  result.observed_pair = observed_pair;
  const int lazy_observed = observed_pair + pairs;
  const auto utility_of = [&](const BidProfile& profile, int id) {
    const double received = allocation_of(allocate(profile), id);
    return cfg.population.valuation_of(id).value(received) -
           cost(profile, id);
  };

  std::vector<std::optional<SimResult>> runs(ensemble);
  parallel_for(ensemble, jobs, [&](int r) {
    if (r == 0) {
      const ProfileProbe probe = [&](double t, const BidProfile& profile) {
        result.transient.push_back(TransientSample{
            t, utility_of(profile, observed_pair),
            utility_of(profile, lazy_observed)});
      };
      runs[r] = run_simulation(cfg, seed, r, nullptr, probe);
    } else {
      runs[r] = run_simulation(cfg, seed, r);
    }
  });

  std::vector<std::vector<double>> samples(n);
  for (const std::optional<SimResult>& run : runs) {
    const SimResult& res = *run;
    if (res.termination == Termination::timeout) {
      ++result.timeouts;
      continue;
    }
    for (int b = 0; b < n; ++b) {
      samples[b].push_back(res.outcome.buyers[b].utility);
    }
  }
  result.pairs.reserve(pairs);
  for (int i = 0; i < pairs; ++i) {
    TwinPair pair;
    pair.industrious = i + 1;
    pair.lazy = i + 1 + pairs;
    if (!samples[i].empty()) {
      pair.industrious_utility = ensemble_stats(samples[i]);
      pair.lazy_utility = ensemble_stats(samples[i + pairs]);
    }
    result.pairs.push_back(pair);
  }
  return result;
}

}  // namespace psp
