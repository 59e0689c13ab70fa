#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "psp/experiment.hpp"
#include "psp/io.hpp"
#include "psp/version.hpp"

namespace fs = std::filesystem;

using psp::ArtifactMeta;
using psp::DriverKind;
using psp::ExperimentSpec;

namespace {

void add_population_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--buyers", spec.buyers, "Number of buyers")
      ->capture_default_str();
  cmd->add_option("--supply", spec.supply, "Auctioned quantity Q")
      ->capture_default_str();
  cmd->add_option("--qbar-min", spec.qbar_range.lo,
                  "Lower end of the qbar sampling range")
      ->capture_default_str();
  cmd->add_option("--qbar-max", spec.qbar_range.hi,
                  "Upper end of the qbar sampling range")
      ->capture_default_str();
  cmd->add_option("--pbar-min", spec.pbar_range.lo,
                  "Lower end of the pbar sampling range")
      ->capture_default_str();
  cmd->add_option("--pbar-max", spec.pbar_range.hi,
                  "Upper end of the pbar sampling range")
      ->capture_default_str();
  cmd->add_option("--population", spec.population_file,
                  "Read the population from this file instead of sampling");
  cmd->add_option("--seed", spec.master_seed, "Master random seed")
      ->capture_default_str();
}

void add_strategy_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--epsilon", spec.epsilon, "Utility-gain threshold")
      ->capture_default_str();
  cmd->add_option("--tolerance", spec.compromise_tolerance,
                  "Compromise convergence tolerance")
      ->capture_default_str();
  cmd->add_option("--max-rounds", spec.max_rounds,
                  "Round cap before a run counts as non-converged")
      ->capture_default_str();
}

void add_ensemble_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--ensemble", spec.ensemble, "Realizations per ensemble")
      ->capture_default_str();
  cmd->add_option("--jobs", spec.jobs, "Worker threads for realizations")
      ->capture_default_str();
}

void add_sim_options(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--reserve", spec.reserve_price, "Seller reserve price")
      ->capture_default_str();
  cmd->add_option("--window", spec.quiescence_window,
                  "Quiescence window in simulated seconds (0 = automatic)")
      ->capture_default_str();
  cmd->add_option("--max-sim-time", spec.max_sim_time,
                  "Simulated-time cap before a run counts as timed out")
      ->capture_default_str();
  cmd->add_flag("--resend-unimproved", spec.resend_unimproved,
                "Also resend candidates that fail the utility gate while "
                "the active bid lags the last sent bid");
}

int artifact_note(const std::string& line, int code) {
  std::cout << line << '\n';
  return code;
}

int cmd_gen_population(const ExperimentSpec& spec, const fs::path& output) {
  const ArtifactMeta meta = psp::experiment_meta(spec, "gen-population");
  const psp::Population pop = psp::experiment_population(spec);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  psp::write_population_file(output, pop, meta);
  return artifact_note("gen-population: " + std::to_string(pop.size()) +
                           " buyers -> " + output.string(),
                       0);
}

int cmd_reserve_sweep(const ExperimentSpec& spec, const fs::path& dir) {
  const ArtifactMeta meta = psp::experiment_meta(spec, "reserve-sweep");
  const psp::ReserveSweepResult result = psp::run_reserve_sweep(spec);
  fs::create_directories(dir);
  psp::write_population_file(dir / "population.txt", result.population, meta);
  psp::write_file(dir / "reserve_sweep.csv", [&](std::ostream& out) {
    psp::write_reserve_sweep_csv(out, result.cells, meta);
  });
  psp::write_file(dir / "summary.json", [&](std::ostream& out) {
    psp::write_reserve_sweep_summary(out, result, meta);
  });
  int non_converged = 0;
  for (const psp::ReserveCell& c : result.cells) {
    non_converged += c.non_converged;
  }
  return artifact_note(
      "reserve-sweep: " + std::to_string(result.cells.size()) +
          " reserve prices x " + std::to_string(spec.ensemble) + " runs, " +
          std::to_string(non_converged) + " non-converged -> " + dir.string(),
      non_converged == 0 ? 0 : 3);
}

int cmd_latency_sweep(const ExperimentSpec& spec, const fs::path& dir) {
  const ArtifactMeta meta = psp::experiment_meta(spec, "latency-sweep");
  const psp::LatencySweepResult result = psp::run_latency_sweep(spec);
  fs::create_directories(dir);
  psp::write_population_file(dir / "population.txt", result.population, meta);
  psp::write_profile_file(dir / "initial_profile.txt", result.initial, meta);
  psp::write_file(dir / "latency_aggregate.csv", [&](std::ostream& out) {
    psp::write_latency_aggregate_csv(out, result.table, meta);
  });
  psp::write_file(dir / "latency_buyers.csv", [&](std::ostream& out) {
    psp::write_latency_buyers_csv(out, result.table, result.population, meta);
  });
  psp::write_file(dir / "summary.json", [&](std::ostream& out) {
    psp::write_latency_sweep_summary(out, result, meta);
  });
  int timeouts = 0;
  for (const psp::ScalePoint& p : result.table) timeouts += p.timeouts;
  return artifact_note(
      "latency-sweep: " + std::to_string(result.table.size()) + " scales x " +
          std::to_string(spec.ensemble) + " runs, " +
          std::to_string(timeouts) + " timeouts -> " + dir.string(),
      timeouts == 0 ? 0 : 3);
}

int cmd_twins(const ExperimentSpec& spec, const fs::path& dir) {
  const ArtifactMeta meta = psp::experiment_meta(spec, "twins");
  const psp::TwinsExperimentResult result = psp::run_twins_experiment(spec);
  fs::create_directories(dir);
  psp::write_population_file(dir / "population.txt", result.population, meta);
  psp::write_profile_file(dir / "initial_profile.txt", result.initial, meta);
  psp::write_file(dir / "twin_pairs.csv", [&](std::ostream& out) {
    psp::write_twin_pairs_csv(out, result.twins, meta);
  });
  psp::write_file(dir / "twin_transient.csv", [&](std::ostream& out) {
    psp::write_twin_transient_csv(out, result.twins, meta);
  });
  psp::write_file(dir / "summary.json", [&](std::ostream& out) {
    psp::write_twins_summary(out, result, meta);
  });
  return artifact_note(
      "twins: " + std::to_string(result.twins.pairs.size()) + " pairs x " +
          std::to_string(spec.ensemble) + " runs, " +
          std::to_string(result.twins.timeouts) + " timeouts -> " +
          dir.string(),
      result.twins.timeouts == 0 ? 0 : 3);
}

int cmd_run(const ExperimentSpec& spec, const fs::path& dir) {
  const ArtifactMeta meta = psp::experiment_meta(spec, "run");
  const psp::SingleRunResult result = psp::run_single(spec);
  fs::create_directories(dir);
  psp::write_population_file(dir / "population.txt", result.population, meta);
  psp::write_profile_file(dir / "initial_profile.txt", result.initial, meta);
  const psp::BidProfile& final_profile =
      result.driver ? result.driver->profile : result.sim->profile;
  const psp::MarketOutcome& outcome =
      result.driver ? result.driver->outcome : result.sim->outcome;
  psp::write_profile_file(dir / "final_profile.txt", final_profile, meta);
  psp::write_file(dir / "outcome.csv", [&](std::ostream& out) {
    psp::write_outcome_csv(out, outcome, meta);
  });
  psp::write_file(dir / "trace.jsonl", [&](std::ostream& out) {
    if (result.driver) {
      psp::write_driver_trace(out, result.driver_trace, meta);
    } else {
      psp::write_sim_trace(out, result.sim_trace, meta);
    }
  });
  psp::write_file(dir / "summary.json", [&](std::ostream& out) {
    psp::write_single_run_summary(out, result, meta);
  });
  const bool ok = result.succeeded();
  std::string status;
  if (result.driver) {
    status = ok ? "converged in " + std::to_string(result.driver->rounds) +
                      " rounds"
                : "non-converged";
  } else {
    status = ok ? "quiescent" : "timeout";
  }
  return artifact_note("run (" + std::string(driver_name(spec.driver)) +
                           "): " + status + " -> " + dir.string(),
                       ok ? 0 : 3);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Progressive second-price auction experiments"};
  app.set_version_flag("--version", std::string(psp::kVersion));
  app.set_config("--config", "",
                 "Read options from an INI config file (sections named "
                 "after subcommands; command-line flags win)");
  app.require_subcommand(1);
  // Lets app-wide flags such as --config appear after the subcommand name.
  app.fallthrough();

  ExperimentSpec spec;
  const std::map<std::string, DriverKind> driver_names{
      {"best-reply", DriverKind::best_reply},
      {"alternating", DriverKind::alternating},
      {"event-sim", DriverKind::event_sim}};

  CLI::App* gen = app.add_subcommand(
      "gen-population", "Sample a population and write it to a file");
  std::string gen_output = "population.txt";
  add_population_options(gen, spec);
  gen->add_option("--output", gen_output, "Output file")
      ->capture_default_str();
  gen->add_option("--reserve", spec.reserve_price,
                  "Reserve price recorded in the file")
      ->capture_default_str();

  CLI::App* sweep = app.add_subcommand(
      "reserve-sweep",
      "Alternating-driver ensembles across reserve prices (table layout)");
  std::string sweep_dir = "reserve-sweep-out";
  add_population_options(sweep, spec);
  add_strategy_options(sweep, spec);
  add_ensemble_options(sweep, spec);
  sweep->add_option("--reserves", spec.reserves,
                    "Reserve prices of the sweep")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--reserve", spec.reserve_price,
                    "Reserve recorded with the population artifact")
      ->capture_default_str();
  sweep->add_option("--out", sweep_dir, "Output directory")
      ->capture_default_str();

  CLI::App* latency = app.add_subcommand(
      "latency-sweep",
      "Event-simulation ensembles across communication-latency scales");
  std::string latency_dir = "latency-sweep-out";
  add_population_options(latency, spec);
  add_strategy_options(latency, spec);
  add_ensemble_options(latency, spec);
  add_sim_options(latency, spec);
  latency->add_option("--scales", spec.comm_scales,
                      "Communication scale multipliers")
      ->delimiter(',')
      ->capture_default_str();
  latency->add_option("--out", latency_dir, "Output directory")
      ->capture_default_str();

  CLI::App* twins = app.add_subcommand(
      "twins", "Twin-population experiment with a slowed upper half");
  std::string twins_dir = "twins-out";
  add_population_options(twins, spec);
  add_strategy_options(twins, spec);
  add_ensemble_options(twins, spec);
  add_sim_options(twins, spec);
  twins->add_option("--laziness", spec.laziness_factor,
                    "Delay multiplier of the lazy half")
      ->capture_default_str();
  twins->add_option("--pair", spec.observed_pair,
                    "Industrious id of the pair traced over time")
      ->capture_default_str();
  twins->add_option("--out", twins_dir, "Output directory")
      ->capture_default_str();

  CLI::App* run = app.add_subcommand(
      "run", "One fully traced run of a selected driver");
  std::string run_dir = "run-out";
  add_population_options(run, spec);
  add_strategy_options(run, spec);
  add_sim_options(run, spec);
  run->add_option("--driver", spec.driver, "Driver to run")
      ->transform(CLI::CheckedTransformer(driver_names, CLI::ignore_case))
      ->capture_default_str();
  run->add_option("--out", run_dir, "Output directory")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_population(spec, gen_output);
    if (sweep->parsed()) return cmd_reserve_sweep(spec, sweep_dir);
    if (latency->parsed()) return cmd_latency_sweep(spec, latency_dir);
    if (twins->parsed()) return cmd_twins(spec, twins_dir);
    if (run->parsed()) return cmd_run(spec, run_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
