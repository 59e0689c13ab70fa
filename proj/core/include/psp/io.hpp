#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "psp/experiment.hpp"

namespace psp {

/// Reproducibility header embedded in every artifact: tool version, random
/// stream algorithm, master seed, and the canonical experiment description
/// with its hash.
struct ArtifactMeta {
  std::string tool;
  std::string rng;
  std::uint64_t master_seed = 0;
  std::string spec;
  std::string spec_hash;
};

/// Canonical key=value rendering of a spec for a given experiment kind.
/// Equal strings guarantee equal experiments.
std::string canonical_spec_string(const ExperimentSpec& spec,
                                  std::string_view kind);

/// 64-bit FNV-1a of the canonical string, as 16 hex digits.
std::string spec_hash(const ExperimentSpec& spec, std::string_view kind);

ArtifactMeta experiment_meta(const ExperimentSpec& spec,
                             std::string_view kind);

/// Plain-text population table: metadata comments, then one row per id.
/// Row 0 is the seller (supply, reserve price); buyer rows carry qbar and
/// pbar. Full double precision, whitespace separated.
void write_population(std::ostream& out, const Population& pop,
                      const ArtifactMeta& meta);
Population read_population(std::istream& in);
void write_population_file(const std::filesystem::path& path,
                           const Population& pop, const ArtifactMeta& meta);
Population read_population_file(const std::filesystem::path& path);

/// Plain-text bid profile: one row per id (quantity, price), seller first.
void write_profile(std::ostream& out, const BidProfile& profile,
                   const ArtifactMeta& meta);
BidProfile read_profile(std::istream& in);
void write_profile_file(const std::filesystem::path& path,
                        const BidProfile& profile, const ArtifactMeta& meta);
BidProfile read_profile_file(const std::filesystem::path& path);

/// Per-buyer outcome rows followed by one aggregate row labelled "total"
/// carrying the allocation, revenue, value and utility sums. Buyback and
/// mean price appear as metadata comments.
void write_outcome_csv(std::ostream& out, const MarketOutcome& outcome,
                       const ArtifactMeta& meta);

/// Reserve-sweep table: one column per reserve price; row pairs
/// (mean, stddev) for bid_price, total_value, total_utility and
/// total_revenue, then non_converged and realizations counts.
void write_reserve_sweep_csv(std::ostream& out,
                             std::span<const ReserveCell> cells,
                             const ArtifactMeta& meta);

/// Latency sweep, aggregate curves: one row per communication scale.
void write_latency_aggregate_csv(std::ostream& out,
                                 std::span<const ScalePoint> table,
                                 const ArtifactMeta& meta);

/// Latency sweep, per-buyer statistics: one row per (scale, buyer).
void write_latency_buyers_csv(std::ostream& out,
                              std::span<const ScalePoint> table,
                              const Population& pop,
                              const ArtifactMeta& meta);

/// Twin experiment: one row per pair with both utility statistics, their
/// mean difference and the pooled standard deviation.
void write_twin_pairs_csv(std::ostream& out, const TwinsResult& twins,
                          const ArtifactMeta& meta);

/// Utility-versus-time trace of the observed twin pair.
void write_twin_transient_csv(std::ostream& out, const TwinsResult& twins,
                              const ArtifactMeta& meta);

/// Line-delimited JSON traces. The first line is the metadata record.
void write_driver_trace(std::ostream& out,
                        std::span<const DriverStep> steps,
                        const ArtifactMeta& meta);
void write_sim_trace(std::ostream& out, std::span<const SimStep> steps,
                     const ArtifactMeta& meta);

/// JSON summaries, one per experiment.
void write_reserve_sweep_summary(std::ostream& out,
                                 const ReserveSweepResult& result,
                                 const ArtifactMeta& meta);
void write_latency_sweep_summary(std::ostream& out,
                                 const LatencySweepResult& result,
                                 const ArtifactMeta& meta);
void write_twins_summary(std::ostream& out,
                         const TwinsExperimentResult& result,
                         const ArtifactMeta& meta);
void write_single_run_summary(std::ostream& out,
                              const SingleRunResult& result,
                              const ArtifactMeta& meta);

/// Opens the file in binary mode and writes via `body`; throws on failure.
void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body);

}  // namespace psp
