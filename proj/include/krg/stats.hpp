#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace krg {

// Structural counters and per-stage wall times accumulated by the engine.
// Tests assert on the counters; the CLI copies everything into the manifest.
struct RunStats {
  std::int64_t gridding_passes = 0;   // spread+transform passes over the samples
  std::int64_t fmc_passes = 0;        // stochastic trace stages
  std::int64_t moment_builds = 0;     // kernel moment-grid constructions
  std::int64_t convolutions = 0;      // inverse transforms producing moment fields
  std::int64_t local_solves = 0;      // grid points solved (order >= 1)
  std::int64_t rank_fallbacks = 0;    // grid points that fell back to the ratio estimate
  std::int64_t masked_points = 0;     // grid points under the density floor
  std::map<std::string, double> stage_seconds;

  void add_time(const std::string& stage, double seconds) { stage_seconds[stage] += seconds; }

  void merge(const RunStats& other) {
    gridding_passes += other.gridding_passes;
    fmc_passes += other.fmc_passes;
    moment_builds += other.moment_builds;
    convolutions += other.convolutions;
    local_solves += other.local_solves;
    rank_fallbacks += other.rank_fallbacks;
    masked_points += other.masked_points;
    for (const auto& [stage, secs] : other.stage_seconds) stage_seconds[stage] += secs;
  }
};

}  // namespace krg
