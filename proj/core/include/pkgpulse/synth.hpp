#pragma once

#include <cstdint>

#include "pkgpulse/corpus.hpp"

namespace pkgpulse {

enum class SynthMode {
  /// Growing graph, developer churn, Poisson bugs coupled to neighbors.
  Coupled,
  /// Every package present in every release with one fixed size and a fixed
  /// bug count, so bugs(s,t) = bugs(s,t-1).
  Persistent,
};

struct SynthConfig {
  std::uint64_t seed = 0;
  int releases = 12;
  int packages = 200;    // alive by the last release
  int developers = 0;    // pool size; 0 picks packages / 2
  double coupling = 0.5;   // c: weight on the mean neighbor bug count at t-1
  double retention = 0.8;  // r: per-release probability a developer stays on a package
  int attach_edges = 2;    // m: dependees drawn per new package
  double initial_fraction = 0.6;
  double removal_probability = 0.02;
  double restore_probability = 0.5;
  double active_probability = 0.7;  // chance a package has changelog activity in a release
  double neighbor_hire = 0.5;       // chance a replacement comes from a neighbor's team
  double base_log_mean = -0.5;      // log-normal base bug rate
  double base_log_sd = 1.0;
  int persistent_max_bugs = 8;
  SynthMode mode = SynthMode::Coupled;
};

/// Deterministic in the config. Distributions are named r01, r02, ... with
/// indexes starting at 1 and releases 182 days apart; packages are
/// pkgNNNN and developers devNNNN@example.org. Throws std::invalid_argument
/// for fewer than 2 releases or 2 packages.
Dataset synthesize(const SynthConfig& config);

}  // namespace pkgpulse
