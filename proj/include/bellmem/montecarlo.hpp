#pragma once

// Seeded simulation of R independent batches of N rounds with uniformly
// random settings, summarised as means, standard errors and tail
// frequencies for comparison with the analytic bounds.

#include "bellmem/core.hpp"
#include "bellmem/rational.hpp"
#include "bellmem/statistics.hpp"
#include "bellmem/strategies.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bellmem {

struct SimulationPlan {
  std::string strategy;
  std::optional<StochasticLHV> weights;
  std::size_t n = 1;
  std::size_t batches = 1;
  std::uint64_t master_seed = 0;
  /// Tail threshold; exact so that Y_N = 3 + delta is never miscounted.
  Rational delta{1, 10};
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Uniform independent settings for n rounds.
std::vector<SettingPair> draw_settings(std::size_t n, RandomSource& rng);

/// One batch: settings from one stream derived from `seed`, model randomness
/// from others. Same (model, n, seed) gives the same transcript.
Transcript run_batch(const Model& model, std::size_t n, std::uint64_t seed);

struct BatchRecord {
  std::size_t batch = 0;
  std::uint64_t seed = 0;
  BatchStatistics stats;
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
};

/// 95% Wilson score interval (z = 1.959963984540054).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

struct EstimateReport {
  std::string strategy;
  std::size_t n = 0;
  std::size_t batches = 0;
  std::uint64_t master_seed = 0;
  Rational delta;

  double mean_y = 0.0;
  double se_y = 0.0;
  /// Over batches with X_N defined; empty if there were none.
  std::optional<double> mean_x;
  std::optional<double> se_x;

  std::uint64_t tail_count_y = 0;  // Y_N > 3 + delta
  std::uint64_t tail_count_x = 0;  // X_N > (3 + delta) / (1 - delta), defined batches only
  double tail_freq_y = 0.0;
  double tail_freq_x = 0.0;
  WilsonInterval tail_ci_y;
  WilsonInterval tail_ci_x;
  std::uint64_t undefined_count = 0;
};

struct SimulationResult {
  EstimateReport report;
  std::vector<BatchRecord> batches;
};

std::uint64_t batch_seed(std::uint64_t master_seed, std::size_t batch);

/// Runs every batch of the plan. Throws InputError for an invalid plan.
SimulationResult simulate(const SimulationPlan& plan);

EstimateReport estimate(const SimulationPlan& plan);

/// Aggregates in batch-index order regardless of the order of `batches`.
EstimateReport summarize(std::span<const BatchRecord> batches, const SimulationPlan& plan);

struct TailComparison {
  double empirical_y = 0.0;
  double bound_y = 0.0;
  double ratio_y = 0.0;
  WilsonInterval ci_y;
  double empirical_x = 0.0;
  double bound_x = 0.0;
  double ratio_x = 0.0;
  WilsonInterval ci_x;
};

/// Empirical tails against f(N, delta) and 5 f(N, delta).
TailComparison tail_compare(const EstimateReport& report);
TailComparison tail_compare(const SimulationPlan& plan);

}  // namespace bellmem
