#pragma once

// Playout engine and exact oracles. Settings are uniform and independent per
// round, so every one of the 4^N setting sequences is equally likely and
// exhaustive enumeration gives exact expectations for deterministic models.

#include "bellmem/core.hpp"
#include "bellmem/random.hpp"
#include "bellmem/rational.hpp"
#include "bellmem/strategies.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bellmem {

/// Separate streams for the shared hidden variable and each side's local
/// randomness, so one side's consumption never shifts the other's draws.
struct PlayoutStreams {
  explicit PlayoutStreams(std::uint64_t seed);

  RandomSource shared;
  RandomSource alice;
  RandomSource bob;
};

/// Plays `settings` through a fresh sequential strategy. Each side sees only
/// its own current setting and a view of class strategy.memory_class().
/// Non-deterministic strategies need `streams`; throws InputError otherwise.
Transcript playout(SequentialStrategy& strategy, std::span<const SettingPair> settings,
                   PlayoutStreams* streams = nullptr);

/// Both sides answer their full setting lists at once.
Transcript playout_collective(const CollectiveStrategy& strategy, std::span<const SettingPair> settings,
                              PlayoutStreams& streams);

/// Any catalogue model; sequential models get a fresh instance.
Transcript playout_model(const Model& model, std::span<const SettingPair> settings, PlayoutStreams& streams);

/// Sequence number `index` in [0, 4^n), first round as the most significant base-4 digit.
std::vector<SettingPair> decode_sequence(std::uint64_t index, std::size_t n);

struct EnumerationOptions {
  std::size_t cap = 10;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct DistributionPoint {
  Rational y;
  std::optional<Rational> x;
  Rational probability;
};

struct ExactResult {
  std::size_t n = 0;
  std::uint64_t sequences = 0;
  Rational e_y;
  /// E(X_N | X_N defined); empty when X_N is never defined.
  std::optional<Rational> e_x_conditional;
  Rational p_undefined;
  /// Sorted by (y, x), undefined x first.
  std::vector<DistributionPoint> distribution;
};

/// Exhaustive expectation over all 4^n setting sequences. Throws
/// ResourceError above the cap and InputError for randomized strategies.
ExactResult exact_expectations(const SequentialFactory& factory, std::size_t n, const EnumerationOptions& options = {});

struct CollectiveExact {
  std::size_t n = 0;
  std::uint64_t sequences = 0;
  /// favorable[e]: number of the 4^n sequences whose score vector is e,
  /// round 1 score as the most significant bit.
  std::vector<std::uint64_t> favorable;

  Rational probability(std::size_t event) const { return Rational(favorable.at(event), sequences); }
  /// P(every round scores).
  Rational all_score() const { return probability(favorable.size() - 1); }
  std::uint64_t all_score_count() const { return favorable.back(); }
};

/// Exact score-vector distribution of a deterministic collective model.
CollectiveExact exact_collective(const CollectiveStrategy& strategy, std::size_t n, const EnumerationOptions& options = {});

/// The four (Y_2^1, Y_2^2) event probabilities, index = 2*y1 + y2.
CollectiveExact exact_collective_n2(const CollectiveStrategy& strategy);

/// (3/4)^2: ceiling on P(both rounds score) when each round scores with
/// probability at most 3/4 given the past.
Rational independent_rounds_ceiling();

struct ChshMaximum {
  int max = 0;
  int min = 0;
  std::vector<DeterministicAssignment> argmax;
};

ChshMaximum chsh_exhaustive_max();

struct Model101Exact {
  BigInt multinomial;
  Rational p_trigger;
  double log10_p_trigger = 0.0;
  double log10_p_trigger_lgamma = 0.0;
  /// X_101 for each round-101 pair after the trigger history, canonical order.
  std::array<Rational, 4> branch_values;
  Rational e_conditional;
  /// E(X_101) gain over the constant +1 model.
  Rational e_x_excess;
};

/// Plays model_101 and constant_plus through the trigger history and every
/// final pair, and computes the trigger probability exactly.
Model101Exact model101_exact();

struct SignalingCounterexample {
  std::vector<SettingPair> settings;
  /// 1-based round whose setting was toggled.
  std::size_t toggled_round = 0;
  Side toggled_side = Side::Bob;
  std::size_t affected_round = 0;
  Side affected_side = Side::Alice;
  std::uint64_t seed = 0;

  std::string describe() const;
};

struct NoSignalingResult {
  bool pass = true;
  std::uint64_t comparisons = 0;
  std::optional<SignalingCounterexample> counterexample;
};

using PlayoutFn = std::function<Transcript(std::span<const SettingPair>)>;

/// Black-box check over all 4^n sequences: toggling one side's setting in
/// round k must leave every earlier round and the other side's round-k
/// outcome unchanged.
NoSignalingResult no_signaling_check(const PlayoutFn& play, std::size_t n, const EnumerationOptions& options = {});

/// Deterministic strategies are checked once; randomized ones under common
/// random numbers for each of `seeds` seeds.
NoSignalingResult no_signaling_check(const SequentialFactory& factory, std::size_t n,
                                     const EnumerationOptions& options = {}, std::uint64_t seeds = 16);

/// Collective models: toggling any setting on one side must leave all of the
/// other side's outcomes unchanged.
NoSignalingResult no_signaling_check(const CollectiveStrategy& strategy, std::size_t n,
                                     const EnumerationOptions& options = {});

/// Exact marginal check of the singlet sampler's joint distribution.
NoSignalingResult no_signaling_check(const QuantumSampler& sampler);

NoSignalingResult no_signaling_check(const Model& model, std::size_t n, const EnumerationOptions& options = {});

}  // namespace bellmem
