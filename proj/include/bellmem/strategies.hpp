#pragma once

// Response models for the sequential CHSH game: memoryless local hidden
// variable (LHV) models, LHV models with two-sided memory, collective models
// that answer a whole batch at once, and a (non-LHV) singlet sampler.

#include "bellmem/core.hpp"
#include "bellmem/random.hpp"
#include "bellmem/rational.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace bellmem {

/// A point hidden variable: the outcome each setting would produce this round.
struct DeterministicAssignment {
  Outcome a1 = Outcome::Plus;
  Outcome a2 = Outcome::Plus;
  Outcome b1 = Outcome::Plus;
  Outcome b2 = Outcome::Plus;

  constexpr Outcome alice(AliceSetting s) const { return s == AliceSetting::A1 ? a1 : a2; }
  constexpr Outcome bob(BobSetting s) const { return s == BobSetting::B1 ? b1 : b2; }
  /// Whether this assignment satisfies the CHSH term for `pair`.
  constexpr bool scores(SettingPair pair) const {
    const bool same = alice(pair.alice) == bob(pair.bob);
    return pair.wants_anticorrelation() ? !same : same;
  }

  /// All 16 assignments, a1 varying slowest, +1 before -1.
  static std::array<DeterministicAssignment, 16> all();

  friend constexpr bool operator==(const DeterministicAssignment&, const DeterministicAssignment&) = default;
};

std::string to_string(const DeterministicAssignment& assignment);

/// Finite mixture of deterministic assignments with exact weights.
class StochasticLHV {
 public:
  struct Component {
    Rational weight;
    DeterministicAssignment assignment;
  };

  /// Throws InputError if a weight is negative, the support is empty, or the
  /// weights do not sum to exactly 1.
  explicit StochasticLHV(std::vector<Component> support);

  static StochasticLHV point_mass(DeterministicAssignment assignment);
  static StochasticLHV uniform();

  const std::vector<Component>& support() const { return support_; }

  /// Draws one assignment by inverse CDF on a 53-bit uniform.
  const DeterministicAssignment& sample(RandomSource& rng) const;

 private:
  std::vector<Component> support_;
  std::vector<double> cumulative_;
};

/// Weights file: CSV `weight,a1,a2,b1,b2`, optional header line, weights as
/// p/q or decimals.
StochasticLHV read_stochastic_lhv_csv(std::istream& in);

/// Sequential responder. The playout engine calls prepare_round() before the
/// round's settings exist, then each side's responder with only that side's
/// current setting and a memory view no wider than memory_class().
class SequentialStrategy {
 public:
  virtual ~SequentialStrategy() = default;

  virtual std::string_view name() const = 0;
  virtual MemoryClass memory_class() const = 0;
  /// True if no randomness is ever consumed.
  virtual bool is_deterministic() const = 0;

  /// Shared per-round hidden variable draw.
  virtual void prepare_round(RandomSource& /*rng*/) {}
  virtual Outcome respond_alice(AliceSetting setting, const MemoryView& view, RandomSource& rng) = 0;
  virtual Outcome respond_bob(BobSetting setting, const MemoryView& view, RandomSource& rng) = 0;
};

using SequentialFactory = std::function<std::unique_ptr<SequentialStrategy>()>;

/// A model where each side answers all N of its settings jointly.
class CollectiveStrategy {
 public:
  virtual ~CollectiveStrategy() = default;

  virtual std::string_view name() const = 0;
  /// The single batch length this model accepts, if restricted.
  virtual std::optional<std::size_t> required_rounds() const { return std::nullopt; }
  virtual std::vector<Outcome> respond_alice(std::span<const AliceSetting> settings, RandomSource& rng) const = 0;
  virtual std::vector<Outcome> respond_bob(std::span<const BobSetting> settings, RandomSource& rng) const = 0;
};

/// Memoryless model that answers +1 to every measurement.
std::unique_ptr<SequentialStrategy> constant_plus();

/// Memoryless model that plays the same assignment every round.
std::unique_ptr<SequentialStrategy> fixed_assignment(DeterministicAssignment assignment);

/// Memoryless model drawing a fresh assignment from `lhv` each round.
std::unique_ptr<SequentialStrategy> from_stochastic(StochasticLHV lhv);

/// The assignment that satisfies every CHSH term except the one for `target`,
/// normalised to a1 = +1.
DeterministicAssignment solve_sabotage_assignment(SettingPair target);

/// Chooses among pairs tied for the largest count; receives them in canonical order.
using TieBreakRule = std::function<SettingPair(std::span<const SettingPair> tied)>;

SettingPair earliest_pair(std::span<const SettingPair> tied);

/// Two-sided memory model: +1 everywhere in round 1, afterwards sabotages
/// the most-measured pair so far and satisfies the other three.
std::unique_ptr<SequentialStrategy> guessing_model(TieBreakRule tie_break = earliest_pair);

/// Two-sided memory model for 101 rounds: constant +1, except that after the
/// counts (33,33,33,1) it answers b = -1 on B2 in round 101.
std::unique_ptr<SequentialStrategy> model_101();

/// Counts that arm model_101 on its final round, canonical pair order.
inline constexpr std::array<std::uint64_t, 4> kModel101Trigger{33, 33, 33, 1};

/// Collective model for N = 2: Alice answers (+1,-1) to (A1,A2), Bob answers
/// (-1,+1) to (B2,B1), all other inputs get (+1,+1).
std::shared_ptr<const CollectiveStrategy> collective_n2();

/// Collective model answering +1 everywhere, for any N.
std::shared_ptr<const CollectiveStrategy> constant_collective();

/// Correlated-coin stand-in for the ideal singlet statistics. Not local: Bob's
/// outcome is drawn knowing Alice's outcome and both settings.
class QuantumSampler {
 public:
  /// (2 + sqrt 2) / 4.
  static Sqrt2Number term_probability();
  /// Exact P(a, b | pair).
  static Sqrt2Number joint_probability(SettingPair pair, Outcome a, Outcome b);
  /// Sum of the four CHSH term probabilities; equals 2 + sqrt 2.
  static Sqrt2Number chsh_value();

  std::pair<Outcome, Outcome> sample(SettingPair pair, RandomSource& rng) const;
};

QuantumSampler quantum_singlet_sampler();

/// A named catalogue entry, ready to instantiate per playout.
struct Model {
  std::string name;
  std::variant<SequentialFactory, std::shared_ptr<const CollectiveStrategy>, QuantumSampler> impl;

  bool is_sequential() const { return std::holds_alternative<SequentialFactory>(impl); }
  bool is_collective() const { return std::holds_alternative<std::shared_ptr<const CollectiveStrategy>>(impl); }
  bool is_quantum() const { return std::holds_alternative<QuantumSampler>(impl); }
  bool is_lhv() const { return !is_quantum(); }
  /// Sequential models only; throws InputError otherwise.
  const SequentialFactory& sequential() const;
  const CollectiveStrategy& collective() const;
};

/// CLI names: constant-plus, stochastic-lhv, guessing, model101, collective-n2, quantum.
const std::vector<std::string>& model_names();

/// Throws InputError for unknown names (listing the valid ones) and when
/// stochastic-lhv is requested without weights.
Model make_model(std::string_view name, const std::optional<StochasticLHV>& weights = std::nullopt);

}  // namespace bellmem
