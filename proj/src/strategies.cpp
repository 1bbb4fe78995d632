#include "bellmem/strategies.hpp"

#include "bellmem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace bellmem {

std::array<DeterministicAssignment, 16> DeterministicAssignment::all() {
  std::array<DeterministicAssignment, 16> out{};
  for (std::size_t i = 0; i < 16; ++i) {
    auto bit = [i](unsigned k) { return ((i >> k) & 1U) != 0 ? Outcome::Minus : Outcome::Plus; };
    out[i] = {bit(3), bit(2), bit(1), bit(0)};
  }
  return out;
}

std::string to_string(const DeterministicAssignment& x) {
  return "(" + std::string(to_string(x.a1)) + "," + std::string(to_string(x.a2)) + "," +
         std::string(to_string(x.b1)) + "," + std::string(to_string(x.b2)) + ")";
}

StochasticLHV::StochasticLHV(std::vector<Component> support) : support_(std::move(support)) {
  if (support_.empty()) throw InputError("stochastic LHV needs at least one component");
  Rational total = 0;
  for (const Component& c : support_) {
    if (c.weight < 0) throw InputError("stochastic LHV weight " + to_string(c.weight) + " is negative");
    total += c.weight;
  }
  if (total != 1) throw InputError("stochastic LHV weights sum to " + to_string(total) + ", not 1");
  double running = 0.0;
  cumulative_.reserve(support_.size());
  for (const Component& c : support_) {
    running += to_double(c.weight);
    cumulative_.push_back(running);
  }
}

StochasticLHV StochasticLHV::point_mass(DeterministicAssignment assignment) {
  return StochasticLHV({{Rational(1), assignment}});
}

StochasticLHV StochasticLHV::uniform() {
  std::vector<Component> support;
  for (const auto& x : DeterministicAssignment::all()) support.push_back({Rational(1, 16), x});
  return StochasticLHV(std::move(support));
}

const DeterministicAssignment& StochasticLHV::sample(RandomSource& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i >= support_.size()) i = support_.size() - 1;
  // Rounding can leave a zero-weight component selectable; skip past it.
  while (support_[i].weight == 0 && i > 0) --i;
  return support_[i].assignment;
}

StochasticLHV read_stochastic_lhv_csv(std::istream& in) {
  std::vector<StochasticLHV::Component> support;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (line_no == 1 && !fields.empty() && fields[0] == "weight") continue;
    if (fields.size() != 5) {
      throw InputError("weights file line " + std::to_string(line_no) + ": expected weight,a1,a2,b1,b2");
    }
    support.push_back({parse_rational(fields[0]),
                       {parse_outcome(fields[1]), parse_outcome(fields[2]), parse_outcome(fields[3]),
                        parse_outcome(fields[4])}});
  }
  return StochasticLHV(std::move(support));
}

namespace {

class FixedAssignmentStrategy final : public SequentialStrategy {
 public:
  FixedAssignmentStrategy(std::string name, DeterministicAssignment assignment)
      : name_(std::move(name)), assignment_(assignment) {}

  std::string_view name() const override { return name_; }
  MemoryClass memory_class() const override { return MemoryClass::None; }
  bool is_deterministic() const override { return true; }
  Outcome respond_alice(AliceSetting s, const MemoryView&, RandomSource&) override { return assignment_.alice(s); }
  Outcome respond_bob(BobSetting s, const MemoryView&, RandomSource&) override { return assignment_.bob(s); }

 private:
  std::string name_;
  DeterministicAssignment assignment_;
};

class StochasticStrategy final : public SequentialStrategy {
 public:
  explicit StochasticStrategy(StochasticLHV lhv) : lhv_(std::move(lhv)) {}

  std::string_view name() const override { return "stochastic-lhv"; }
  MemoryClass memory_class() const override { return MemoryClass::None; }
  bool is_deterministic() const override { return false; }
  void prepare_round(RandomSource& rng) override { current_ = lhv_.sample(rng); }
  Outcome respond_alice(AliceSetting s, const MemoryView&, RandomSource&) override { return current_.alice(s); }
  Outcome respond_bob(BobSetting s, const MemoryView&, RandomSource&) override { return current_.bob(s); }

 private:
  StochasticLHV lhv_;
  DeterministicAssignment current_;
};

class GuessingStrategy final : public SequentialStrategy {
 public:
  explicit GuessingStrategy(TieBreakRule tie_break) : tie_break_(std::move(tie_break)) {}

  std::string_view name() const override { return "guessing"; }
  MemoryClass memory_class() const override { return MemoryClass::Full; }
  bool is_deterministic() const override { return true; }
  Outcome respond_alice(AliceSetting s, const MemoryView& view, RandomSource&) override {
    return plan(view).alice(s);
  }
  Outcome respond_bob(BobSetting s, const MemoryView& view, RandomSource&) override { return plan(view).bob(s); }

 private:
  // Both sides see the same two-sided history, so they derive the same plan.
  DeterministicAssignment plan(const MemoryView& view) {
    if (view.size() == 0) return DeterministicAssignment{};
    if (cached_for_ == view.size()) return cached_;
    const CountTable counts = view.pair_counts();
    std::uint64_t best = 0;
    for (const PairTally& t : counts) best = std::max(best, t.total);
    std::vector<SettingPair> tied;
    for (SettingPair p : kAllPairs) {
      if (counts[p.index()].total == best) tied.push_back(p);
    }
    cached_ = solve_sabotage_assignment(tie_break_(tied));
    cached_for_ = view.size();
    return cached_;
  }

  TieBreakRule tie_break_;
  std::size_t cached_for_ = 0;
  DeterministicAssignment cached_;
};

class Model101Strategy final : public SequentialStrategy {
 public:
  std::string_view name() const override { return "model101"; }
  MemoryClass memory_class() const override { return MemoryClass::Full; }
  bool is_deterministic() const override { return true; }
  Outcome respond_alice(AliceSetting, const MemoryView&, RandomSource&) override { return Outcome::Plus; }
  Outcome respond_bob(BobSetting s, const MemoryView& view, RandomSource&) override {
    if (s == BobSetting::B2 && armed(view)) return Outcome::Minus;
    return Outcome::Plus;
  }

 private:
  static bool armed(const MemoryView& view) {
    if (view.size() != 100) return false;
    const CountTable counts = view.pair_counts();
    for (std::size_t i = 0; i < 4; ++i) {
      if (counts[i].total != kModel101Trigger[i]) return false;
    }
    return true;
  }
};

class CollectiveN2 final : public CollectiveStrategy {
 public:
  std::string_view name() const override { return "collective-n2"; }
  std::optional<std::size_t> required_rounds() const override { return 2; }

  std::vector<Outcome> respond_alice(std::span<const AliceSetting> s, RandomSource&) const override {
    check(s.size());
    if (s[0] == AliceSetting::A1 && s[1] == AliceSetting::A2) return {outcome_from_bit(1), outcome_from_bit(0)};
    return {outcome_from_bit(1), outcome_from_bit(1)};
  }
  std::vector<Outcome> respond_bob(std::span<const BobSetting> s, RandomSource&) const override {
    check(s.size());
    if (s[0] == BobSetting::B2 && s[1] == BobSetting::B1) return {outcome_from_bit(0), outcome_from_bit(1)};
    return {outcome_from_bit(1), outcome_from_bit(1)};
  }

 private:
  static void check(std::size_t n) {
    if (n != 2) throw InputError("collective-n2 is defined for exactly 2 rounds, got " + std::to_string(n));
  }
};

class ConstantCollective final : public CollectiveStrategy {
 public:
  std::string_view name() const override { return "constant-collective"; }
  std::vector<Outcome> respond_alice(std::span<const AliceSetting> s, RandomSource&) const override {
    return std::vector<Outcome>(s.size(), Outcome::Plus);
  }
  std::vector<Outcome> respond_bob(std::span<const BobSetting> s, RandomSource&) const override {
    return std::vector<Outcome>(s.size(), Outcome::Plus);
  }
};

}  // namespace

std::unique_ptr<SequentialStrategy> constant_plus() {
  return std::make_unique<FixedAssignmentStrategy>("constant-plus", DeterministicAssignment{});
}

std::unique_ptr<SequentialStrategy> fixed_assignment(DeterministicAssignment assignment) {
  return std::make_unique<FixedAssignmentStrategy>("fixed-" + to_string(assignment), assignment);
}

std::unique_ptr<SequentialStrategy> from_stochastic(StochasticLHV lhv) {
  return std::make_unique<StochasticStrategy>(std::move(lhv));
}

DeterministicAssignment solve_sabotage_assignment(SettingPair target) {
  // Each term fixes a parity: b = a for a correlated term, b = -a for the
  // anticorrelated one. Flipping the target's parity leaves the product of
  // the four parities at +1, so the chain a1 -> b1, b2 -> a2 closes on (A2,B2).
  auto parity = [target](SettingPair p) {
    Outcome want = p.wants_anticorrelation() ? Outcome::Minus : Outcome::Plus;
    return p == target ? negate(want) : want;
  };
  DeterministicAssignment x;
  x.a1 = Outcome::Plus;
  x.b1 = x.a1 * parity({AliceSetting::A1, BobSetting::B1});
  x.b2 = x.a1 * parity({AliceSetting::A1, BobSetting::B2});
  x.a2 = x.b1 * parity({AliceSetting::A2, BobSetting::B1});
  return x;
}

SettingPair earliest_pair(std::span<const SettingPair> tied) {
  if (tied.empty()) throw InvariantViolation("tie-break called with no candidates");
  return *std::min_element(tied.begin(), tied.end());
}

std::unique_ptr<SequentialStrategy> guessing_model(TieBreakRule tie_break) {
  return std::make_unique<GuessingStrategy>(std::move(tie_break));
}

std::unique_ptr<SequentialStrategy> model_101() { return std::make_unique<Model101Strategy>(); }

std::shared_ptr<const CollectiveStrategy> collective_n2() { return std::make_shared<CollectiveN2>(); }

std::shared_ptr<const CollectiveStrategy> constant_collective() { return std::make_shared<ConstantCollective>(); }

Sqrt2Number QuantumSampler::term_probability() { return {Rational(1, 2), Rational(1, 4)}; }

Sqrt2Number QuantumSampler::joint_probability(SettingPair pair, Outcome a, Outcome b) {
  const Sqrt2Number half{Rational(1, 2), 0};
  const Sqrt2Number p = term_probability();
  const bool same = a == b;
  const bool scores = pair.wants_anticorrelation() ? !same : same;
  return half * (scores ? p : Sqrt2Number{1, 0} - p);
}

Sqrt2Number QuantumSampler::chsh_value() {
  Sqrt2Number total;
  for (SettingPair pair : kAllPairs) {
    for (Outcome a : {Outcome::Plus, Outcome::Minus}) {
      for (Outcome b : {Outcome::Plus, Outcome::Minus}) {
        const bool same = a == b;
        if (pair.wants_anticorrelation() ? !same : same) total = total + joint_probability(pair, a, b);
      }
    }
  }
  return total;
}

std::pair<Outcome, Outcome> QuantumSampler::sample(SettingPair pair, RandomSource& rng) const {
  static const double p = (2.0 + std::sqrt(2.0)) / 4.0;
  const Outcome a = rng.coin() ? Outcome::Plus : Outcome::Minus;
  const bool scores = rng.bernoulli(p);
  const bool same = pair.wants_anticorrelation() ? !scores : scores;
  return {a, same ? a : negate(a)};
}

QuantumSampler quantum_singlet_sampler() { return {}; }

const SequentialFactory& Model::sequential() const {
  if (const auto* f = std::get_if<SequentialFactory>(&impl)) return *f;
  throw InputError("model '" + name + "' is not a sequential strategy");
}

const CollectiveStrategy& Model::collective() const {
  if (const auto* c = std::get_if<std::shared_ptr<const CollectiveStrategy>>(&impl)) return **c;
  throw InputError("model '" + name + "' is not a collective strategy");
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"constant-plus", "stochastic-lhv", "guessing",
                                              "model101",      "collective-n2",  "quantum"};
  return names;
}

Model make_model(std::string_view name, const std::optional<StochasticLHV>& weights) {
  if (name == "constant-plus") return {std::string(name), SequentialFactory([] { return constant_plus(); })};
  if (name == "guessing") return {std::string(name), SequentialFactory([] { return guessing_model(); })};
  if (name == "model101") return {std::string(name), SequentialFactory([] { return model_101(); })};
  if (name == "collective-n2") return {std::string(name), collective_n2()};
  if (name == "quantum") return {std::string(name), quantum_singlet_sampler()};
  if (name == "stochastic-lhv") {
    if (!weights) throw InputError("strategy stochastic-lhv requires a weights file (--strategy-file)");
    return {std::string(name), SequentialFactory([lhv = *weights] { return from_stochastic(lhv); })};
  }
  std::string valid;
  for (const auto& n : model_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InputError("unknown strategy '" + std::string(name) + "'; valid strategies: " + valid);
}

}  // namespace bellmem
