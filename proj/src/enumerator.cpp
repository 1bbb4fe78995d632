#include "bellmem/enumerator.hpp"

#include "bellmem/errors.hpp"
#include "bellmem/statistics.hpp"
#include "parallel.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace bellmem {

PlayoutStreams::PlayoutStreams(std::uint64_t seed)
    : shared(derive_seed(seed, 0)), alice(derive_seed(seed, 1)), bob(derive_seed(seed, 2)) {}

Transcript playout(SequentialStrategy& strategy, std::span<const SettingPair> settings, PlayoutStreams* streams) {
  std::optional<PlayoutStreams> unused;
  if (streams == nullptr) {
    if (!strategy.is_deterministic()) {
      throw InputError("strategy '" + std::string(strategy.name()) + "' is randomized; supply a randomness source");
    }
    streams = &unused.emplace(0);
  }
  const MemoryClass cls = strategy.memory_class();
  Transcript transcript;
  transcript.reserve(settings.size());
  for (SettingPair pair : settings) {
    strategy.prepare_round(streams->shared);
    const std::size_t past = transcript.size();
    const Outcome a = strategy.respond_alice(pair.alice, MemoryView(transcript, cls, Side::Alice, past), streams->alice);
    const Outcome b = strategy.respond_bob(pair.bob, MemoryView(transcript, cls, Side::Bob, past), streams->bob);
    transcript.append(pair, a, b);
  }
  return transcript;
}

Transcript playout_collective(const CollectiveStrategy& strategy, std::span<const SettingPair> settings,
                              PlayoutStreams& streams) {
  std::vector<AliceSetting> alice;
  std::vector<BobSetting> bob;
  alice.reserve(settings.size());
  bob.reserve(settings.size());
  for (SettingPair p : settings) {
    alice.push_back(p.alice);
    bob.push_back(p.bob);
  }
  const std::vector<Outcome> a = strategy.respond_alice(alice, streams.alice);
  const std::vector<Outcome> b = strategy.respond_bob(bob, streams.bob);
  if (a.size() != settings.size() || b.size() != settings.size()) {
    throw InvariantViolation("collective strategy '" + std::string(strategy.name()) +
                             "' returned the wrong number of outcomes");
  }
  Transcript transcript;
  transcript.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) transcript.append(settings[i], a[i], b[i]);
  return transcript;
}

Transcript playout_model(const Model& model, std::span<const SettingPair> settings, PlayoutStreams& streams) {
  if (const auto* factory = std::get_if<SequentialFactory>(&model.impl)) {
    auto strategy = (*factory)();
    return playout(*strategy, settings, &streams);
  }
  if (const auto* collective = std::get_if<std::shared_ptr<const CollectiveStrategy>>(&model.impl)) {
    return playout_collective(**collective, settings, streams);
  }
  const auto& sampler = std::get<QuantumSampler>(model.impl);
  Transcript transcript;
  transcript.reserve(settings.size());
  for (SettingPair pair : settings) {
    const auto [a, b] = sampler.sample(pair, streams.shared);
    transcript.append(pair, a, b);
  }
  return transcript;
}

std::vector<SettingPair> decode_sequence(std::uint64_t index, std::size_t n) {
  std::vector<SettingPair> out(n);
  for (std::size_t k = n; k-- > 0;) {
    out[k] = SettingPair::from_index(index % 4);
    index /= 4;
  }
  return out;
}

namespace {

std::uint64_t sequence_count(std::size_t n, const EnumerationOptions& options) {
  if (n == 0) throw InputError("enumeration needs n >= 1");
  if (n > options.cap) {
    throw ResourceError("n=" + std::to_string(n) + " exceeds the enumeration cap of " + std::to_string(options.cap) +
                        " (4^n playouts); use Monte Carlo instead");
  }
  if (n > 31) throw ResourceError("n=" + std::to_string(n) + " is too large to enumerate");
  return std::uint64_t{1} << (2 * n);
}

// Pair totals and correlated counts determine every statistic of a batch.
using CountKey = std::array<std::uint64_t, 8>;

CountKey key_of(const CountTable& counts) {
  CountKey key{};
  for (std::size_t i = 0; i < 4; ++i) {
    key[2 * i] = counts[i].total;
    key[2 * i + 1] = counts[i].correlated;
  }
  return key;
}

CountTable table_of(const CountKey& key) {
  CountTable counts{};
  for (std::size_t i = 0; i < 4; ++i) {
    counts[i].total = key[2 * i];
    counts[i].correlated = key[2 * i + 1];
    counts[i].anticorrelated = key[2 * i] - key[2 * i + 1];
  }
  return counts;
}

}  // namespace

ExactResult exact_expectations(const SequentialFactory& factory, std::size_t n, const EnumerationOptions& options) {
  const std::uint64_t total = sequence_count(n, options);
  if (!factory()->is_deterministic()) {
    throw InputError("exact enumeration needs a deterministic strategy; use Monte Carlo for randomized ones");
  }

  const unsigned workers = detail::resolve_workers(options.workers, total);
  std::vector<std::map<CountKey, std::uint64_t>> partial(workers);
  detail::run_chunks(total, workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    auto& tally = partial[w];
    for (std::uint64_t i = begin; i < end; ++i) {
      const auto settings = decode_sequence(i, n);
      auto strategy = factory();
      const Transcript t = playout(*strategy, settings);
      ++tally[key_of(t.counts())];
    }
  });
  std::map<CountKey, std::uint64_t> merged;
  for (const auto& part : partial) {
    for (const auto& [key, count] : part) merged[key] += count;
  }

  std::map<std::pair<Rational, std::optional<Rational>>, std::uint64_t> distribution;
  Rational sum_y = 0;
  Rational sum_x = 0;
  std::uint64_t defined = 0;
  for (const auto& [key, count] : merged) {
    const CountTable counts = table_of(key);
    Rational y = y_from_counts(counts, n);
    std::optional<Rational> x = x_from_counts(counts);
    sum_y += y * count;
    if (x) {
      sum_x += *x * count;
      defined += count;
    }
    distribution[{std::move(y), std::move(x)}] += count;
  }

  ExactResult result;
  result.n = n;
  result.sequences = total;
  result.e_y = sum_y / total;
  if (defined > 0) result.e_x_conditional = sum_x / defined;
  result.p_undefined = Rational(total - defined, total);
  for (const auto& [value, count] : distribution) {
    result.distribution.push_back({value.first, value.second, Rational(count, total)});
  }
  return result;
}

CollectiveExact exact_collective(const CollectiveStrategy& strategy, std::size_t n, const EnumerationOptions& options) {
  const std::uint64_t total = sequence_count(n, options);
  if (auto required = strategy.required_rounds(); required && *required != n) {
    throw InputError("collective strategy '" + std::string(strategy.name()) + "' is defined only for n=" +
                     std::to_string(*required));
  }
  CollectiveExact result;
  result.n = n;
  result.sequences = total;
  result.favorable.assign(std::size_t{1} << n, 0);
  PlayoutStreams streams(0);
  for (std::uint64_t i = 0; i < total; ++i) {
    const auto settings = decode_sequence(i, n);
    const Transcript t = playout_collective(strategy, settings, streams);
    std::size_t event = 0;
    for (const Round& r : t.rounds()) event = (event << 1) | static_cast<std::size_t>(round_score(r));
    ++result.favorable[event];
  }
  return result;
}

CollectiveExact exact_collective_n2(const CollectiveStrategy& strategy) { return exact_collective(strategy, 2); }

Rational independent_rounds_ceiling() { return Rational(3, 4) * Rational(3, 4); }

ChshMaximum chsh_exhaustive_max() {
  ChshMaximum result{-1, 5, {}};
  for (const auto& x : DeterministicAssignment::all()) {
    const int v = chsh_value(x);
    if (v > result.max) {
      result.max = v;
      result.argmax.clear();
    }
    if (v == result.max) result.argmax.push_back(x);
    result.min = std::min(result.min, v);
  }
  return result;
}

Model101Exact model101_exact() {
  Model101Exact result;

  BigInt factorial_100 = 1;
  for (int i = 2; i <= 100; ++i) factorial_100 *= i;
  BigInt factorial_33 = 1;
  for (int i = 2; i <= 33; ++i) factorial_33 *= i;
  result.multinomial = factorial_100 / (factorial_33 * factorial_33 * factorial_33);
  BigInt four_pow_100 = BigInt(1) << 200;
  result.p_trigger = Rational(result.multinomial, four_pow_100);
  result.log10_p_trigger = std::log10(to_double(result.p_trigger));
  result.log10_p_trigger_lgamma =
      (std::lgamma(101.0) - 3.0 * std::lgamma(34.0) - std::lgamma(2.0) - 100.0 * std::log(4.0)) / std::log(10.0);

  std::vector<SettingPair> settings;
  for (std::size_t i = 0; i < 4; ++i) {
    settings.insert(settings.end(), kModel101Trigger[i], SettingPair::from_index(i));
  }
  settings.push_back({});
  Rational baseline_sum = 0;
  Rational model_sum = 0;
  for (SettingPair last : kAllPairs) {
    settings.back() = last;
    auto model = model_101();
    auto baseline = constant_plus();
    const auto x_model = x_statistic(playout(*model, settings));
    const auto x_baseline = x_statistic(playout(*baseline, settings));
    if (!x_model || !x_baseline) throw InvariantViolation("X_101 undefined on the trigger history");
    result.branch_values[last.index()] = *x_model;
    model_sum += *x_model;
    baseline_sum += *x_baseline;
  }
  result.e_conditional = model_sum / 4;
  result.e_x_excess = result.p_trigger * (result.e_conditional - baseline_sum / 4);
  return result;
}

std::string SignalingCounterexample::describe() const {
  std::ostringstream out;
  out << "toggling " << to_string(toggled_side) << "'s setting in round " << toggled_round << " changed "
      << to_string(affected_side) << "'s outcome in round " << affected_round << "; settings:";
  for (SettingPair p : settings) out << ' ' << to_string(p);
  if (seed != 0) out << " (seed " << seed << ")";
  return out.str();
}

namespace {

SettingPair toggle(SettingPair p, Side side) {
  if (side == Side::Alice) return {toggled(p.alice), p.bob};
  return {p.alice, toggled(p.bob)};
}

Outcome outcome_of(const Round& r, Side side) { return side == Side::Alice ? r.a : r.b; }

// Finds the first round at which `side` differs, restricted to [0, limit).
std::optional<std::size_t> first_difference(const Transcript& lhs, const Transcript& rhs, Side side,
                                            std::size_t limit) {
  for (std::size_t i = 0; i < limit; ++i) {
    if (outcome_of(lhs[i], side) != outcome_of(rhs[i], side)) return i;
  }
  return std::nullopt;
}

NoSignalingResult merge(std::vector<NoSignalingResult>& parts) {
  NoSignalingResult out;
  for (auto& p : parts) {
    out.comparisons += p.comparisons;
    if (!p.pass && out.pass) {
      out.pass = false;
      out.counterexample = std::move(p.counterexample);
    }
  }
  return out;
}

// The round-k check: earlier rounds (both sides) and the untoggled side's
// round-k outcome must not move.
NoSignalingResult check_sequential(const PlayoutFn& play, std::size_t n, const EnumerationOptions& options,
                                   bool whole_batch) {
  const std::uint64_t total = sequence_count(n, options);
  const unsigned workers = detail::resolve_workers(options.workers, total);
  std::vector<NoSignalingResult> parts(workers);
  detail::run_chunks(total, workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    NoSignalingResult& part = parts[w];
    for (std::uint64_t i = begin; i < end && part.pass; ++i) {
      const auto settings = decode_sequence(i, n);
      const Transcript base = play(settings);
      for (std::size_t k = 0; k < n && part.pass; ++k) {
        for (Side side : {Side::Alice, Side::Bob}) {
          auto toggled_settings = settings;
          toggled_settings[k] = toggle(settings[k], side);
          const Transcript moved = play(toggled_settings);
          ++part.comparisons;
          const Side watched = other(side);
          std::optional<std::size_t> diff;
          Side affected = watched;
          if (whole_batch) {
            diff = first_difference(base, moved, watched, n);
          } else {
            diff = first_difference(base, moved, watched, k + 1);
            if (!diff) {
              diff = first_difference(base, moved, side, k);
              affected = side;
            }
          }
          if (diff) {
            part.pass = false;
            part.counterexample = SignalingCounterexample{settings, k + 1, side, *diff + 1, affected, 0};
            break;
          }
        }
      }
    }
  });
  return merge(parts);
}

}  // namespace

NoSignalingResult no_signaling_check(const PlayoutFn& play, std::size_t n, const EnumerationOptions& options) {
  return check_sequential(play, n, options, false);
}

NoSignalingResult no_signaling_check(const SequentialFactory& factory, std::size_t n,
                                     const EnumerationOptions& options, std::uint64_t seeds) {
  if (factory()->is_deterministic()) {
    return no_signaling_check(
        PlayoutFn([&factory](std::span<const SettingPair> s) {
          auto strategy = factory();
          return playout(*strategy, s);
        }),
        n, options);
  }
  NoSignalingResult total;
  for (std::uint64_t seed = 1; seed <= seeds && total.pass; ++seed) {
    NoSignalingResult r = no_signaling_check(
        PlayoutFn([&factory, seed](std::span<const SettingPair> s) {
          auto strategy = factory();
          PlayoutStreams streams(seed);
          return playout(*strategy, s, &streams);
        }),
        n, options);
    total.comparisons += r.comparisons;
    if (!r.pass) {
      total.pass = false;
      total.counterexample = r.counterexample;
      total.counterexample->seed = seed;
    }
  }
  return total;
}

NoSignalingResult no_signaling_check(const CollectiveStrategy& strategy, std::size_t n,
                                     const EnumerationOptions& options) {
  if (auto required = strategy.required_rounds(); required && *required != n) {
    throw InputError("collective strategy '" + std::string(strategy.name()) + "' is defined only for n=" +
                     std::to_string(*required));
  }
  return check_sequential(
      [&strategy](std::span<const SettingPair> s) {
        PlayoutStreams streams(1);
        return playout_collective(strategy, s, streams);
      },
      n, options, true);
}

NoSignalingResult no_signaling_check(const QuantumSampler&) {
  NoSignalingResult result;
  auto marginal = [](SettingPair pair, Side side) {
    Sqrt2Number p;
    for (Outcome other_outcome : {Outcome::Plus, Outcome::Minus}) {
      p = p + (side == Side::Alice ? QuantumSampler::joint_probability(pair, Outcome::Plus, other_outcome)
                                   : QuantumSampler::joint_probability(pair, other_outcome, Outcome::Plus));
    }
    return p;
  };
  for (SettingPair pair : kAllPairs) {
    for (Side side : {Side::Alice, Side::Bob}) {
      ++result.comparisons;
      if (!(marginal(pair, side) == marginal(toggle(pair, other(side)), side))) {
        result.pass = false;
        result.counterexample = SignalingCounterexample{{pair}, 1, other(side), 1, side, 0};
        return result;
      }
    }
  }
  return result;
}

NoSignalingResult no_signaling_check(const Model& model, std::size_t n, const EnumerationOptions& options) {
  if (model.is_quantum()) return no_signaling_check(std::get<QuantumSampler>(model.impl));
  if (model.is_collective()) return no_signaling_check(model.collective(), n, options);
  return no_signaling_check(model.sequential(), n, options);
}

}  // namespace bellmem
