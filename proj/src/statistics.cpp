#include "bellmem/statistics.hpp"

#include "bellmem/errors.hpp"

namespace bellmem {

int round_score(const Round& round) {
  const bool same = round.a == round.b;
  return (round.pair.wants_anticorrelation() ? !same : same) ? 1 : 0;
}

std::uint64_t scoring_rounds(const CountTable& counts) {
  return counts[0].correlated + counts[1].correlated + counts[2].correlated + counts[3].anticorrelated;
}

Rational y_from_counts(const CountTable& counts, std::size_t n) {
  if (n == 0) throw InputError("Y statistic of an empty transcript is undefined");
  return Rational(4 * scoring_rounds(counts), n);
}

std::optional<Rational> x_from_counts(const CountTable& counts) {
  for (const PairTally& t : counts) {
    if (t.total == 0) return std::nullopt;
  }
  return Rational(counts[0].correlated, counts[0].total) + Rational(counts[1].correlated, counts[1].total) +
         Rational(counts[2].correlated, counts[2].total) + Rational(counts[3].anticorrelated, counts[3].total);
}

Rational y_statistic(const Transcript& transcript) {
  return y_from_counts(transcript.counts(), transcript.size());
}

std::optional<Rational> x_statistic(const Transcript& transcript) { return x_from_counts(transcript.counts()); }

BatchStatistics batch_statistics(const Transcript& transcript) {
  return {transcript.size(), y_statistic(transcript), x_statistic(transcript), transcript.counts()};
}

int chsh_value(const DeterministicAssignment& assignment) {
  int total = 0;
  for (SettingPair p : kAllPairs) total += assignment.scores(p) ? 1 : 0;
  return total;
}

Rational chsh_value(const StochasticLHV& lhv) {
  Rational total = 0;
  for (const auto& c : lhv.support()) total += c.weight * chsh_value(c.assignment);
  return total;
}

}  // namespace bellmem
