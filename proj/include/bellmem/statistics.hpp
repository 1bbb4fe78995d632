#pragma once

#include "bellmem/core.hpp"
#include "bellmem/rational.hpp"
#include "bellmem/strategies.hpp"

#include <optional>

namespace bellmem {

/// Y_N, X_N and pair counts for one batch. `x` is empty when some pair was
/// never measured.
struct BatchStatistics {
  std::size_t n = 0;
  Rational y;
  std::optional<Rational> x;
  CountTable counts{};
};

/// 1 if the round's outcomes match the CHSH target for its pair, else 0.
int round_score(const Round& round);

/// c11 + c12 + c21 + a22: the number of scoring rounds.
std::uint64_t scoring_rounds(const CountTable& counts);

/// (4/N) * scoring rounds. Throws InputError when n == 0.
Rational y_from_counts(const CountTable& counts, std::size_t n);
/// Sum of the four per-pair frequencies, or nullopt if any pair is missing.
std::optional<Rational> x_from_counts(const CountTable& counts);

/// Throws InputError on an empty transcript.
Rational y_statistic(const Transcript& transcript);
std::optional<Rational> x_statistic(const Transcript& transcript);
BatchStatistics batch_statistics(const Transcript& transcript);

/// P_c(A1,B1) + P_c(A1,B2) + P_c(A2,B1) + P_a(A2,B2).
int chsh_value(const DeterministicAssignment& assignment);
Rational chsh_value(const StochasticLHV& lhv);

}  // namespace bellmem
