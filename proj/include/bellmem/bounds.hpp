#pragma once

// Closed-form bounds on CHSH statistics under local hidden variable models:
// the Gaussian tail f(N, delta) for Y_N, the derived tail for X_N, and the
// bound on E(X_N) that holds even with two-sided memory.

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace bellmem {

/// Standard normal distribution function.
double normal_cdf(double z);

/// Asymptotic tail 1 - Phi(z) ~ exp(-z^2/2) / (z sqrt(2 pi)). Requires z > 0.
double normal_tail_approx(double z);

/// f(N, delta) = (1/sqrt(2 pi)) * sqrt(3) / (delta sqrt N) * exp(-delta^2 N / 6),
/// the approximate ceiling on P(Y_N > 3 + delta).
double f_delta(std::size_t n, double delta);

/// 5 f(N, delta): ceiling on P(X_N > (3 + delta) / (1 - delta)). Requires 0 < delta < 1.
double x_tail_bound(std::size_t n, double delta);

/// 3 + 5 N^(-1/2 + eps) + 5 sqrt(3 / 2pi) N^(-eps) exp(-N^(2 eps) / 6).
double x_mean_bound(std::size_t n, double epsilon);

struct BoundReport {
  std::size_t n = 0;
  double delta = 0.0;
  std::optional<double> epsilon;
  double f_value = 0.0;
  double x_tail_bound = 0.0;
  std::optional<double> x_mean_bound;  // present iff epsilon is
};

BoundReport bound_report(std::size_t n, double delta, std::optional<double> epsilon = std::nullopt);

enum class ModelClass { Memoryless, OneSided, Collective, TwoSided };
inline constexpr std::array<ModelClass, 4> kModelClasses{ModelClass::Memoryless, ModelClass::OneSided,
                                                         ModelClass::Collective, ModelClass::TwoSided};
std::string_view to_string(ModelClass m);

enum class TableQuantity { ExpectationX, TailX, ExpectationY, TailY };
inline constexpr std::array<TableQuantity, 4> kTableQuantities{TableQuantity::ExpectationX, TableQuantity::TailX,
                                                               TableQuantity::ExpectationY, TableQuantity::TailY};
std::string_view to_string(TableQuantity q);

/// One table cell: an upper limit (`<=` or `<`) or unknown.
struct BoundEntry {
  bool known = false;
  bool strict = false;
  double value = 0.0;

  static BoundEntry unknown() { return {}; }
  static BoundEntry at_most(double v) { return {true, false, v}; }
  static BoundEntry below(double v) { return {true, true, v}; }
};

struct ModelBoundsTable {
  std::size_t n = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  /// [model class][quantity], both in declaration order.
  std::array<std::array<BoundEntry, 4>, 4> entries{};

  const BoundEntry& at(ModelClass m, TableQuantity q) const {
    return entries[static_cast<std::size_t>(m)][static_cast<std::size_t>(q)];
  }
};

/// Requires 0 < delta < 1/5, i.e. (3 + delta) < (3 + 5 delta)(1 - delta).
/// Memory rows bound E(X_N) by x_mean_bound(n, epsilon).
ModelBoundsTable bounds_table(std::size_t n, double delta, double epsilon = 0.25);

}  // namespace bellmem
