#include "bellmem/bounds.hpp"

#include "bellmem/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace bellmem {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

void require_positive_n(std::size_t n) {
  if (n == 0) throw InputError("number of rounds must be >= 1");
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InputError(std::string(what) + " must be finite");
}

}  // namespace

double normal_cdf(double z) {
  if (std::isnan(z)) throw InputError("normal_cdf of NaN");
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_tail_approx(double z) {
  require_finite(z, "z");
  if (z <= 0.0) throw InputError("normal tail approximation needs z > 0, got " + std::to_string(z));
  return kInvSqrt2Pi / z * std::exp(-0.5 * z * z);
}

double f_delta(std::size_t n, double delta) {
  require_positive_n(n);
  require_finite(delta, "delta");
  if (delta <= 0.0) throw InputError("delta must be > 0, got " + std::to_string(delta));
  const double nn = static_cast<double>(n);
  return kInvSqrt2Pi * std::sqrt(3.0) / (delta * std::sqrt(nn)) * std::exp(-delta * delta * nn / 6.0);
}

double x_tail_bound(std::size_t n, double delta) {
  require_finite(delta, "delta");
  if (delta <= 0.0 || delta >= 1.0) throw InputError("delta must lie in (0, 1), got " + std::to_string(delta));
  return 5.0 * f_delta(n, delta);
}

double x_mean_bound(std::size_t n, double epsilon) {
  require_positive_n(n);
  require_finite(epsilon, "epsilon");
  if (epsilon <= 0.0) throw InputError("epsilon must be > 0, got " + std::to_string(epsilon));
  const double nn = static_cast<double>(n);
  const double lead = 5.0 * std::pow(nn, -0.5 + epsilon);
  const double tail =
      5.0 * std::sqrt(3.0 / (2.0 * std::numbers::pi)) * std::pow(nn, -epsilon) * std::exp(-std::pow(nn, 2 * epsilon) / 6.0);
  return 3.0 + lead + tail;
}

BoundReport bound_report(std::size_t n, double delta, std::optional<double> epsilon) {
  BoundReport r;
  r.n = n;
  r.delta = delta;
  r.epsilon = epsilon;
  r.f_value = f_delta(n, delta);
  r.x_tail_bound = x_tail_bound(n, delta);
  if (epsilon) r.x_mean_bound = x_mean_bound(n, *epsilon);
  return r;
}

std::string_view to_string(ModelClass m) {
  switch (m) {
    case ModelClass::Memoryless: return "memoryless";
    case ModelClass::OneSided: return "one-sided-memory";
    case ModelClass::Collective: return "collective";
    case ModelClass::TwoSided: return "two-sided-memory";
  }
  return "?";
}

std::string_view to_string(TableQuantity q) {
  switch (q) {
    case TableQuantity::ExpectationX: return "E(X_N)";
    case TableQuantity::TailX: return "P(X_N-3>5delta)";
    case TableQuantity::ExpectationY: return "E(Y_N)";
    case TableQuantity::TailY: return "P(Y_N-3>delta)";
  }
  return "?";
}

ModelBoundsTable bounds_table(std::size_t n, double delta, double epsilon) {
  require_finite(delta, "delta");
  if (!(delta > 0.0 && (3.0 + delta) < (3.0 + 5.0 * delta) * (1.0 - delta))) {
    throw InputError("bounds table needs (3+delta) < (3+5 delta)(1-delta), i.e. 0 < delta < 0.2; got " +
                     std::to_string(delta));
  }
  const double f = f_delta(n, delta);
  const double x_mean = x_mean_bound(n, epsilon);

  ModelBoundsTable t;
  t.n = n;
  t.delta = delta;
  t.epsilon = epsilon;
  auto row = [&t](ModelClass m) -> std::array<BoundEntry, 4>& { return t.entries[static_cast<std::size_t>(m)]; };
  row(ModelClass::Memoryless) = {BoundEntry::at_most(3.0), BoundEntry::below(5.0 * f), BoundEntry::at_most(3.0),
                                 BoundEntry::below(f)};
  row(ModelClass::OneSided) = {BoundEntry::below(x_mean), BoundEntry::below(5.0 * f), BoundEntry::at_most(3.0),
                               BoundEntry::below(f)};
  row(ModelClass::Collective) = {BoundEntry::unknown(), BoundEntry::unknown(), BoundEntry::at_most(3.0),
                                 BoundEntry::unknown()};
  row(ModelClass::TwoSided) = row(ModelClass::OneSided);
  return t;
}

}  // namespace bellmem
