#include "bellmem/bounds.hpp"
#include "bellmem/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bellmem;

namespace {

// Composite Simpson on [0, |z|] of the normal density.
double phi_simpson(double z) {
  const int steps = 20000;
  const double h = std::abs(z) / steps;
  auto density = [](double t) { return std::exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi); };
  double sum = density(0) + density(std::abs(z));
  for (int i = 1; i < steps; ++i) sum += (i % 2 == 1 ? 4 : 2) * density(i * h);
  const double half = sum * h / 3;
  return z >= 0 ? 0.5 + half : 0.5 - half;
}

double f_oracle(double n, double delta) {
  return std::sqrt(3.0) / (delta * std::sqrt(n) * std::sqrt(2 * std::numbers::pi)) * std::exp(-delta * delta * n / 6);
}

}  // namespace

TEST_CASE("normal_cdf matches quadrature and reference values") {
  for (double z : {-4.0, -2.5, -1.5, -0.3, 0.0, 0.5, 1.0, 1.96, 3.0, 5.0}) {
    CHECK(normal_cdf(z) == doctest::Approx(phi_simpson(z)).epsilon(1e-10));
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.975002104851780).epsilon(1e-12));
  CHECK(normal_cdf(-1.5) == doctest::Approx(0.0668072012688581).epsilon(1e-12));
  CHECK(normal_cdf(5.0) == doctest::Approx(0.999999713348428).epsilon(1e-14));
  // Symmetry.
  for (double z : {0.1, 0.7, 2.2, 6.0}) CHECK(normal_cdf(z) + normal_cdf(-z) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normal_tail_approx") {
  CHECK(normal_tail_approx(1.0) == doctest::Approx(0.241970724519143).epsilon(1e-12));
  CHECK(normal_tail_approx(3.0) == doctest::Approx(0.00147728280397934).epsilon(1e-12));
  // Upper bound on the true tail, and asymptotically tight.
  for (double z : {0.5, 1.0, 2.0, 4.0, 8.0}) CHECK(normal_tail_approx(z) >= std::erfc(z / std::sqrt(2.0)) / 2);
  CHECK(normal_tail_approx(8.0) / std::erfc(8.0 / std::sqrt(2.0)) * 2 == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(normal_tail_approx(0.0), InputError);
  CHECK_THROWS_AS(normal_tail_approx(-1.0), InputError);
}

TEST_CASE("f_delta") {
  CHECK(f_delta(1000, 0.1) == doctest::Approx(0.0412711486914622).epsilon(1e-12));
  CHECK(f_delta(100, 0.5) == doctest::Approx(0.0021425962850871).epsilon(1e-12));
  for (std::size_t n : {10U, 100U, 5000U}) {
    for (double d : {0.05, 0.1, 0.3}) CHECK(f_delta(n, d) == doctest::Approx(f_oracle(n, d)).epsilon(1e-13));
  }
  // It is the Gaussian tail at z = delta sqrt(N/3).
  CHECK(f_delta(1200, 0.15) == doctest::Approx(normal_tail_approx(0.15 * std::sqrt(400.0))).epsilon(1e-13));
  CHECK_THROWS_AS(f_delta(0, 0.1), InputError);
  CHECK_THROWS_AS(f_delta(10, 0.0), InputError);
  CHECK_THROWS_AS(f_delta(10, -0.1), InputError);
}

TEST_CASE("property: f decreases in N and in delta") {
  for (std::size_t n = 10; n < 100000; n = n * 3 / 2) {
    CHECK(f_delta(n + 1, 0.1) < f_delta(n, 0.1));
    CHECK(f_delta(n, 0.2) < f_delta(n, 0.1));
  }
}

TEST_CASE("x_tail_bound") {
  CHECK(x_tail_bound(1000, 0.1) == doctest::Approx(5 * 0.0412711486914622).epsilon(1e-12));
  CHECK_THROWS_AS(x_tail_bound(1000, 1.0), InputError);
  CHECK_THROWS_AS(x_tail_bound(1000, 0.0), InputError);
}

TEST_CASE("x_mean_bound") {
  CHECK(x_mean_bound(1000000, 0.25) == doctest::Approx(3.15811388300842).epsilon(1e-12));
  CHECK(x_mean_bound(100000000, 0.25) == doctest::Approx(3.05).epsilon(1e-12));
  double previous = x_mean_bound(100, 0.25);
  for (std::size_t n = 1000; n <= 100000000; n *= 10) {
    const double v = x_mean_bound(n, 0.25);
    CHECK(v > 3);
    CHECK(v < previous);
    previous = v;
  }
  CHECK_THROWS_AS(x_mean_bound(100, 0.0), InputError);
  CHECK_THROWS_AS(x_mean_bound(0, 0.25), InputError);
}

TEST_CASE("bound_report") {
  const BoundReport r = bound_report(1000, 0.1);
  CHECK(r.f_value == f_delta(1000, 0.1));
  CHECK(r.x_tail_bound == x_tail_bound(1000, 0.1));
  CHECK_FALSE(r.x_mean_bound.has_value());
  const BoundReport with_eps = bound_report(1000000, 0.1, 0.25);
  REQUIRE(with_eps.x_mean_bound.has_value());
  CHECK(*with_eps.x_mean_bound == x_mean_bound(1000000, 0.25));
}

TEST_CASE("bounds table") {
  const ModelBoundsTable t = bounds_table(1000, 0.1);
  using M = ModelClass;
  using Q = TableQuantity;
  for (M m : {M::Memoryless, M::OneSided}) {
    CHECK(t.at(m, Q::ExpectationY).known);
    CHECK(t.at(m, Q::ExpectationY).value == 3);
    CHECK(t.at(m, Q::TailY).value == doctest::Approx(f_delta(1000, 0.1)));
    CHECK(t.at(m, Q::TailX).value == doctest::Approx(5 * f_delta(1000, 0.1)));
  }
  CHECK(t.at(M::Memoryless, Q::ExpectationX).value == 3);
  CHECK_FALSE(t.at(M::Memoryless, Q::ExpectationX).strict);
  CHECK(t.at(M::OneSided, Q::ExpectationX).strict);
  CHECK(t.at(M::OneSided, Q::ExpectationX).value == doctest::Approx(x_mean_bound(1000, 0.25)));

  CHECK_FALSE(t.at(M::Collective, Q::ExpectationX).known);
  CHECK_FALSE(t.at(M::Collective, Q::TailX).known);
  CHECK(t.at(M::Collective, Q::ExpectationY).known);
  CHECK(t.at(M::Collective, Q::ExpectationY).value == 3);
  CHECK_FALSE(t.at(M::Collective, Q::TailY).known);

  CHECK(t.at(M::TwoSided, Q::ExpectationX).strict);
  CHECK(t.at(M::TwoSided, Q::TailY).known);

  CHECK_THROWS_AS(bounds_table(1000, 0.2), InputError);
  CHECK_THROWS_AS(bounds_table(1000, 0.0), InputError);
  CHECK(to_string(M::TwoSided).size() > 0);
  CHECK(to_string(Q::TailX).size() > 0);
}
