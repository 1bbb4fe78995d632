// Acceptance suite: one PASS/FAIL line per criterion. Usage: acceptance <path-to-bellmem>

#include "bellmem/bounds.hpp"
#include "bellmem/enumerator.hpp"
#include "bellmem/montecarlo.hpp"
#include "bellmem/statistics.hpp"
#include "bellmem/strategies.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace bellmem;

namespace {

// Tolerances.
constexpr double kQuantumMeanTolerance = 0.01;
constexpr double kLogRelativeTolerance = 1e-3;
constexpr double kWilsonWidths = 4.0;
constexpr double kStandardErrors = 4.0;

constexpr std::size_t kQuantumRounds = 10000;
constexpr std::size_t kQuantumBatches = 100;
constexpr std::size_t kTailRounds = 1000;
constexpr std::size_t kTailBatches = 100000;
constexpr std::size_t kOracleBatches = 100000;
constexpr std::size_t kMaxSmallN = 6;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Reporter {
 public:
  void run(int id, const std::string& title, const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d. %s -- %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
    failures_ += v.pass ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

SimulationPlan plan_for(const std::string& strategy, std::size_t n, std::size_t batches, std::uint64_t seed) {
  SimulationPlan p;
  p.strategy = strategy;
  p.n = n;
  p.batches = batches;
  p.master_seed = seed;
  return p;
}

Verdict chsh_bound() {
  const ChshMaximum m = chsh_exhaustive_max();
  bool ok = m.max == 3;
  const auto all = DeterministicAssignment::all();
  RandomSource rng(1);
  Rational worst = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<StochasticLHV::Component> support;
    Rational remaining = 1;
    const std::size_t k = 1 + rng.next() % 16;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const Rational w = remaining * Rational(static_cast<long long>(rng.next() % 1000), 1000);
      support.push_back({w, all[rng.next() % 16]});
      remaining -= w;
    }
    support.push_back({remaining, all[rng.next() % 16]});
    const Rational v = chsh_value(StochasticLHV(std::move(support)));
    if (v > worst) worst = v;
    ok = ok && v <= 3;
  }
  return {ok, fmt("exhaustive max %d; largest of 2000 random mixtures %s", m.max, to_string(worst).c_str())};
}

Verdict quantum_value() {
  const Sqrt2Number closed = QuantumSampler::chsh_value();
  const bool exact = closed == Sqrt2Number{2, 1};
  const EstimateReport r = estimate(plan_for("quantum", kQuantumRounds, kQuantumBatches, 20260101));
  const double target = 2 + std::sqrt(2.0);
  const bool close = std::abs(r.mean_y - target) <= kQuantumMeanTolerance;
  return {exact && close, fmt("closed form %s; mean_y %.5f (target %.5f +- %.2f)", closed.to_string().c_str(), r.mean_y,
                              target, kQuantumMeanTolerance)};
}

Verdict collective() {
  const CollectiveExact c = exact_collective_n2(*collective_n2());
  const Rational p = c.all_score();
  const bool ok = p == Rational(10, 16) && p > independent_rounds_ceiling();
  return {ok, fmt("P(both score) = %llu/%llu vs ceiling %s", static_cast<unsigned long long>(c.all_score_count()),
                  static_cast<unsigned long long>(c.sequences), to_string(independent_rounds_ceiling()).c_str())};
}

Verdict model101() {
  const Model101Exact m = model101_exact();
  // Independent log-space evaluation of 100!/(33!^3 1!) / 4^100.
  const double log10_lgamma =
      (std::lgamma(101.0) - 3 * std::lgamma(34.0) - std::lgamma(2.0) - 100 * std::log(4.0)) / std::log(10.0);
  const double rel = std::abs(m.log10_p_trigger - log10_lgamma) / std::abs(log10_lgamma);
  const bool ok = m.e_conditional == Rational(53, 17) && m.e_x_excess == m.p_trigger * Rational(2, 17) &&
                  m.e_x_excess > 0 && rel <= kLogRelativeTolerance;
  return {ok, fmt("E(X|trigger) = %s; p_trigger %.6e; log10 %.5f vs lgamma %.5f (rel %.1e)",
                  to_string(m.e_conditional).c_str(), to_double(m.p_trigger), m.log10_p_trigger, log10_lgamma, rel)};
}

Verdict guessing() {
  bool ok = true;
  std::string detail;
  for (std::size_t n = 4; n <= 10; ++n) {
    const ExactResult r = exact_expectations([] { return guessing_model(); }, n);
    const bool x_ok = r.e_x_conditional && *r.e_x_conditional > 3;
    ok = ok && x_ok && r.e_y <= 3;
    if (n == 4) ok = ok && r.e_x_conditional == Rational(15, 4);
    detail += fmt("n=%zu X=%.4f Y=%s; ", n, r.e_x_conditional ? to_double(*r.e_x_conditional) : 0.0,
                  to_string(r.e_y).c_str());
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Verdict tail_bound() {
  bool ok = true;
  std::string detail;
  const double bound = f_delta(kTailRounds, 0.1);
  for (const std::string name : {"constant-plus", "guessing"}) {
    const EstimateReport r = estimate(plan_for(name, kTailRounds, kTailBatches, 6));
    const double slack = kWilsonWidths * r.tail_ci_y.width();
    ok = ok && r.tail_freq_y <= bound + slack;
    detail += fmt("%s P(Y>3.1)=%.5f [%.5f, %.5f]; ", name.c_str(), r.tail_freq_y, r.tail_ci_y.lower, r.tail_ci_y.upper);
  }
  detail += fmt("f=%.5f", bound);
  return {ok, detail};
}

Verdict no_signaling() {
  bool ok = true;
  std::uint64_t comparisons = 0;
  for (const auto& name : model_names()) {
    const Model m = name == "stochastic-lhv" ? make_model(name, StochasticLHV::uniform()) : make_model(name);
    const std::vector<std::size_t> sizes = m.is_collective() ? std::vector<std::size_t>{2}
                                           : m.is_quantum()  ? std::vector<std::size_t>{1}
                                                             : std::vector<std::size_t>{1, 2, 3, 4, 5, 6};
    for (std::size_t n : sizes) {
      const NoSignalingResult r = no_signaling_check(m, n);
      ok = ok && r.pass;
      comparisons += r.comparisons;
    }
  }
  const PlayoutFn leaky = [](std::span<const SettingPair> settings) {
    Transcript t;
    for (SettingPair p : settings) t.append(p, p.bob == BobSetting::B1 ? Outcome::Plus : Outcome::Minus, Outcome::Plus);
    return t;
  };
  const NoSignalingResult caught = no_signaling_check(leaky, 3);
  ok = ok && !caught.pass && caught.counterexample;
  return {ok, fmt("%llu comparisons, all catalogue models pass; signaling double: %s",
                  static_cast<unsigned long long>(comparisons),
                  caught.counterexample ? caught.counterexample->describe().c_str() : "not caught")};
}

Verdict oracle_agreement() {
  bool ok = true;
  double worst = 0.0;
  std::string worst_case;
  auto compare = [&](const std::string& name, std::size_t n, const Rational& exact) {
    const EstimateReport r = estimate(plan_for(name, n, kOracleBatches, 1000 + n));
    const double z = std::abs(r.mean_y - to_double(exact)) / r.se_y;
    ok = ok && z <= kStandardErrors;
    if (z > worst) {
      worst = z;
      worst_case = fmt("%s n=%zu", name.c_str(), n);
    }
  };
  for (const std::string name : {"constant-plus", "guessing", "model101"}) {
    const Model m = make_model(name);
    for (std::size_t n = 1; n <= kMaxSmallN; ++n) compare(name, n, exact_expectations(m.sequential(), n).e_y);
  }
  // Collective: E(Y_2) = 2 * P(y1) + 2 * P(y2) with score vector index 2*y1 + y2.
  const CollectiveExact c = exact_collective_n2(*collective_n2());
  compare("collective-n2", 2, 2 * (c.probability(2) + c.probability(3)) + 2 * (c.probability(1) + c.probability(3)));
  return {ok, fmt("largest deviation %.2f standard errors (%s)", worst, worst_case.c_str())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict reproducibility(const std::string& cli) {
  const auto dir = std::filesystem::temp_directory_path() / "bellmem_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "simulate --strategy guessing --n 200 --batches 300 --seed 42 --format csv"},
      {"simulate-json", "simulate --strategy quantum --n 100 --batches 50 --seed 7"},
      {"enumerate", "enumerate --strategy guessing --n 6"},
      {"bounds", "bounds --n 1000 --delta 0.1 --epsilon 0.25"},
      {"table", "table --n 1000 --delta 0.1 --format csv"},
      {"nosig", "nosig --strategy model101 --n 4"}};
  bool ok = true;
  std::string detail;
  for (const auto& [tag, args] : commands) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const auto path = dir / (tag + "_" + std::to_string(run) + ".out");
      std::filesystem::remove(path);
      const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + path.string() + "\" >/dev/null 2>&1";
      const int raw = std::system(cmd.c_str());
      if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
        ok = false;
        detail += tag + " exited abnormally; ";
      }
      outputs[run] = slurp(path);
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    ok = ok && same;
    detail += tag + (same ? " identical; " : " DIFFERS; ");
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-bellmem-binary>\n";
    return 2;
  }
  const std::string cli = argv[1];
  Reporter report;
  report.run(1, "CHSH bound is exactly 3", chsh_bound);
  report.run(2, "quantum value 2+sqrt2", quantum_value);
  report.run(3, "collective model beats 9/16", collective);
  report.run(4, "model 101 conditional expectation 53/17", model101);
  report.run(5, "guessing model E(X|defined) > 3, E(Y) <= 3", guessing);
  report.run(6, "Y tail within f(1000, 0.1)", tail_bound);
  report.run(7, "no-signaling suite", no_signaling);
  report.run(8, "Monte Carlo agrees with exact enumeration", oracle_agreement);
  report.run(9, "CLI output is reproducible", [&cli] { return reproducibility(cli); });
  std::printf("%d of 9 criteria failed\n", report.failures());
  return report.failures() == 0 ? 0 : 1;
}
