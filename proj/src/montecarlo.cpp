#include "bellmem/montecarlo.hpp"

#include "bellmem/bounds.hpp"
#include "bellmem/enumerator.hpp"
#include "bellmem/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>

namespace bellmem {

std::vector<SettingPair> draw_settings(std::size_t n, RandomSource& rng) {
  std::vector<SettingPair> settings(n);
  for (SettingPair& p : settings) {
    const bool a2 = rng.coin();
    const bool b2 = rng.coin();
    p = {a2 ? AliceSetting::A2 : AliceSetting::A1, b2 ? BobSetting::B2 : BobSetting::B1};
  }
  return settings;
}

Transcript run_batch(const Model& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("a batch needs n >= 1 rounds");
  RandomSource settings_rng(derive_seed(seed, 0));
  const auto settings = draw_settings(n, settings_rng);
  PlayoutStreams streams(derive_seed(seed, 1));
  return playout_model(model, settings, streams);
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::uint64_t batch_seed(std::uint64_t master_seed, std::size_t batch) { return derive_seed(master_seed, batch); }

namespace {

void validate(const SimulationPlan& plan) {
  if (plan.n == 0) throw InputError("plan needs n >= 1");
  if (plan.batches == 0) throw InputError("plan needs at least one batch");
  if (plan.delta <= 0 || plan.delta >= 1) throw InputError("delta must lie in (0, 1)");
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

// Two-pass mean and standard error of the mean, in the given order.
MeanSe mean_and_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

}  // namespace

EstimateReport summarize(std::span<const BatchRecord> batches, const SimulationPlan& plan) {
  std::vector<const BatchRecord*> ordered;
  ordered.reserve(batches.size());
  for (const BatchRecord& b : batches) ordered.push_back(&b);
  std::sort(ordered.begin(), ordered.end(), [](const BatchRecord* l, const BatchRecord* r) { return l->batch < r->batch; });

  const Rational y_threshold = 3 + plan.delta;
  const Rational x_threshold = (3 + plan.delta) / (1 - plan.delta);

  EstimateReport r;
  r.strategy = plan.strategy;
  r.n = plan.n;
  r.batches = batches.size();
  r.master_seed = plan.master_seed;
  r.delta = plan.delta;

  std::vector<double> ys;
  std::vector<double> xs;
  ys.reserve(ordered.size());
  for (const BatchRecord* b : ordered) {
    ys.push_back(to_double(b->stats.y));
    if (b->stats.y > y_threshold) ++r.tail_count_y;
    if (b->stats.x) {
      xs.push_back(to_double(*b->stats.x));
      if (*b->stats.x > x_threshold) ++r.tail_count_x;
    } else {
      ++r.undefined_count;
    }
  }
  const MeanSe y = mean_and_se(ys);
  r.mean_y = y.mean;
  r.se_y = y.se;
  if (!xs.empty()) {
    const MeanSe x = mean_and_se(xs);
    r.mean_x = x.mean;
    r.se_x = x.se;
  }
  r.tail_freq_y = ordered.empty() ? 0.0 : static_cast<double>(r.tail_count_y) / static_cast<double>(ordered.size());
  r.tail_freq_x = xs.empty() ? 0.0 : static_cast<double>(r.tail_count_x) / static_cast<double>(xs.size());
  r.tail_ci_y = wilson_interval(r.tail_count_y, ordered.size());
  r.tail_ci_x = wilson_interval(r.tail_count_x, xs.size());
  return r;
}

SimulationResult simulate(const SimulationPlan& plan) {
  validate(plan);
  const Model model = make_model(plan.strategy, plan.weights);
  if (model.is_collective()) {
    if (auto required = model.collective().required_rounds(); required && *required != plan.n) {
      throw InputError("strategy '" + plan.strategy + "' is defined only for n=" + std::to_string(*required));
    }
  }

  SimulationResult result;
  result.batches.resize(plan.batches);
  const unsigned workers = detail::resolve_workers(plan.workers, plan.batches);
  detail::run_chunks(plan.batches, workers, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::uint64_t seed = batch_seed(plan.master_seed, i);
      const Transcript t = run_batch(model, plan.n, seed);
      result.batches[i] = BatchRecord{static_cast<std::size_t>(i), seed, batch_statistics(t)};
    }
  });
  result.report = summarize(result.batches, plan);
  return result;
}

EstimateReport estimate(const SimulationPlan& plan) { return simulate(plan).report; }

TailComparison tail_compare(const EstimateReport& report) {
  const double delta = to_double(report.delta);
  TailComparison c;
  c.empirical_y = report.tail_freq_y;
  c.bound_y = f_delta(report.n, delta);
  c.ratio_y = c.empirical_y / c.bound_y;
  c.ci_y = report.tail_ci_y;
  c.empirical_x = report.tail_freq_x;
  c.bound_x = x_tail_bound(report.n, delta);
  c.ratio_x = c.empirical_x / c.bound_x;
  c.ci_x = report.tail_ci_x;
  return c;
}

TailComparison tail_compare(const SimulationPlan& plan) { return tail_compare(estimate(plan)); }

}  // namespace bellmem
