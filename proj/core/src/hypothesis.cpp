#include "scoredens/hypothesis.hpp"

#include <cmath>
#include <stdexcept>

#include "scoredens/integrated.hpp"
#include "scoredens/ou.hpp"
#include "scoredens/score_oracle.hpp"
#include "scoredens/stats.hpp"

namespace scoredens {
namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

}  // namespace

TesterVerdict run_tester(const TesterConfig& cfg, const LogDensityFn& phat_log,
                         const std::vector<Point>& samples) {
  if (static_cast<long>(samples.size()) != cfg.m) {
    throw std::invalid_argument("run_tester: expected exactly m samples");
  }
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("run_tester: epsilon must be positive");
  TesterVerdict out;
  out.ratios.reserve(samples.size());
  // Strict exceedance; a ratio equal to epsilon in exact arithmetic stays H0,
  // so allow a one-ulp-scale guard before declaring a violation.
  const double guard = 1e-12 * std::max(1.0, cfg.epsilon);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double ratio = phat_log(samples[i]) - cfg.null_logdensity(samples[i]);
    if (!std::isfinite(ratio)) throw std::domain_error("run_tester: non-finite evaluation");
    out.ratios.push_back(ratio);
    if (!out.violating_index && std::abs(ratio) > cfg.epsilon + guard) {
      out.violating_index = i;
      out.verdict = Hypothesis::H1;
    }
  }
  return out;
}

Point uniform_unit_vector(Eigen::Index d, RandomStream& rng) {
  if (d < 1) throw std::invalid_argument("uniform_unit_vector: d >= 1 required");
  Point v = rng.normal_vector(d);
  double n = v.norm();
  while (n < 1e-12) {  // astronomically unlikely; redraw keeps the output unit
    v = rng.normal_vector(d);
    n = v.norm();
  }
  return v / n;
}

GaussianMixture hclwe_null(Eigen::Index d) {
  return GaussianMixture({1.0},
                         {GaussianParams::spherical(Point::Zero(d), 1.0 / (2.0 * kPi))});
}

HclweExperimentReport hclwe_experiment(const HclweParams& params,
                                       const HclwePipelineConfig& pipeline, int trials,
                                       RandomStream rng) {
  if (trials < 10) throw std::invalid_argument("hclwe_experiment: need trials >= 10");
  const Eigen::Index d = params.secret.size();
  const GaussianMixture null_mix = hclwe_null(d);
  const TimeWindow window(pipeline.tau, pipeline.T);
  const double constant = identity_constant(static_cast<int>(d), pipeline.T);

  struct TrialOutcome {
    bool truth_is_h1 = false;
    bool said_h1 = false;
    double mean_abs_ratio = 0.0;
  };
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  RandomStream trial_rng = rng.derive("trials");

  parallel_for(static_cast<std::size_t>(trials), pipeline.workers, [&](std::size_t tr) {
    RandomStream local = trial_rng.derive(tr);
    const bool h1 = local.uniform() < 0.5;

    HclweParams p = params;
    RandomStream secret_rng = local.derive("secret");
    p.secret = uniform_unit_vector(d, secret_rng);
    const GaussianMixture truth = h1 ? hclwe_mixture(p) : null_mix;

    ScoreOracle oracle = exact_oracle(truth, window);
    if (pipeline.bias_eps > 0.0) {
      RandomStream dir_rng = local.derive("bias");
      const Point direction = uniform_unit_vector(d, dir_rng);
      const double eps = pipeline.bias_eps;
      oracle = biased_oracle(oracle, direction, [eps](double) { return eps; });
    }

    RandomStream est_rng = local.derive("estimates");
    RandomStream sample_rng = local.derive("samples");
    std::vector<Point> samples(static_cast<std::size_t>(pipeline.tester_m));
    for (long i = 0; i < pipeline.tester_m; ++i) {
      RandomStream s = sample_rng.derive(static_cast<std::uint64_t>(i));
      samples[static_cast<std::size_t>(i)] = truth.sample(s);
    }
    // Each tester sample gets its own estimation stream, in evaluation order.
    long eval_counter = 0;
    LogDensityFn phat_indexed = [&](const Point& x) {
      const IntegratedEstimate v = estimate_v(
          x, oracle, pipeline.m_mc, est_rng.derive(static_cast<std::uint64_t>(eval_counter++)));
      return -(v.value + constant);
    };

    TesterConfig cfg;
    cfg.m = pipeline.tester_m;
    cfg.epsilon = pipeline.band;
    cfg.null_logdensity = [&null_mix](const Point& x) { return null_mix.logdensity(x); };
    const TesterVerdict verdict = run_tester(cfg, phat_indexed, samples);

    RunningStat abs_ratio;
    for (double r : verdict.ratios) abs_ratio.add(std::abs(r));
    outcomes[tr] = TrialOutcome{h1, verdict.verdict == Hypothesis::H1, abs_ratio.mean()};
  });

  HclweExperimentReport report;
  report.trials = trials;
  RunningStat h0_ratio, h1_ratio;
  int h0_correct = 0, h1_correct = 0;
  for (const auto& o : outcomes) {
    if (o.truth_is_h1) {
      ++report.h1_trials;
      if (o.said_h1) ++h1_correct;
      h1_ratio.add(o.mean_abs_ratio);
    } else {
      ++report.h0_trials;
      if (!o.said_h1) ++h0_correct;
      h0_ratio.add(o.mean_abs_ratio);
    }
  }
  report.h0_accuracy =
      report.h0_trials > 0 ? static_cast<double>(h0_correct) / report.h0_trials : 0.0;
  report.h1_accuracy =
      report.h1_trials > 0 ? static_cast<double>(h1_correct) / report.h1_trials : 0.0;
  report.combined_accuracy =
      static_cast<double>(h0_correct + h1_correct) / static_cast<double>(trials);
  report.mean_abs_ratio_h0 = h0_ratio.mean();
  report.mean_abs_ratio_h1 = h1_ratio.mean();
  return report;
}

double hclwe_tail_weight(const HclweParams& p, int k_wide) {
  if (k_wide < p.k) throw std::invalid_argument("hclwe_tail_weight: k_wide < k");
  double inside = 0.0, total = 0.0;
  for (int i = -k_wide; i <= k_wide; ++i) {
    const double w = hclwe_raw_weight(p, i);
    total += w;
    if (std::abs(i) <= p.k) inside += w;
  }
  return (total - inside) / total;
}

}  // namespace scoredens
