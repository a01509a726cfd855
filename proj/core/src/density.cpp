#include "scoredens/density.hpp"

#include <cmath>
#include <stdexcept>

#include "scoredens/ou.hpp"
#include "scoredens/stats.hpp"

namespace scoredens {

DensityReport log_density_estimate(const Point& x0, const ScoreOracle& oracle,
                                   const ScheduleParams& sched, RandomStream rng,
                                   const EstimateVOptions& options) {
  if (std::abs(oracle.window.tau - sched.tau) > 1e-12 ||
      std::abs(oracle.window.T - sched.T) > 1e-12) {
    throw std::invalid_argument("log_density_estimate: oracle window does not match schedule");
  }
  const IntegratedEstimate v = estimate_v(x0, oracle, sched.m, rng, options);
  DensityReport report;
  report.x0 = x0;
  report.ell = v.value + identity_constant(static_cast<int>(x0.size()), sched.T);
  report.phat_log = -report.ell;
  report.stderr_value = v.stderr_value;
  return report;
}

DensityReport early_stopped_estimate(const Point& x0, const ScoreOracle& oracle, double tau,
                                     const ScheduleParams& sched, RandomStream rng,
                                     const EstimateVOptions& options) {
  if (!(tau > 0.0)) throw std::invalid_argument("early_stopped_estimate: tau must be positive");
  ScoreOracle shifted = time_shifted_oracle(oracle, tau);
  shifted.window = sched.window();  // degenerate or uncovered windows throw here
  if (sched.T + tau > oracle.window.T + 1e-12) {
    throw std::invalid_argument("early_stopped_estimate: base oracle window too short");
  }
  return log_density_estimate(x0, shifted, sched, rng, options);
}

PacReport pac_evaluate(const LogDensityFn& phat_log, const GaussianMixture& truth,
                       double epsilon_band, long n_eval, RandomStream rng) {
  if (!(epsilon_band > 0.0)) throw std::invalid_argument("pac_evaluate: band must be positive");
  if (n_eval < 1) throw std::invalid_argument("pac_evaluate: need at least one point");
  long covered = 0;
  RunningStat abs_ratio;
  // Inclusive boundary, with a one-ulp-scale guard so a ratio equal to the
  // band in exact arithmetic counts as covered.
  const double guard = 1e-12 * std::max(1.0, epsilon_band);
  for (long i = 0; i < n_eval; ++i) {
    RandomStream local = rng.derive(static_cast<std::uint64_t>(i));
    const Point x = truth.sample(local);
    const double ratio = phat_log(x) - truth.logdensity(x);
    if (!std::isfinite(ratio)) throw std::domain_error("pac_evaluate: non-finite evaluation");
    abs_ratio.add(std::abs(ratio));
    if (std::abs(ratio) <= epsilon_band + guard) ++covered;
  }
  PacReport report;
  report.epsilon_band = epsilon_band;
  report.coverage = static_cast<double>(covered) / static_cast<double>(n_eval);
  report.n_eval = n_eval;
  report.mean_abs_log_ratio = abs_ratio.mean();
  return report;
}

EntropyEstimate differential_entropy(const ScoreOracle& oracle, const GaussianMixture& truth,
                                     const ScheduleParams& sched, long n, RandomStream rng,
                                     long m_override, int workers) {
  if (n < 10) throw std::invalid_argument("differential_entropy: need n >= 10");
  ScheduleParams local_sched = sched;
  if (m_override > 0) local_sched.m = m_override;
  std::vector<double> values(static_cast<std::size_t>(n));
  RandomStream sample_rng = rng.derive("samples");
  RandomStream est_rng = rng.derive("estimates");
  // Samples are drawn up front so the estimation fan-out cannot reorder them.
  std::vector<Point> xs(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    RandomStream local = sample_rng.derive(static_cast<std::uint64_t>(i));
    xs[static_cast<std::size_t>(i)] = truth.sample(local);
  }
  parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
    const DensityReport rep = log_density_estimate(
        xs[i], oracle, local_sched, est_rng.derive(static_cast<std::uint64_t>(i)));
    values[i] = rep.ell;
  });
  EntropyEstimate est;
  RunningStat stat;
  for (double v : values) stat.add(v);
  est.mean = stat.mean();
  est.median = median(values);
  est.n = n;
  return est;
}

}  // namespace scoredens
