#include "scoredens/integrated.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scoredens/stats.hpp"

namespace scoredens {

ScheduleParams default_schedule(double epsilon, const RegularityConstants& constants, int d) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("default_schedule: epsilon must lie in (0, 1)");
  }
  if (d <= 0) throw std::invalid_argument("default_schedule: dimension must be positive");
  ScheduleParams p;
  p.epsilon = epsilon;
  p.L = std::max(1.0, constants.L);
  p.M2 = constants.M2;
  p.d = d;
  const double dd = static_cast<double>(d) * static_cast<double>(d);
  p.tau = epsilon * epsilon / (p.L * dd);
  p.T = std::max(1.0, 0.5 * std::log1p(2.0 * p.M2 / epsilon));
  const double log_term = std::log(dd / (epsilon * epsilon));
  p.m = static_cast<long>(
      std::ceil(dd * (p.T * p.T + p.L * p.T * log_term) / (epsilon * epsilon)));
  p.eps_star = epsilon / std::sqrt(static_cast<double>(d) * (p.T + std::log(p.L * dd / (epsilon * epsilon))));
  return p;
}

IntegratedEstimate estimate_v(const Point& x0, const ScoreOracle& oracle, long m,
                              RandomStream rng, const EstimateVOptions& options) {
  if (m < 2) throw std::invalid_argument("estimate_v: need at least 2 samples");
  const TimeWindow w = oracle.window;
  const double span = w.length();
  const Eigen::Index d = x0.size();

  std::vector<double> summands(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), options.workers, [&](std::size_t i) {
    RandomStream local = rng.derive(static_cast<std::uint64_t>(i));
    double t;
    if (options.stratified) {
      t = w.tau + span * (static_cast<double>(i) + local.uniform()) / static_cast<double>(m);
    } else {
      t = local.uniform(w.tau, w.T);
    }
    const Point z = local.normal_vector(d);
    const double beta = one_minus_exp_neg2(t);
    const Point xt = std::exp(-t) * x0 + std::sqrt(beta) * z;
    const Point s = oracle.eval(t, xt);
    // transition score along this draw: q = -z / sqrt(1 - e^{-2t})
    summands[i] = s.squaredNorm() + 2.0 * s.dot(z) / std::sqrt(beta);
  });

  RunningStat stat;
  for (double v : summands) stat.add(v);
  IntegratedEstimate est;
  est.value = span * stat.mean();
  est.stderr_value = span * stat.stderr_mean();
  est.m = m;
  return est;
}

}  // namespace scoredens
