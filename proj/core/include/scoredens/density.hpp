#pragma once

#include <functional>
#include <vector>

#include "scoredens/integrated.hpp"

namespace scoredens {

//! Per-point log-density estimate: ell estimates -log P(x0), so the density
//! model is hat P(x0) = exp(-ell). Kept in log space throughout.
struct DensityReport {
  Point x0;
  double ell = 0.0;
  double phat_log = 0.0;  // always exactly -ell
  double stderr_value = 0.0;
};

//! Coverage of the multiplicative band e^{+-epsilon_band} and the absolute
//! log-ratio risk over fresh samples from the target.
struct PacReport {
  double epsilon_band = 0.0;
  double coverage = 0.0;
  long n_eval = 0;
  double mean_abs_log_ratio = 0.0;
};

//! ell(x0) = hat v(x0) + d (T + log(2 pi e (1 - e^{-2T})) / 2).
DensityReport log_density_estimate(const Point& x0, const ScoreOracle& oracle,
                                   const ScheduleParams& sched, RandomStream rng,
                                   const EstimateVOptions& options = {});

//! Estimates -log P_tau(x0) by running the pipeline against the early-stopped
//! target: (P_tau)_t = P_{tau + t}, so the base oracle is queried at shifted
//! times and no separate oracle is needed.
DensityReport early_stopped_estimate(const Point& x0, const ScoreOracle& oracle, double tau,
                                     const ScheduleParams& sched, RandomStream rng,
                                     const EstimateVOptions& options = {});

using LogDensityFn = std::function<double(const Point&)>;

//! Draws n_eval fresh points from `truth` and reports the fraction whose
//! absolute log-ratio |phat_log(x) + (-log truth(x))| lies within the band.
//! The band check is inclusive at the boundary.
PacReport pac_evaluate(const LogDensityFn& phat_log, const GaussianMixture& truth,
                       double epsilon_band, long n_eval, RandomStream rng);

struct EntropyEstimate {
  double mean = 0.0;    // the analyzed statistic
  double median = 0.0;  // the stated estimator
  long n = 0;
};

//! Differential entropy via n draws X_i from the sampler and the per-point
//! estimates -log hat P(X_i) = ell(X_i).
EntropyEstimate differential_entropy(const ScoreOracle& oracle, const GaussianMixture& truth,
                                     const ScheduleParams& sched, long n, RandomStream rng,
                                     long m_override = 0, int workers = 1);

}  // namespace scoredens
