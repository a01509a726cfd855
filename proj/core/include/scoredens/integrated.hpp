#pragma once

#include "scoredens/mixture.hpp"
#include "scoredens/rng.hpp"
#include "scoredens/score_oracle.hpp"

namespace scoredens {

//! Monte-Carlo estimate of the integrated score matching value v(x0).
struct IntegratedEstimate {
  double value = 0.0;
  double stderr_value = 0.0;  // sample stderr of the mean, scaled by (T - tau)
  long m = 0;
};

//! Derived schedule for a target accuracy epsilon:
//!   tau  = eps^2 / (L d^2)
//!   T    = max(1, log(1 + 2 M2 / eps) / 2)
//!   m    = ceil(d^2 (T^2 + L T log(d^2/eps^2)) / eps^2)
//!   eps* = eps / sqrt(d (T + log(L d^2 / eps^2)))
//! with every asymptotic constant set to 1 and L clamped up to >= 1.
struct ScheduleParams {
  double epsilon = 0.0;
  double L = 1.0;
  double M2 = 0.0;
  int d = 1;
  double tau = 0.0;
  double T = 0.0;
  long m = 0;
  double eps_star = 0.0;

  TimeWindow window() const { return TimeWindow(tau, T); }
};

ScheduleParams default_schedule(double epsilon, const RegularityConstants& constants, int d);

struct EstimateVOptions {
  bool stratified = false;  // one draw per equal stratum instead of i.i.d. times
  int workers = 1;
};

//! hat v(x0) = (T - tau)/m * sum_i { ||s(t_i, x_i)||^2 - 2 <s(t_i, x_i), q_i> }
//! with t_i uniform on [tau, T], x_i = e^{-t_i} x0 + sqrt(1-e^{-2 t_i}) z_i and
//! q_i = -z_i / sqrt(1 - e^{-2 t_i}) the transition score.
//!
//! Summand i always uses the stream derived from (rng, i) and the reduction is
//! done in index order, so the result is bitwise identical for any worker
//! count.
IntegratedEstimate estimate_v(const Point& x0, const ScoreOracle& oracle, long m,
                              RandomStream rng, const EstimateVOptions& options = {});

}  // namespace scoredens
