#pragma once

#include <functional>

#include "scoredens/gaussian.hpp"

namespace scoredens {

//! Early-stopping time tau and terminal time T with 0 <= tau < T.
struct TimeWindow {
  double tau = 0.0;
  double T = 1.0;

  TimeWindow() = default;
  TimeWindow(double tau_, double T_);
  bool contains(double t) const { return t >= tau && t <= T; }
  double length() const { return T - tau; }
};

//! 1 - e^{-2t}, computed stably for small t.
double one_minus_exp_neg2(double t);

//! e^{-t} x0 + sqrt(1 - e^{-2t}) z.
Point ou_push_point(const Point& x0, const Point& z, double t);

//! Score of the transition kernel: -(xt - e^{-t} x0) / (1 - e^{-2t}).
//! The kernel is a point mass at t = 0, so t must be positive.
Point transition_score(const Point& x0, const Point& xt, double t);

//! Time-t marginal of a Gaussian component: N(e^{-t} mu, e^{-2t} Sigma + (1 - e^{-2t}) Id).
GaussianParams ou_push_gaussian(const GaussianParams& g, double t);

//! d * (T + log(2 pi e (1 - e^{-2T})) / 2), the constant relating the
//! integrated score matching value to the negative log-density.
double identity_constant(int d, double T);

//! (||x0||^2 + M2) / (e^{2T} - 1), an upper bound on KL(Q_{T|0}(.|x0) || P_T).
double kl_error_bound(const Point& x0, double M2, double T);
double kl_error_bound(double x0_sqnorm, double M2, double T);

//! Score estimate along the heat flow P * N(0, s Id), evaluated at heat time s.
using HeatScoreFn = std::function<Point(double s, const Point& x)>;

//! Converts a heat-flow score estimate to an OU score estimate at time t > 0.
//!
//! Uses X_t = e^{-t} (X_0 + sqrt(e^{2t} - 1) Z): the OU marginal is the
//! e^{-t}-rescaled heat-flow marginal at heat time e^{2t} - 1, so
//! s_t(x) = e^t * s~_{e^{2t}-1}(e^t x). Exact heat-flow scores map to exact
//! OU scores.
Point heatflow_to_ou_score(const HeatScoreFn& heat_score, double t, const Point& xt);

}  // namespace scoredens
