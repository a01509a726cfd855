#include "scoredens/ou.hpp"

#include <cmath>
#include <stdexcept>

namespace scoredens {
namespace {

constexpr double kLog2PiE = 2.8378770664093454835606594728112;

}  // namespace

TimeWindow::TimeWindow(double tau_, double T_) : tau(tau_), T(T_) {
  if (!(tau >= 0.0) || !(T > tau) || !std::isfinite(T)) {
    throw std::invalid_argument("TimeWindow: need 0 <= tau < T < inf");
  }
}

double one_minus_exp_neg2(double t) {
  return -std::expm1(-2.0 * t);
}

Point ou_push_point(const Point& x0, const Point& z, double t) {
  if (x0.size() != z.size()) throw std::invalid_argument("ou_push_point: dimension mismatch");
  if (!(t >= 0.0)) throw std::invalid_argument("ou_push_point: negative time");
  return std::exp(-t) * x0 + std::sqrt(one_minus_exp_neg2(t)) * z;
}

Point transition_score(const Point& x0, const Point& xt, double t) {
  if (x0.size() != xt.size()) throw std::invalid_argument("transition_score: dimension mismatch");
  if (!(t > 0.0)) throw std::domain_error("transition_score: kernel is singular at t = 0");
  return -(xt - std::exp(-t) * x0) / one_minus_exp_neg2(t);
}

GaussianParams ou_push_gaussian(const GaussianParams& g, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("ou_push_gaussian: negative time");
  const double decay = std::exp(-2.0 * t);
  Matrix cov = decay * g.cov();
  cov.diagonal().array() += one_minus_exp_neg2(t);
  return GaussianParams(std::exp(-t) * g.mean(), std::move(cov));
}

double identity_constant(int d, double T) {
  if (d <= 0) throw std::invalid_argument("identity_constant: dimension must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("identity_constant: T must be positive");
  return static_cast<double>(d) * (T + 0.5 * (kLog2PiE + std::log1p(-std::exp(-2.0 * T))));
}

double kl_error_bound(double x0_sqnorm, double M2, double T) {
  if (!(M2 >= 0.0)) throw std::invalid_argument("kl_error_bound: negative second moment");
  if (!(T > 0.0)) throw std::invalid_argument("kl_error_bound: T must be positive");
  return (x0_sqnorm + M2) / std::expm1(2.0 * T);
}

double kl_error_bound(const Point& x0, double M2, double T) {
  return kl_error_bound(x0.squaredNorm(), M2, T);
}

Point heatflow_to_ou_score(const HeatScoreFn& heat_score, double t, const Point& xt) {
  if (!(t > 0.0)) throw std::domain_error("heatflow_to_ou_score: t must be positive");
  const double et = std::exp(t);
  return et * heat_score(std::expm1(2.0 * t), et * xt);
}

}  // namespace scoredens
