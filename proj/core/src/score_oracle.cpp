#include "scoredens/score_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "scoredens/stats.hpp"

namespace scoredens {

ScoreOracle exact_oracle(std::shared_ptr<const GaussianMixture> mix, TimeWindow window) {
  ScoreOracle oracle;
  oracle.window = window;
  oracle.eval = [mix, window](double t, const Point& x) -> Point {
    if (!window.contains(t)) {
      throw std::domain_error("ScoreOracle: time outside [tau, T]");
    }
    return mix->score_at_time(t, x);
  };
  oracle.error_profile = [](double) { return 0.0; };
  return oracle;
}

ScoreOracle exact_oracle(const GaussianMixture& mix, TimeWindow window) {
  return exact_oracle(std::make_shared<const GaussianMixture>(mix), window);
}

ScoreOracle biased_oracle(const ScoreOracle& base, const Point& direction,
                          std::function<double(double)> eps) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("biased_oracle: direction must be a unit vector");
  }
  ScoreOracle oracle;
  oracle.window = base.window;
  oracle.eval = [base_eval = base.eval, direction, eps](double t, const Point& x) -> Point {
    const double e = eps(t);
    if (!(e >= 0.0)) throw std::invalid_argument("biased_oracle: negative eps(t)");
    return base_eval(t, x) + e * direction;
  };
  oracle.error_profile = [base_profile = base.error_profile, eps](double t) {
    return base_profile(t) + eps(t);
  };
  return oracle;
}

ScoreOracle random_field_oracle(const ScoreOracle& base, std::function<double(double)> eps,
                                Eigen::Index dim, RandomStream& rng) {
  Point u = rng.normal_vector(dim);
  u.normalize();
  Point a = rng.normal_vector(dim);
  const double phase = rng.uniform(0.0, 6.283185307179586);
  ScoreOracle oracle;
  oracle.window = base.window;
  oracle.eval = [base_eval = base.eval, eps, u, a, phase](double t, const Point& x) -> Point {
    const double e = eps(t);
    if (!(e >= 0.0)) throw std::invalid_argument("random_field_oracle: negative eps(t)");
    return base_eval(t, x) + (e * std::cos(a.dot(x) + phase)) * u;
  };
  oracle.error_profile = eps;
  return oracle;
}

double integrated_error(const ScoreOracle& oracle) {
  const double sq = integrate(
      [&](double t) {
        const double e = oracle.error_profile(t);
        if (!std::isfinite(e)) throw std::domain_error("integrated_error: non-finite profile");
        return e * e;
      },
      oracle.window.tau, oracle.window.T);
  return std::sqrt(std::max(0.0, sq));
}

ScoreOracle time_shifted_oracle(const ScoreOracle& base, double shift) {
  if (!(shift >= 0.0)) throw std::invalid_argument("time_shifted_oracle: negative shift");
  if (!(base.window.T > shift)) {
    throw std::invalid_argument("time_shifted_oracle: shift beyond terminal time");
  }
  ScoreOracle oracle;
  oracle.window = TimeWindow(std::max(0.0, base.window.tau - shift), base.window.T - shift);
  oracle.eval = [base_eval = base.eval, shift](double t, const Point& x) -> Point {
    return base_eval(t + shift, x);
  };
  oracle.error_profile = [base_profile = base.error_profile, shift](double t) {
    return base_profile(t + shift);
  };
  return oracle;
}

}  // namespace scoredens
