#pragma once

#include <functional>
#include <memory>

#include "scoredens/mixture.hpp"
#include "scoredens/ou.hpp"
#include "scoredens/rng.hpp"

namespace scoredens {

//! A score estimate hat{s}_t(x) along the OU process, total on its window,
//! together with the declared per-time L^2(P_t) error profile eps_t.
//!
//! Evaluation is pure and reentrant; oracles are freely shared across threads.
struct ScoreOracle {
  std::function<Point(double t, const Point& x)> eval;
  TimeWindow window;
  std::function<double(double t)> error_profile;
};

//! Oracle returning the exact score of the mixture; error profile is zero.
//! Evaluation outside the window is a domain error.
ScoreOracle exact_oracle(std::shared_ptr<const GaussianMixture> mix, TimeWindow window);
ScoreOracle exact_oracle(const GaussianMixture& mix, TimeWindow window);

//! Adds eps(t) * direction to the base oracle. The perturbation is constant in
//! x, so the L^2(P_t) error is eps(t) exactly and is declared as such.
ScoreOracle biased_oracle(const ScoreOracle& base, const Point& direction,
                          std::function<double(double)> eps);

//! Adds eps(t) * u * cos(<a, x> + phase) with (u, a, phase) drawn once at
//! construction. The declared profile eps(t) is only an upper bound on the
//! realized L^2(P_t) error; meant for robustness sweeps.
ScoreOracle random_field_oracle(const ScoreOracle& base, std::function<double(double)> eps,
                                Eigen::Index dim, RandomStream& rng);

//! sqrt(integral of eps_t^2 over [tau, T]) of the declared profile.
double integrated_error(const ScoreOracle& oracle);

//! Oracle for the early-stopped target P_shift viewed as a new initial law:
//! (P_shift)_t = P_{shift+t}, so evaluation at t queries the base at shift + t.
ScoreOracle time_shifted_oracle(const ScoreOracle& base, double shift);

}  // namespace scoredens
