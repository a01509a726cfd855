#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "scoredens/ddpm.hpp"
#include "scoredens/ou.hpp"
#include "scoredens/stats.hpp"

using namespace scoredens;

namespace {

Point pt(double x) {
  Point p(1);
  p << x;
  return p;
}

Eigen::VectorXd theta1(double v) {
  Eigen::VectorXd t(1);
  t << v;
  return t;
}

std::vector<Point> draw_data(const GaussianMixture& mix, long n, RandomStream rng) {
  std::vector<Point> data(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    RandomStream s = rng.derive(static_cast<std::uint64_t>(i));
    data[static_cast<std::size_t>(i)] = mix.sample(s);
  }
  return data;
}

}  // namespace

TEST_SUITE("ddpm") {

TEST_CASE("closed-form risk matches quadrature of the analytic integrand") {
  const ParametricFamily fam = gaussian_location_family();
  const std::vector<Point> data = {pt(0.3), pt(-1.2), pt(2.0)};
  const double T = 3.0;
  const double theta = 0.7;
  double quad_risk = 0.0;
  for (const auto& x : data) {
    const double d2 = (x[0] - theta) * (x[0] - theta);
    quad_risk += integrate(
        [&](double t) {
          const double e2 = std::exp(-2.0 * t);
          return e2 * d2 + (1.0 - e2) - 2.0;
        },
        0.0, T);
  }
  quad_risk /= static_cast<double>(data.size());
  RiskPanel unused;
  CHECK(ddpm_risk(fam, theta1(theta), data, T, unused) ==
        doctest::Approx(quad_risk).epsilon(1e-10));
}

TEST_CASE("monte-carlo risk agrees with the closed form") {
  ParametricFamily fam = gaussian_location_family();
  const double closed = fam.closed_form_risk(theta1(0.5), {pt(1.0), pt(-0.5)}, 2.0);
  fam.closed_form_risk = nullptr;  // force the panel path
  RandomStream rng(2023);
  const RiskPanel panel = make_risk_panel(96, 8, 1e-4, 2.0, rng);
  const RiskValue mc = ddpm_risk_stat(fam, theta1(0.5), {pt(1.0), pt(-0.5)}, 2.0, panel);
  CHECK(mc.stderr_value > 0.0);
  CHECK(std::abs(mc.value - closed) <= 3.0 * mc.stderr_value + 0.05);
}

TEST_CASE("generic mixture path agrees with the scalar fast path") {
  ParametricFamily fam = symmetric_mixture_family();
  RandomStream rng(515);
  const RiskPanel panel = make_risk_panel(32, 2, 1e-3, 1.5, rng);
  const std::vector<Point> data = {pt(1.4), pt(-1.7), pt(0.2)};
  const double fast = ddpm_risk(fam, theta1(1.3), data, 1.5, panel);
  fam.score1d = nullptr;
  const double generic = ddpm_risk(fam, theta1(1.3), data, 1.5, panel);
  CHECK(fast == doctest::Approx(generic).epsilon(1e-10));
}

TEST_CASE("risk vanishes with the horizon") {
  ParametricFamily fam = symmetric_mixture_family();
  RandomStream rng(99);
  const double T = 2e-3;
  const RiskPanel panel = make_risk_panel(16, 2, 1e-4, T, rng);
  const double risk = ddpm_risk(fam, theta1(1.0), {pt(0.4)}, T, panel);
  CHECK(std::abs(risk) < 0.05);
}

TEST_CASE("risk differences ignore the panel for the closed-form family") {
  const ParametricFamily fam = gaussian_location_family();
  const std::vector<Point> data = {pt(0.1), pt(1.1)};
  RandomStream a(1), b(2);
  const RiskPanel panel_a = make_risk_panel(16, 1, 1e-4, 2.0, a);
  const RiskPanel panel_b = make_risk_panel(16, 1, 1e-4, 2.0, b);
  const double diff_a = ddpm_risk(fam, theta1(0.2), data, 2.0, panel_a) -
                        ddpm_risk(fam, theta1(0.9), data, 2.0, panel_a);
  const double diff_b = ddpm_risk(fam, theta1(0.2), data, 2.0, panel_b) -
                        ddpm_risk(fam, theta1(0.9), data, 2.0, panel_b);
  CHECK(diff_a == diff_b);
}

TEST_CASE("theta outside the box is rejected") {
  const ParametricFamily fam = symmetric_mixture_family();
  RandomStream rng(1);
  const RiskPanel panel = make_risk_panel(8, 1, 1e-4, 1.0, rng);
  CHECK_THROWS_AS(ddpm_risk(fam, theta1(7.0), {pt(0.0)}, 1.0, panel), std::invalid_argument);
}

TEST_CASE("fit recovers the sample mean for the location family") {
  const ParametricFamily fam = gaussian_location_family();
  RandomStream rng(808);
  const GaussianMixture truth = fam.mixture_of(theta1(1.3));
  const std::vector<Point> data = draw_data(truth, 400, rng);
  double mean = 0.0;
  for (const auto& x : data) mean += x[0];
  mean /= static_cast<double>(data.size());

  const DdpmFit fit = fit_ddpm(fam, data, 5.0, {}, rng.derive("fit"));
  CHECK(std::abs(fit.theta_hat[0] - mean) < 1e-6);
  CHECK(fit.converged);
  CHECK(!fit.trace.empty());

  // all data equal to c
  const std::vector<Point> constant(100, pt(-2.25));
  const DdpmFit cfit = fit_ddpm(fam, constant, 5.0, {}, rng.derive("cfit"));
  CHECK(std::abs(cfit.theta_hat[0] + 2.25) < 1e-6);
}

TEST_CASE("argmin is stable under risk rescaling and panel seeds") {
  ParametricFamily fam = gaussian_location_family();
  RandomStream rng(4141);
  const std::vector<Point> data = draw_data(fam.mixture_of(theta1(0.4)), 200, rng);
  const DdpmFit base_fit = fit_ddpm(fam, data, 4.0, {}, rng.derive(1));
  ParametricFamily scaled = fam;
  scaled.closed_form_risk = [inner = fam.closed_form_risk](const Eigen::VectorXd& th,
                                                           const std::vector<Point>& d,
                                                           double T) {
    return 17.0 * inner(th, d, T);
  };
  const DdpmFit scaled_fit = fit_ddpm(scaled, data, 4.0, {}, rng.derive(2));
  CHECK(std::abs(base_fit.theta_hat[0] - scaled_fit.theta_hat[0]) < 1e-6);
  const DdpmFit other_panel = fit_ddpm(fam, data, 4.0, {}, rng.derive(3));
  CHECK(std::abs(base_fit.theta_hat[0] - other_panel.theta_hat[0]) < 1e-6);
}

TEST_CASE("fit is consistent for the symmetric mixture") {
  const ParametricFamily fam = symmetric_mixture_family();
  RandomStream rng(606);
  const GaussianMixture truth = fam.mixture_of(theta1(1.5));
  const std::vector<Point> data = draw_data(truth, 5000, rng);
  const DdpmFit fit = fit_ddpm(fam, data, 5.0, {}, rng.derive("fit"));
  CHECK(std::abs(fit.theta_hat[0] - 1.5) < 0.1);
  CHECK(fit.tau0_bias_bound > 0.0);
}

TEST_CASE("fisher information") {
  CHECK(fisher_information(gaussian_location_family(1.0), theta1(0.7))(0, 0) ==
        doctest::Approx(1.0));
  CHECK(fisher_information(gaussian_location_family(2.0), theta1(0.0))(0, 0) ==
        doctest::Approx(0.25));

  const ParametricFamily mixture = symmetric_mixture_family();
  const double quad = fisher_information(mixture, theta1(1.5))(0, 0);
  RandomStream rng(321);
  const FisherMc mc = fisher_information_mc(mixture, theta1(1.5), 400000, rng);
  CHECK(std::abs(quad - mc.value(0, 0)) <= 3.0 * mc.stderr_value(0, 0));
  CHECK(quad > 0.0);
  CHECK(quad < 1.0);  // mixing loses information relative to a single Gaussian
}

TEST_CASE("ddpm-mle gap equals the average transition KL in closed form") {
  const ParametricFamily fam = gaussian_location_family();
  RandomStream rng(753);
  for (int rep = 0; rep < 20; ++rep) {
    RandomStream local = rng.derive(rep);
    const double theta = local.uniform(-2.0, 2.0);
    const std::vector<Point> data =
        draw_data(fam.mixture_of(theta1(local.uniform(-2.0, 2.0))), 50, local.derive("d"));
    const double T = local.uniform(1.0, 6.0);
    const double gap = ddpm_mle_gap(fam, theta1(theta), data, T);
    const double kl = mean_transition_kl(fam, theta1(theta), data, T);
    CHECK(gap == doctest::Approx(kl).epsilon(1e-8));
    CHECK(gap >= 0.0);
  }
}

TEST_CASE("gap obeys the error-term bound and decays in T") {
  const ParametricFamily fam = gaussian_location_family();
  const std::vector<Point> origin = {pt(0.0)};
  const double gap5 = ddpm_mle_gap(fam, theta1(0.0), origin, 5.0);
  CHECK(gap5 >= 0.0);
  CHECK(gap5 <= kl_error_bound(0.0, 1.0, 5.0));
  double prev = 1e300;
  for (double T : {2.0, 4.0, 6.0, 8.0}) {
    const double gap = ddpm_mle_gap(fam, theta1(0.0), origin, T);
    CHECK(gap < prev);
    CHECK(gap <= kl_error_bound(0.0, 1.0, T) + 1e-12);
    prev = gap;
  }
}

TEST_CASE("efficiency smoke test for the location family") {
  const ParametricFamily fam = gaussian_location_family();
  RandomStream rng(111);
  const EfficiencyReport rep =
      efficiency_experiment(fam, theta1(0.5), 500, 150, nullptr, rng);
  CHECK(rep.excluded_trials == 0);
  CHECK(rep.fisher_inv(0, 0) == doctest::Approx(1.0));
  // chi-square spread of a variance estimate over 150 trials
  CHECK(rep.empirical_cov(0, 0) > 0.7);
  CHECK(rep.empirical_cov(0, 0) < 1.35);
  // the DDPM argmin is the sample mean, so the paired errors coincide
  for (std::size_t i = 0; i < rep.scaled_errors.size(); ++i) {
    CHECK(std::abs(rep.scaled_errors[i][0] - rep.mle_scaled_errors[i][0]) < 1e-4);
  }
  CHECK_THROWS_AS(efficiency_experiment(fam, theta1(0.5), 500, 0, nullptr, rng),
                  std::invalid_argument);
}

TEST_CASE("consistency trend: error halves when n quadruples") {
  const ParametricFamily fam = gaussian_location_family();
  RandomStream rng(2500);
  std::vector<double> medians;
  for (long n : {500L, 2000L, 8000L}) {
    std::vector<double> errs;
    const GaussianMixture truth = fam.mixture_of(theta1(1.0));
    for (int trial = 0; trial < 200; ++trial) {
      RandomStream local = rng.derive(static_cast<std::uint64_t>(n)).derive(trial);
      const std::vector<Point> data = draw_data(truth, n, local);
      const DdpmFit fit = fit_ddpm(fam, data, default_terminal_time(n), {}, local.derive(1));
      errs.push_back(std::abs(fit.theta_hat[0] - 1.0));
    }
    medians.push_back(median(errs));
  }
  CHECK(medians[1] / medians[0] > 0.35);
  CHECK(medians[1] / medians[0] < 0.65);
  CHECK(medians[2] / medians[1] > 0.35);
  CHECK(medians[2] / medians[1] < 0.65);
}

TEST_CASE("terminal time rule") {
  CHECK(default_terminal_time(2000) ==
        doctest::Approx(0.5 * std::log(2000.0) + 3.0).epsilon(1e-12));
}

}  // TEST_SUITE
