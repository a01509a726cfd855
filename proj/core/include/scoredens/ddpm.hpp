#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scoredens/mixture.hpp"
#include "scoredens/rng.hpp"

namespace scoredens {

//! Exact score of P_{theta,t} at a scalar point; d = 1 fast path for the risk
//! Monte Carlo. The factory is called once per (theta, time) pair.
using Score1dAtTime = std::function<double(double x)>;
using Score1dFactory = std::function<Score1dAtTime(const Eigen::VectorXd& theta, double t)>;

//! Parametric family {P_theta} over a bounded box, given by its mixture form.
//! Optional closed forms short-circuit the Monte-Carlo machinery where the
//! risk or the MLE is available analytically.
struct ParametricFamily {
  std::string name;
  int param_dim = 1;
  std::function<GaussianMixture(const Eigen::VectorXd& theta)> mixture_of;
  Matrix theta_bounds;  // param_dim x 2 box: column 0 = lower, column 1 = upper

  Score1dFactory score1d;  // optional, d = 1 only
  std::function<double(const Eigen::VectorXd& theta, const std::vector<Point>& data, double T)>
      closed_form_risk;  // optional: exact DDPM risk, integrated from 0
  std::function<Eigen::VectorXd(const std::vector<Point>& data)> closed_form_mle;  // optional
  std::function<Matrix(const Eigen::VectorXd& theta)> fisher_exact;               // optional

  bool in_bounds(const Eigen::VectorXd& theta) const;
};

//! N(theta, sigma^2) location family on the line; closed-form risk for
//! sigma = 1, exact Fisher information 1/sigma^2, MLE = sample mean.
ParametricFamily gaussian_location_family(double sigma = 1.0);

//! Symmetric two-component mixture (N(theta, 1) + N(-theta, 1)) / 2.
ParametricFamily symmetric_mixture_family();

//! Shared-random-number Monte-Carlo panel for the DDPM risk: a stratified time
//! grid on [tau0, T] shared by all data points, with n_z fresh noise draws per
//! (data point, time). Fixed across every theta evaluated within one fit.
struct RiskPanel {
  std::vector<double> times;
  double tau0 = 1e-4;
  double T = 1.0;
  int n_z = 1;
  std::uint64_t noise_key = 0;  // z_{ij} derive from (noise_key, i, j)
};

RiskPanel make_risk_panel(int n_t, int n_z, double tau0, double T, RandomStream rng);

struct RiskValue {
  double value = 0.0;
  double stderr_value = 0.0;  // Monte-Carlo stderr across panel pairs
};

//! Empirical DDPM risk of Def-2 form, averaged over the data, with the inner
//! expectation and time integral evaluated on the shared panel. Uses the
//! family's closed form when available.
RiskValue ddpm_risk_stat(const ParametricFamily& family, const Eigen::VectorXd& theta,
                         const std::vector<Point>& data, double T, const RiskPanel& panel);
double ddpm_risk(const ParametricFamily& family, const Eigen::VectorXd& theta,
                 const std::vector<Point>& data, double T, const RiskPanel& panel);

struct OptimizerConfig {
  int grid_points = 13;    // bracketing grid per coordinate
  double param_tol = 1e-7;
  int max_iters = 500;
  int n_t = 64;            // panel strata
  int n_z = 2;             // noise draws per (point, time)
  double tau0 = 1e-4;      // panel time grid start
};

struct DdpmFit {
  Eigen::VectorXd theta_hat;
  double objective_value = 0.0;
  long n = 0;
  double T = 0.0;
  std::vector<std::pair<Eigen::VectorXd, double>> trace;
  bool converged = false;
  double tau0_bias_bound = 0.0;  // L d tau0 + sqrt(L) d sqrt(tau0) at theta_hat
};

//! Minimizes the empirical DDPM risk over the family's box: bracketing grid
//! plus golden section for one parameter, Nelder-Mead restarted from three
//! grid seeds for up to four.
DdpmFit fit_ddpm(const ParametricFamily& family, const std::vector<Point>& data, double T,
                 const OptimizerConfig& cfg, RandomStream rng);

//! Fisher information at an interior theta. Exact when the family provides it,
//! otherwise adaptive quadrature (d = 1) with central finite differences in
//! theta at step 1e-5. Throws on a singular result.
Matrix fisher_information(const ParametricFamily& family, const Eigen::VectorXd& theta);

struct FisherMc {
  Matrix value;
  Matrix stderr_value;
};
//! Monte-Carlo Fisher information with reported stderr; the independent
//! cross-check for the quadrature path.
FisherMc fisher_information_mc(const ParametricFamily& family, const Eigen::VectorXd& theta,
                               long n, RandomStream rng);

struct EfficiencyReport {
  int trials = 0;
  long n = 0;
  double T = 0.0;
  std::vector<Eigen::VectorXd> scaled_errors;      // sqrt(n) (theta_hat - theta*)
  std::vector<Eigen::VectorXd> mle_scaled_errors;  // paired MLE (or proxy) errors
  Matrix empirical_cov;
  Matrix fisher_inv;
  double spectral_ratio = 0.0;  // ||emp - I^{-1}||_2 / ||I^{-1}||_2
  int excluded_trials = 0;
};

using TerminalTimeRule = std::function<double(long n)>;

//! T_n = log(n)/2 + 3; diverges from log(n)/2 as the theorem requires.
double default_terminal_time(long n);

//! Repeats: draw n samples from P_{theta*}, fit, record sqrt(n)(theta_hat -
//! theta*). Trials use streams derived by index and reduce in index order.
EfficiencyReport efficiency_experiment(const ParametricFamily& family,
                                       const Eigen::VectorXd& theta_star, long n, int trials,
                                       const TerminalTimeRule& t_rule, RandomStream rng,
                                       const OptimizerConfig& cfg = {}, int workers = 1);

//! hat R^MLE(theta) - hat R^DDPM(theta) - C_{d,T}; equals the average
//! KL(Q_{T|0}(.|X_i) || P_{theta,T}) exactly and is bounded by the average
//! kl_error_bound. Uses the closed-form risk when available, else the panel.
double ddpm_mle_gap(const ParametricFamily& family, const Eigen::VectorXd& theta,
                    const std::vector<Point>& data, double T,
                    const RiskPanel* panel = nullptr);

//! Average KL(Q_{T|0}(.|X_i) || P_{theta,T}) in closed form; requires a
//! single-component family.
double mean_transition_kl(const ParametricFamily& family, const Eigen::VectorXd& theta,
                          const std::vector<Point>& data, double T);

}  // namespace scoredens
