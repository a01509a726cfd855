#include "scoredens/ddpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scoredens/ou.hpp"
#include "scoredens/stats.hpp"

namespace scoredens {
namespace {

constexpr double kGoldenRatio = 0.61803398874989484820;

double clamp_to(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

}  // namespace

bool ParametricFamily::in_bounds(const Eigen::VectorXd& theta) const {
  if (theta.size() != param_dim) return false;
  for (int i = 0; i < param_dim; ++i) {
    if (theta[i] < theta_bounds(i, 0) || theta[i] > theta_bounds(i, 1)) return false;
  }
  return true;
}

ParametricFamily gaussian_location_family(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_location_family: sigma > 0 required");
  ParametricFamily f;
  f.name = "gaussian-location";
  f.param_dim = 1;
  f.theta_bounds = Matrix(1, 2);
  f.theta_bounds << -100.0, 100.0;
  const double var = sigma * sigma;
  f.mixture_of = [var](const Eigen::VectorXd& theta) {
    Point mean(1);
    mean << theta[0];
    return GaussianMixture({1.0}, {GaussianParams::spherical(mean, var)});
  };
  f.score1d = [var](const Eigen::VectorXd& theta, double t) -> Score1dAtTime {
    const double m = std::exp(-t) * theta[0];
    const double v = std::exp(-2.0 * t) * var + one_minus_exp_neg2(t);
    return [m, v](double x) { return -(x - m) / v; };
  };
  if (sigma == 1.0) {
    f.closed_form_risk = [](const Eigen::VectorXd& theta, const std::vector<Point>& data,
                            double T) {
      const double a = 0.5 * one_minus_exp_neg2(T);
      double acc = 0.0;
      for (const auto& x : data) {
        const double delta = x[0] - theta[0];
        acc += delta * delta;
      }
      return a * acc / static_cast<double>(data.size()) - T - a;
    };
  }
  f.closed_form_mle = [](const std::vector<Point>& data) {
    double acc = 0.0;
    for (const auto& x : data) acc += x[0];
    Eigen::VectorXd theta(1);
    theta << acc / static_cast<double>(data.size());
    return theta;
  };
  f.fisher_exact = [var](const Eigen::VectorXd&) {
    Matrix info(1, 1);
    info << 1.0 / var;
    return info;
  };
  return f;
}

ParametricFamily symmetric_mixture_family() {
  ParametricFamily f;
  f.name = "symmetric-mixture";
  f.param_dim = 1;
  f.theta_bounds = Matrix(1, 2);
  f.theta_bounds << 0.05, 5.0;
  f.mixture_of = [](const Eigen::VectorXd& theta) {
    Point mp(1), mm(1);
    mp << theta[0];
    mm << -theta[0];
    return GaussianMixture({0.5, 0.5}, {GaussianParams::spherical(mp, 1.0),
                                        GaussianParams::spherical(mm, 1.0)});
  };
  // Unit-variance components keep unit variance under the OU push, so the
  // time-t score collapses to -x + a tanh(a x) with a = e^{-t} theta.
  f.score1d = [](const Eigen::VectorXd& theta, double t) -> Score1dAtTime {
    const double a = std::exp(-t) * theta[0];
    return [a](double x) { return -x + a * std::tanh(a * x); };
  };
  return f;
}

RiskPanel make_risk_panel(int n_t, int n_z, double tau0, double T, RandomStream rng) {
  if (n_t < 1 || n_z < 1) throw std::invalid_argument("make_risk_panel: empty panel");
  if (!(tau0 > 0.0) || !(T > tau0)) throw std::invalid_argument("make_risk_panel: need 0 < tau0 < T");
  RiskPanel panel;
  panel.tau0 = tau0;
  panel.T = T;
  panel.n_z = n_z;
  RandomStream time_rng = rng.derive("times");
  panel.times.resize(static_cast<std::size_t>(n_t));
  const double width = (T - tau0) / static_cast<double>(n_t);
  for (int j = 0; j < n_t; ++j) {
    panel.times[static_cast<std::size_t>(j)] =
        tau0 + width * (static_cast<double>(j) + time_rng.uniform());
  }
  panel.noise_key = rng.derive("noise").key();
  return panel;
}

namespace {

// Shared z draw for panel cell (i, j, l); identical across theta by key.
double panel_z1(std::uint64_t key, std::size_t i, std::size_t j, int l) {
  RandomStream s = RandomStream(key).derive(i).derive(j * 64 + static_cast<std::size_t>(l));
  return s.normal();
}

Point panel_z(std::uint64_t key, std::size_t i, std::size_t j, int l, Eigen::Index d) {
  RandomStream s = RandomStream(key).derive(i).derive(j * 64 + static_cast<std::size_t>(l));
  return s.normal_vector(d);
}

RiskValue panel_risk(const ParametricFamily& family, const Eigen::VectorXd& theta,
                     const std::vector<Point>& data, const RiskPanel& panel) {
  const std::size_t n = data.size();
  const std::size_t n_t = panel.times.size();
  const Eigen::Index d = data.front().size();
  const double span = panel.T - panel.tau0;

  RunningStat cells;  // per (j, l) averages over the data
  if (family.score1d && d == 1) {
    for (std::size_t j = 0; j < n_t; ++j) {
      const double t = panel.times[j];
      const double decay = std::exp(-t);
      const double b = std::sqrt(one_minus_exp_neg2(t));
      const Score1dAtTime score = family.score1d(theta, t);
      for (int l = 0; l < panel.n_z; ++l) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double z = panel_z1(panel.noise_key, i, j, l);
          const double x = decay * data[i][0] + b * z;
          const double s = score(x);
          acc += s * (s + 2.0 * z / b);
        }
        cells.add(acc / static_cast<double>(n));
      }
    }
  } else {
    const GaussianMixture mix = family.mixture_of(theta);
    for (std::size_t j = 0; j < n_t; ++j) {
      const double t = panel.times[j];
      const double decay = std::exp(-t);
      const double b = std::sqrt(one_minus_exp_neg2(t));
      for (int l = 0; l < panel.n_z; ++l) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const Point z = panel_z(panel.noise_key, i, j, l, d);
          const Point x = decay * data[i] + b * z;
          const Point s = mix.score_at_time(t, x);
          acc += s.squaredNorm() + 2.0 * s.dot(z) / b;
        }
        cells.add(acc / static_cast<double>(n));
      }
    }
  }
  RiskValue rv;
  rv.value = span * cells.mean();
  rv.stderr_value = span * cells.stderr_mean();
  return rv;
}

}  // namespace

RiskValue ddpm_risk_stat(const ParametricFamily& family, const Eigen::VectorXd& theta,
                         const std::vector<Point>& data, double T, const RiskPanel& panel) {
  if (data.empty()) throw std::invalid_argument("ddpm_risk: empty data");
  if (!(T > 0.0)) throw std::invalid_argument("ddpm_risk: T must be positive");
  if (!family.in_bounds(theta)) throw std::invalid_argument("ddpm_risk: theta out of bounds");
  if (family.closed_form_risk) {
    return RiskValue{family.closed_form_risk(theta, data, T), 0.0};
  }
  if (std::abs(panel.T - T) > 1e-12) {
    throw std::invalid_argument("ddpm_risk: panel terminal time does not match T");
  }
  return panel_risk(family, theta, data, panel);
}

double ddpm_risk(const ParametricFamily& family, const Eigen::VectorXd& theta,
                 const std::vector<Point>& data, double T, const RiskPanel& panel) {
  return ddpm_risk_stat(family, theta, data, T, panel).value;
}

namespace {

using Objective = std::function<double(const Eigen::VectorXd&)>;

DdpmFit minimize_1d(const Objective& f, double lo, double hi, const OptimizerConfig& cfg) {
  DdpmFit fit;
  auto eval = [&](double x) {
    Eigen::VectorXd theta(1);
    theta << x;
    const double v = f(theta);
    fit.trace.emplace_back(theta, v);
    return v;
  };

  const int grid_n = std::max(3, cfg.grid_points);
  double best_x = lo, best_v = std::numeric_limits<double>::infinity();
  int best_idx = 0;
  std::vector<double> xs(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) {
    xs[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
    const double v = eval(xs[static_cast<std::size_t>(i)]);
    if (v < best_v) {
      best_v = v;
      best_x = xs[static_cast<std::size_t>(i)];
      best_idx = i;
    }
  }
  double a = xs[static_cast<std::size_t>(std::max(0, best_idx - 1))];
  double b = xs[static_cast<std::size_t>(std::min(grid_n - 1, best_idx + 1))];

  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  int iters = 0;
  while (b - a > cfg.param_tol && iters < cfg.max_iters) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGoldenRatio * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGoldenRatio * (b - a);
      f2 = eval(x2);
    }
    ++iters;
  }
  const double xm = 0.5 * (a + b);
  const double fm = eval(xm);
  fit.theta_hat = Eigen::VectorXd(1);
  fit.theta_hat << (fm < std::min(f1, f2) ? xm : (f1 < f2 ? x1 : x2));
  fit.objective_value = std::min({fm, f1, f2, best_v});
  fit.converged = (b - a) <= cfg.param_tol;
  return fit;
}

DdpmFit minimize_simplex(const Objective& f, const Matrix& bounds, const OptimizerConfig& cfg,
                         RandomStream rng) {
  const int p = static_cast<int>(bounds.rows());
  DdpmFit fit;
  auto eval = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd clamped = theta;
    for (int i = 0; i < p; ++i) clamped[i] = clamp_to(clamped[i], bounds(i, 0), bounds(i, 1));
    const double v = f(clamped);
    fit.trace.emplace_back(clamped, v);
    return v;
  };

  Eigen::VectorXd best;
  double best_v = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int restart = 0; restart < 3; ++restart) {
    Eigen::VectorXd seed(p);
    for (int i = 0; i < p; ++i) {
      const double frac = restart == 0 ? 0.5 : (restart == 1 ? 0.25 : 0.75);
      seed[i] = bounds(i, 0) + frac * (bounds(i, 1) - bounds(i, 0));
      seed[i] += 0.02 * (bounds(i, 1) - bounds(i, 0)) * (rng.uniform() - 0.5);
    }
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(p + 1), seed);
    for (int i = 0; i < p; ++i) {
      simplex[static_cast<std::size_t>(i + 1)][i] += 0.1 * (bounds(i, 1) - bounds(i, 0));
    }
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      std::vector<std::size_t> order(simplex.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t lo = order.front(), hi = order.back(), second_hi = order[order.size() - 2];

      double diameter = 0.0;
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        diameter = std::max(diameter, (simplex[order[i]] - simplex[lo]).norm());
      }
      if (diameter < cfg.param_tol) {
        converged = true;
        break;
      }

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
      for (std::size_t i = 0; i < simplex.size(); ++i) {
        if (i != hi) centroid += simplex[i];
      }
      centroid /= static_cast<double>(p);

      const Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
      const double fr = eval(reflected);
      if (fr < values[lo]) {
        const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[hi]);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[hi] = expanded;
          values[hi] = fe;
        } else {
          simplex[hi] = reflected;
          values[hi] = fr;
        }
      } else if (fr < values[second_hi]) {
        simplex[hi] = reflected;
        values[hi] = fr;
      } else {
        const Eigen::VectorXd contracted = centroid + 0.5 * (simplex[hi] - centroid);
        const double fc = eval(contracted);
        if (fc < values[hi]) {
          simplex[hi] = contracted;
          values[hi] = fc;
        } else {
          for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == lo) continue;
            simplex[i] = simplex[lo] + 0.5 * (simplex[i] - simplex[lo]);
            values[i] = eval(simplex[i]);
          }
        }
      }
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (values[i] < best_v) {
        best_v = values[i];
        best = simplex[i];
      }
    }
  }
  fit.theta_hat = best;
  fit.objective_value = best_v;
  fit.converged = converged;
  return fit;
}

}  // namespace

DdpmFit fit_ddpm(const ParametricFamily& family, const std::vector<Point>& data, double T,
                 const OptimizerConfig& cfg, RandomStream rng) {
  if (data.empty()) throw std::invalid_argument("fit_ddpm: empty data");
  if (!(T > 0.0)) throw std::invalid_argument("fit_ddpm: T must be positive");
  if (family.param_dim > 4) throw std::invalid_argument("fit_ddpm: param_dim > 4 unsupported");

  RiskPanel panel;
  if (!family.closed_form_risk) {
    panel = make_risk_panel(cfg.n_t, cfg.n_z, cfg.tau0, T, rng.derive("panel"));
  }
  Objective objective = [&](const Eigen::VectorXd& theta) {
    return ddpm_risk(family, theta, data, T, panel);
  };

  DdpmFit fit;
  if (family.param_dim == 1) {
    fit = minimize_1d(objective, family.theta_bounds(0, 0), family.theta_bounds(0, 1), cfg);
  } else {
    fit = minimize_simplex(objective, family.theta_bounds, cfg, rng.derive("simplex"));
  }
  fit.n = static_cast<long>(data.size());
  fit.T = T;
  const RegularityConstants rc = family.mixture_of(fit.theta_hat).regularity_constants();
  const double L = std::max(1.0, rc.L);
  const double d = static_cast<double>(data.front().size());
  fit.tau0_bias_bound = family.closed_form_risk
                            ? 0.0
                            : L * d * cfg.tau0 + std::sqrt(L) * d * std::sqrt(cfg.tau0);
  return fit;
}

Matrix fisher_information(const ParametricFamily& family, const Eigen::VectorXd& theta) {
  if (!family.in_bounds(theta)) throw std::invalid_argument("fisher_information: theta out of bounds");
  if (family.fisher_exact) return family.fisher_exact(theta);
  const GaussianMixture mix = family.mixture_of(theta);
  if (family.param_dim == 1 && mix.dim() == 1) {
    const double h = 1e-5;
    Eigen::VectorXd tp = theta, tm = theta;
    tp[0] += h;
    tm[0] -= h;
    const GaussianMixture mix_p = family.mixture_of(tp);
    const GaussianMixture mix_m = family.mixture_of(tm);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sigma_max = 0.0;
    for (const auto& c : mix.components()) {
      lo = std::min(lo, c.mean()[0]);
      hi = std::max(hi, c.mean()[0]);
      sigma_max = std::max(sigma_max, std::sqrt(c.cov()(0, 0)));
    }
    const double pad = 12.0 * sigma_max;
    Point x(1);
    const double value = integrate(
        [&](double t) {
          x[0] = t;
          const double grad = (mix_p.logdensity(x) - mix_m.logdensity(x)) / (2.0 * h);
          return grad * grad * std::exp(mix.logdensity(x));
        },
        lo - pad, hi + pad);
    if (!(value > 1e-12)) throw std::runtime_error("fisher_information: singular information");
    Matrix info(1, 1);
    info << value;
    return info;
  }
  FisherMc mc = fisher_information_mc(family, theta, 1000000, RandomStream(0x5ca1ab1e));
  return mc.value;
}

FisherMc fisher_information_mc(const ParametricFamily& family, const Eigen::VectorXd& theta,
                               long n, RandomStream rng) {
  if (n < 2) throw std::invalid_argument("fisher_information_mc: need n >= 2");
  const int p = family.param_dim;
  const double h = 1e-5;
  std::vector<GaussianMixture> plus, minus;
  for (int k = 0; k < p; ++k) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    plus.push_back(family.mixture_of(tp));
    minus.push_back(family.mixture_of(tm));
  }
  const GaussianMixture mix = family.mixture_of(theta);
  Matrix mean = Matrix::Zero(p, p);
  Matrix m2 = Matrix::Zero(p, p);
  Eigen::VectorXd grad(p);
  for (long i = 0; i < n; ++i) {
    const Point x = mix.sample(rng);
    for (int k = 0; k < p; ++k) {
      grad[k] = (plus[static_cast<std::size_t>(k)].logdensity(x) -
                 minus[static_cast<std::size_t>(k)].logdensity(x)) /
                (2.0 * h);
    }
    const Matrix outer = grad * grad.transpose();
    const Matrix delta = outer - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta.cwiseProduct(outer - mean);
  }
  FisherMc result;
  result.value = mean;
  result.stderr_value =
      (m2 / static_cast<double>(n - 1)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(static_cast<double>(n));
  return result;
}

double default_terminal_time(long n) { return 0.5 * std::log(static_cast<double>(n)) + 3.0; }

EfficiencyReport efficiency_experiment(const ParametricFamily& family,
                                       const Eigen::VectorXd& theta_star, long n, int trials,
                                       const TerminalTimeRule& t_rule, RandomStream rng,
                                       const OptimizerConfig& cfg, int workers) {
  if (trials < 100) throw std::invalid_argument("efficiency_experiment: need trials >= 100");
  if (n < 2) throw std::invalid_argument("efficiency_experiment: need n >= 2");
  if (!family.in_bounds(theta_star)) {
    throw std::invalid_argument("efficiency_experiment: theta_star out of bounds");
  }
  const double T = (t_rule ? t_rule : default_terminal_time)(n);
  const GaussianMixture truth = family.mixture_of(theta_star);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const int p = family.param_dim;

  struct TrialResult {
    Eigen::VectorXd err, mle_err;
    bool ok = false;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  RandomStream trial_rng = rng.derive("trials");

  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t tr) {
    RandomStream local = trial_rng.derive(tr);
    RandomStream data_rng = local.derive("data");
    std::vector<Point> data(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      RandomStream s = data_rng.derive(static_cast<std::uint64_t>(i));
      data[static_cast<std::size_t>(i)] = truth.sample(s);
    }
    try {
      const DdpmFit fit = fit_ddpm(family, data, T, cfg, local.derive("fit"));
      Eigen::VectorXd mle;
      if (family.closed_form_mle) {
        mle = family.closed_form_mle(data);
      } else {
        ParametricFamily nll_family = family;
        nll_family.closed_form_risk = [&family](const Eigen::VectorXd& theta,
                                                const std::vector<Point>& pts, double) {
          const GaussianMixture m = family.mixture_of(theta);
          double acc = 0.0;
          for (const auto& x : pts) acc -= m.logdensity(x);
          return acc / static_cast<double>(pts.size());
        };
        mle = fit_ddpm(nll_family, data, T, cfg, local.derive("mle")).theta_hat;
      }
      results[tr].err = sqrt_n * (fit.theta_hat - theta_star);
      results[tr].mle_err = sqrt_n * (mle - theta_star);
      results[tr].ok = true;
    } catch (const std::exception&) {
      results[tr].ok = false;
    }
  });

  EfficiencyReport report;
  report.trials = trials;
  report.n = n;
  report.T = T;
  Matrix acc = Matrix::Zero(p, p);
  for (const auto& r : results) {
    if (!r.ok) {
      ++report.excluded_trials;
      continue;
    }
    report.scaled_errors.push_back(r.err);
    report.mle_scaled_errors.push_back(r.mle_err);
  }
  const long kept = static_cast<long>(report.scaled_errors.size());
  if (kept <= p) throw std::runtime_error("efficiency_experiment: too many excluded trials");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const auto& e : report.scaled_errors) mean += e;
  mean /= static_cast<double>(kept);
  for (const auto& e : report.scaled_errors) acc += (e - mean) * (e - mean).transpose();
  report.empirical_cov = acc / static_cast<double>(kept - 1);

  const Matrix info = fisher_information(family, theta_star);
  report.fisher_inv = info.inverse();
  Eigen::SelfAdjointEigenSolver<Matrix> diff(report.empirical_cov - report.fisher_inv);
  Eigen::SelfAdjointEigenSolver<Matrix> ref(report.fisher_inv);
  report.spectral_ratio = diff.eigenvalues().cwiseAbs().maxCoeff() /
                          ref.eigenvalues().cwiseAbs().maxCoeff();
  return report;
}

double ddpm_mle_gap(const ParametricFamily& family, const Eigen::VectorXd& theta,
                    const std::vector<Point>& data, double T, const RiskPanel* panel) {
  if (data.empty()) throw std::invalid_argument("ddpm_mle_gap: empty data");
  const GaussianMixture mix = family.mixture_of(theta);
  double mle_risk = 0.0;
  for (const auto& x : data) mle_risk -= mix.logdensity(x);
  mle_risk /= static_cast<double>(data.size());

  double ddpm = 0.0;
  if (family.closed_form_risk) {
    ddpm = family.closed_form_risk(theta, data, T);
  } else {
    if (panel == nullptr) throw std::invalid_argument("ddpm_mle_gap: panel required");
    ddpm = panel_risk(family, theta, data, *panel).value;
  }
  const int d = static_cast<int>(data.front().size());
  return mle_risk - ddpm - identity_constant(d, T);
}

double mean_transition_kl(const ParametricFamily& family, const Eigen::VectorXd& theta,
                          const std::vector<Point>& data, double T) {
  const GaussianMixture mix = family.mixture_of(theta);
  if (mix.size() != 1) {
    throw std::invalid_argument("mean_transition_kl: single-component family required");
  }
  const GaussianParams target = ou_push_gaussian(mix.components().front(), T);
  const double beta = one_minus_exp_neg2(T);
  double acc = 0.0;
  for (const auto& x : data) {
    const GaussianParams q(std::exp(-T) * x, beta * Matrix::Identity(x.size(), x.size()));
    acc += gaussian_kl(q, target);
  }
  return acc / static_cast<double>(data.size());
}

}  // namespace scoredens
