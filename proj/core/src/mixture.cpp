#include "scoredens/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace scoredens {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kPi = 3.1415926535897932384626433832795;

}  // namespace

double score_subgaussian_lt(double L, double t) {
  if (!(L >= 0.0) || !(t >= 0.0)) throw std::invalid_argument("score_subgaussian_lt: bad input");
  if (t == 0.0) return L;
  return std::min(L * std::exp(2.0 * t), 1.0 / one_minus_exp_neg2(t));
}

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<GaussianParams> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty() || weights_.size() != components_.size()) {
    throw std::invalid_argument("GaussianMixture: weights/components size mismatch");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("GaussianMixture: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("GaussianMixture: weights must sum to 1");
  }
  const Eigen::Index d = components_.front().dim();
  for (const auto& c : components_) {
    if (c.dim() != d) throw std::invalid_argument("GaussianMixture: mixed dimensions");
  }
  log_weights_.resize(weights_.size());
  spectral_.resize(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    log_weights_[i] =
        weights_[i] > 0.0 ? std::log(weights_[i]) : -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Matrix> es(components_[i].cov());
    if (es.info() != Eigen::Success) {
      throw std::domain_error("GaussianMixture: eigendecomposition failed");
    }
    spectral_[i] = Spectral{es.eigenvectors(), es.eigenvalues()};
  }
}

double GaussianMixture::logdensity_at_time(double t, const Point& x) const {
  if (!(t >= 0.0)) throw std::invalid_argument("logdensity_at_time: negative time");
  if (x.size() != dim()) throw std::invalid_argument("logdensity_at_time: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("logdensity_at_time: non-finite point");
  const double decay2 = std::exp(-2.0 * t);
  const double decay = std::exp(-t);
  const double beta = one_minus_exp_neg2(t);
  const double dlog2pi = static_cast<double>(dim()) * kLog2Pi;

  double max_ll = -std::numeric_limits<double>::infinity();
  std::vector<double> ll(components_.size());
  Point delta(dim()), w(dim());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    delta = x - decay * components_[i].mean();
    w.noalias() = spectral_[i].basis.transpose() * delta;
    double quad = 0.0, logdet = 0.0;
    for (Eigen::Index kk = 0; kk < dim(); ++kk) {
      const double s = decay2 * spectral_[i].eigs[kk] + beta;
      quad += w[kk] * w[kk] / s;
      logdet += std::log(s);
    }
    ll[i] = log_weights_[i] - 0.5 * (dlog2pi + logdet + quad);
    max_ll = std::max(max_ll, ll[i]);
  }
  double acc = 0.0;
  for (double v : ll) acc += std::exp(v - max_ll);
  return max_ll + std::log(acc);
}

Point GaussianMixture::score_at_time(double t, const Point& x) const {
  if (!(t >= 0.0)) throw std::invalid_argument("score_at_time: negative time");
  if (x.size() != dim()) throw std::invalid_argument("score_at_time: dimension mismatch");
  const double decay2 = std::exp(-2.0 * t);
  const double decay = std::exp(-t);
  const double beta = one_minus_exp_neg2(t);

  const std::size_t K = components_.size();
  std::vector<double> ll(K);
  Matrix comp_scores(dim(), K);
  double max_ll = -std::numeric_limits<double>::infinity();
  Point delta(dim()), w(dim());
  for (std::size_t i = 0; i < K; ++i) {
    delta = x - decay * components_[i].mean();
    w.noalias() = spectral_[i].basis.transpose() * delta;
    double quad = 0.0, logdet = 0.0;
    for (Eigen::Index kk = 0; kk < dim(); ++kk) {
      const double s = decay2 * spectral_[i].eigs[kk] + beta;
      quad += w[kk] * w[kk] / s;
      logdet += std::log(s);
      w[kk] /= s;
    }
    comp_scores.col(i).noalias() = -(spectral_[i].basis * w);
    ll[i] = log_weights_[i] - 0.5 * (logdet + quad);
    max_ll = std::max(max_ll, ll[i]);
  }
  double norm = 0.0;
  Point score = Point::Zero(dim());
  for (std::size_t i = 0; i < K; ++i) {
    const double r = std::exp(ll[i] - max_ll);
    norm += r;
    score += r * comp_scores.col(i);
  }
  return score / norm;
}

GaussianMixture GaussianMixture::push(double t) const {
  std::vector<GaussianParams> pushed;
  pushed.reserve(components_.size());
  for (const auto& c : components_) pushed.push_back(ou_push_gaussian(c, t));
  return GaussianMixture(weights_, std::move(pushed));
}

std::size_t GaussianMixture::sample_component(RandomStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    if (u < acc) return i;
  }
  return weights_.size() - 1;
}

Point GaussianMixture::sample(RandomStream& rng) const {
  const std::size_t i = sample_component(rng);
  const Point z = rng.normal_vector(dim());
  return components_[i].mean() + components_[i].chol() * z;
}

RegularityConstants GaussianMixture::regularity_constants() const {
  RegularityConstants rc;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    rc.L = std::max(rc.L, 1.0 / spectral_[i].eigs.minCoeff());
    rc.M2 += weights_[i] * (components_[i].mean().squaredNorm() + components_[i].trace_cov());
  }
  return rc;
}

std::string GaussianMixture::to_json() const {
  nlohmann::json j;
  j["dim"] = dim();
  j["weights"] = weights_;
  auto& means = j["means"] = nlohmann::json::array();
  auto& covs = j["covariances"] = nlohmann::json::array();
  for (const auto& c : components_) {
    std::vector<double> m(c.mean().data(), c.mean().data() + c.dim());
    means.push_back(m);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < c.dim(); ++r) {
      std::vector<double> row(c.dim());
      for (Eigen::Index cc = 0; cc < c.dim(); ++cc) row[cc] = c.cov()(r, cc);
      rows.push_back(row);
    }
    covs.push_back(rows);
  }
  return j.dump(2);
}

GaussianMixture GaussianMixture::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const Eigen::Index d = j.at("dim").get<Eigen::Index>();
  const auto weights = j.at("weights").get<std::vector<double>>();
  const auto& means = j.at("means");
  const auto& covs = j.at("covariances");
  if (means.size() != weights.size() || covs.size() != weights.size()) {
    throw std::invalid_argument("GaussianMixture::from_json: inconsistent component count");
  }
  std::vector<GaussianParams> components;
  components.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto m = means[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(m.size()) != d) {
      throw std::invalid_argument("GaussianMixture::from_json: mean dimension mismatch");
    }
    Point mean = Eigen::Map<const Point>(m.data(), d);
    Matrix cov(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto row = covs[i][static_cast<std::size_t>(r)].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != d) {
        throw std::invalid_argument("GaussianMixture::from_json: covariance shape mismatch");
      }
      for (Eigen::Index c = 0; c < d; ++c) cov(r, c) = row[static_cast<std::size_t>(c)];
    }
    components.emplace_back(std::move(mean), std::move(cov));
  }
  return GaussianMixture(weights, std::move(components));
}

void GaussianMixture::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("GaussianMixture::save: cannot open " + path);
  out << to_json() << '\n';
}

GaussianMixture GaussianMixture::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("GaussianMixture::load: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

double hclwe_raw_weight(const HclweParams& p, int i) {
  const double r2 = p.beta * p.beta + p.gamma * p.gamma;
  return std::exp(-kPi * static_cast<double>(i) * static_cast<double>(i) / r2);
}

GaussianMixture hclwe_mixture(const HclweParams& p) {
  if (!(p.beta > 0.0 && p.beta < 1.0)) throw std::invalid_argument("hclwe_mixture: beta in (0,1)");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("hclwe_mixture: gamma must be positive");
  if (p.k < 0) throw std::invalid_argument("hclwe_mixture: negative truncation");
  if (std::abs(p.secret.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("hclwe_mixture: secret must be a unit vector");
  }
  const Eigen::Index d = p.secret.size();
  const double r2 = p.beta * p.beta + p.gamma * p.gamma;
  const double along = p.beta * p.beta / r2;  // width^2 along the secret
  Matrix cov = (Matrix::Identity(d, d) - (1.0 - along) * (p.secret * p.secret.transpose()));
  cov /= 2.0 * kPi;

  std::vector<double> weights;
  std::vector<GaussianParams> components;
  weights.reserve(2 * p.k + 1);
  components.reserve(2 * p.k + 1);
  double total = 0.0;
  for (int i = -p.k; i <= p.k; ++i) {
    const double w = hclwe_raw_weight(p, i);
    weights.push_back(w);
    total += w;
    components.emplace_back((p.gamma * static_cast<double>(i) / r2) * p.secret, cov);
  }
  for (double& w : weights) w /= total;
  // Renormalize away the accumulated rounding so the sum is exactly 1.
  const double s = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= s;
  return GaussianMixture(std::move(weights), std::move(components));
}

namespace {

bool covers(const std::vector<Point>& means, const std::vector<std::size_t>& centers, double R) {
  for (const auto& m : means) {
    bool hit = false;
    for (std::size_t c : centers) {
      if ((m - means[c]).norm() <= R + 1e-12) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool covering_exists(const std::vector<Point>& means, int k, double R) {
  const std::size_t n = means.size();
  if (static_cast<std::size_t>(k) >= n) return true;
  // Exhaustive search over k-subsets of means while cheap; greedy fallback.
  double combos = 1.0;
  for (int i = 0; i < k; ++i) combos *= static_cast<double>(n - i) / (i + 1);
  if (combos <= 20000.0) {
    std::vector<std::size_t> pick(static_cast<std::size_t>(k));
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t depth,
                                                            std::size_t start) -> bool {
      if (depth == pick.size()) return covers(means, pick, R);
      for (std::size_t i = start; i < n; ++i) {
        pick[depth] = i;
        if (rec(depth + 1, i + 1)) return true;
      }
      return false;
    };
    return rec(0, 0);
  }
  std::vector<bool> covered(n, false);
  for (int round = 0; round < k; ++round) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t gain = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!covered[i] && (means[i] - means[c]).norm() <= R + 1e-12) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if ((means[i] - means[best]).norm() <= R + 1e-12) covered[i] = true;
    }
  }
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

}  // namespace

GlmLocalityReport glm_locality_check(const GaussianMixture& mix, int k, double R, double D,
                                     double w_min) {
  std::vector<Point> means;
  std::vector<double> masses;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    if (mix.weights()[i] > 0.0) {
      means.push_back(mix.components()[i].mean());
      masses.push_back(mix.weights()[i]);
    }
  }
  GlmLocalityReport rep;
  rep.mass_ok = true;
  for (std::size_t i = 0; i < means.size(); ++i) {
    double ball_mass = 0.0;
    for (std::size_t j = 0; j < means.size(); ++j) {
      if ((means[j] - means[i]).norm() <= R + 1e-12) ball_mass += masses[j];
    }
    if (ball_mass < w_min - 1e-12) {
      rep.mass_ok = false;
      break;
    }
  }
  rep.covering_ok = covering_exists(means, k, R);
  rep.support_radius_ok = std::all_of(means.begin(), means.end(), [&](const Point& m) {
    return m.norm() <= D + 1e-12;
  });
  return rep;
}

}  // namespace scoredens
