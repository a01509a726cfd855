#pragma once

#include <string>
#include <vector>

#include "scoredens/gaussian.hpp"
#include "scoredens/ou.hpp"
#include "scoredens/rng.hpp"

namespace scoredens {

//! Sub-Gaussian score parameter L and second moment bound M2.
struct RegularityConstants {
  double L = 0.0;
  double M2 = 0.0;
};

//! min{L e^{2t}, 1 / (1 - e^{-2t})}: sub-Gaussian score parameter along the OU
//! process; always <= 2L for L >= 1.
double score_subgaussian_lt(double L, double t);

//! Finite Gaussian mixture with exact densities and scores at every OU time.
//!
//! Per-component spectral decompositions are cached at construction so that
//! time-t evaluation needs no refactorization: the pushed covariance
//! e^{-2t} Sigma + (1 - e^{-2t}) Id is diagonal in the same eigenbasis.
class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<GaussianParams> components);

  Eigen::Index dim() const { return components_.front().dim(); }
  std::size_t size() const { return components_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianParams>& components() const { return components_; }

  double logdensity(const Point& x) const { return logdensity_at_time(0.0, x); }
  //! log of the time-t marginal density.
  double logdensity_at_time(double t, const Point& x) const;
  //! Score of the time-t marginal: posterior-weighted component scores.
  Point score_at_time(double t, const Point& x) const;

  //! Closed-form time-t marginal as a mixture.
  GaussianMixture push(double t) const;

  Point sample(RandomStream& rng) const;
  std::size_t sample_component(RandomStream& rng) const;

  RegularityConstants regularity_constants() const;

  std::string to_json() const;
  static GaussianMixture from_json(const std::string& text);
  void save(const std::string& path) const;
  static GaussianMixture load(const std::string& path);

 private:
  struct Spectral {
    Matrix basis;          // eigenvectors, columns
    Eigen::VectorXd eigs;  // eigenvalues of Sigma
  };

  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<GaussianParams> components_;
  std::vector<Spectral> spectral_;
};

//! Truncated hCLWE ("Gaussian pancakes") parameters. The secret direction must
//! be unit length; beta in (0, 1); gamma positive.
struct HclweParams {
  double beta;
  double gamma;
  int k;  // truncation half-width: components i = -k..k
  Point secret;
};

//! (2k+1)-component mixture with weights proportional to
//! exp(-pi i^2 / (beta^2 + gamma^2)), means (gamma i / (beta^2 + gamma^2)) w,
//! and covariance (Id - (1 - beta^2/(beta^2+gamma^2)) w w^T) / (2 pi).
//!
//! The 1/(2 pi) follows the width convention rho_r(x) = exp(-pi ||x||^2 / r^2),
//! under which the unit-width Gaussian is N(0, Id / (2 pi)); the null
//! hypothesis in the distinguishing experiment uses the same convention.
GaussianMixture hclwe_mixture(const HclweParams& p);

//! Unnormalized hCLWE component weight exp(-pi i^2 / (beta^2 + gamma^2)).
double hclwe_raw_weight(const HclweParams& p, int i);

struct GlmLocalityReport {
  bool mass_ok = false;      // every support point has Q(B(x, R)) >= w_min
  bool covering_ok = false;  // support covered by k balls of radius R
  bool support_radius_ok = false;  // support contained in B(0, D)
  bool pass() const { return mass_ok && covering_ok && support_radius_ok; }
};

//! Checks (k, R, D, w_min)-locality of the discrete mixing measure given by the
//! mixture's means and weights. The covering condition is decided by exhaustive
//! search over subsets of means when small enough, else greedily.
GlmLocalityReport glm_locality_check(const GaussianMixture& mix, int k, double R, double D,
                                     double w_min);

}  // namespace scoredens
