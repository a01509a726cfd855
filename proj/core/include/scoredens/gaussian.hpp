#pragma once

#include <Eigen/Dense>

namespace scoredens {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

//! Gaussian N(mean, cov) with a cached lower-triangular Cholesky factor.
//!
//! Construction validates symmetry and positive definiteness; any factor
//! diagonal entry at or below 1e-10 is a hard error, so downstream solves and
//! log-determinants are always well posed.
class GaussianParams {
 public:
  GaussianParams(Point mean, Matrix cov);
  //! Spherical N(mean, variance * Id).
  static GaussianParams spherical(Point mean, double variance);

  const Point& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  //! Lower-triangular factor L with cov = L L^T.
  const Matrix& chol() const { return chol_; }
  double logdet() const { return logdet_; }
  Eigen::Index dim() const { return mean_.size(); }

  double logpdf(const Point& x) const;
  //! -cov^{-1} (x - mean).
  Point score(const Point& x) const;
  //! cov^{-1} v via the cached factor.
  Point solve(const Point& v) const;
  //! Largest eigenvalue of cov^{-1}, i.e. 1 / lambda_min(cov).
  double inv_cov_spectral_norm() const;
  double trace_cov() const { return cov_.trace(); }

 private:
  Point mean_;
  Matrix cov_;
  Matrix chol_;
  double logdet_;
};

//! KL(N(a) || N(b)), closed form.
double gaussian_kl(const GaussianParams& a, const GaussianParams& b);

}  // namespace scoredens
