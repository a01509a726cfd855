#include "scoredens/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace scoredens {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kMinCholDiag = 1e-10;

}  // namespace

GaussianParams::GaussianParams(Point mean, Matrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const Eigen::Index d = mean_.size();
  if (cov_.rows() != d || cov_.cols() != d) {
    throw std::invalid_argument("GaussianParams: covariance shape does not match mean");
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw std::invalid_argument("GaussianParams: non-finite entries");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("GaussianParams: covariance not symmetric");
  }
  Eigen::LLT<Matrix> llt(cov_);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("GaussianParams: covariance factorization failed");
  }
  chol_ = llt.matrixL();
  if (chol_.diagonal().minCoeff() <= kMinCholDiag) {
    throw std::domain_error("GaussianParams: factor diagonal below tolerance");
  }
  logdet_ = 2.0 * chol_.diagonal().array().log().sum();
}

GaussianParams GaussianParams::spherical(Point mean, double variance) {
  const Eigen::Index d = mean.size();
  return GaussianParams(std::move(mean), variance * Matrix::Identity(d, d));
}

double GaussianParams::logpdf(const Point& x) const {
  if (x.size() != dim()) throw std::invalid_argument("GaussianParams::logpdf: dimension mismatch");
  const Point delta = x - mean_;
  const Point half = chol_.triangularView<Eigen::Lower>().solve(delta);
  return -0.5 * (static_cast<double>(dim()) * kLog2Pi + logdet_ + half.squaredNorm());
}

Point GaussianParams::score(const Point& x) const {
  return -solve(x - mean_);
}

Point GaussianParams::solve(const Point& v) const {
  Point y = chol_.triangularView<Eigen::Lower>().solve(v);
  return chol_.transpose().triangularView<Eigen::Upper>().solve(y);
}

double GaussianParams::inv_cov_spectral_norm() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov_, Eigen::EigenvaluesOnly);
  return 1.0 / es.eigenvalues().minCoeff();
}

double gaussian_kl(const GaussianParams& a, const GaussianParams& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("gaussian_kl: dimension mismatch");
  const double d = static_cast<double>(a.dim());
  const Matrix b_inv_a = b.chol().triangularView<Eigen::Lower>().solve(
      Matrix(a.chol()));  // L_b^{-1} L_a
  const double trace_term = b_inv_a.squaredNorm();
  const Point delta = b.mean() - a.mean();
  const Point half = b.chol().triangularView<Eigen::Lower>().solve(delta);
  return 0.5 * (trace_term + half.squaredNorm() - d + b.logdet() - a.logdet());
}

}  // namespace scoredens
