#ifndef JUMBO_GP_HPP
#define JUMBO_GP_HPP

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Cholesky>

#include "jumbo/kernels.hpp"

namespace jumbo {

// Exact GP regression state. Immutable after construction: conditioning
// factors K(X,X) + noise^2 I once and posterior queries reuse the factor.
struct GpState {
  KernelSpec kernel;
  double noise_std = 0.1;
  MatrixXd X;       // n x d training inputs
  VectorXd y;       // n observations
  MatrixXd chol;    // lower Cholesky factor of K + noise^2 I + jitter I
  double jitter = 0.0;  // diagonal jitter actually applied

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
};

struct GpPosterior {
  VectorXd mean;
  MatrixXd cov;
};

inline constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-8, 1e-6, 1e-4};

inline GpState gp_condition(const KernelSpec& spec, double noise_std,
                            const MatrixXd& X, const VectorXd& y) {
  validate(spec);
  require(std::isfinite(noise_std) && noise_std >= 0.0, "noise_std must be >= 0");
  require(X.rows() == y.size(), "gp_condition: |y| != rows(X)");
  require_finite(X, "X");
  require_finite(y, "y");

  GpState gp;
  gp.kernel = spec;
  gp.noise_std = noise_std;
  gp.X = X;
  gp.y = y;

  const Eigen::Index n = X.rows();
  if (n == 0) return gp;  // prior-only state

  MatrixXd Ktilde = kernel_gram(spec, X);
  Ktilde.diagonal().array() += noise_std * noise_std;

  for (double eps : kJitterLadder) {
    MatrixXd M = Ktilde;
    M.diagonal().array() += eps;
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) {
      gp.chol = llt.matrixL();
      gp.jitter = eps;
      return gp;
    }
  }
  std::ostringstream oss;
  oss << "gp_condition: Cholesky failed for n=" << n
      << " after jitter ladder {0, 1e-10, 1e-8, 1e-6, 1e-4}";
  throw NumericalError(oss.str());
}

// Posterior mean and covariance at test points (rows of Xstar):
//   mean = K(X*,X)^T Ktilde^{-1} y
//   cov  = K(X*,X*) - K(X,X*)^T Ktilde^{-1} K(X,X*)
// computed with two triangular solves against the cached factor.
inline GpPosterior gp_posterior(const GpState& gp, const MatrixXd& Xstar) {
  require_finite(Xstar, "Xstar");
  if (gp.size() > 0)
    require(Xstar.cols() == gp.dim(), "gp_posterior: test dimension mismatch");

  GpPosterior post;
  const Eigen::Index m = Xstar.rows();
  post.cov = kernel_gram(gp.kernel, Xstar);
  if (gp.size() == 0) {
    post.mean = VectorXd::Zero(m);
    return post;
  }

  const MatrixXd Kxs = kernel_cross(gp.kernel, gp.X, Xstar);  // n x m
  const auto L = gp.chol.triangularView<Eigen::Lower>();
  const MatrixXd V = L.solve(Kxs);          // L^{-1} K(X,X*)
  const VectorXd alpha = L.solve(gp.y);     // L^{-1} y
  post.mean = V.transpose() * alpha;
  post.cov -= V.transpose() * V;
  // roundoff can push tiny variances below zero
  for (Eigen::Index i = 0; i < m; ++i)
    if (post.cov(i, i) < 0.0) post.cov(i, i) = 0.0;
  return post;
}

// Mean/variance at a single point, the common path in acquisition loops.
inline std::pair<double, double> gp_mean_var(const GpState& gp, const VectorXd& x) {
  GpPosterior p = gp_posterior(gp, x.transpose());
  return {p.mean(0), p.cov(0, 0)};
}

struct NllResult {
  double value = 0.0;
  // gradient over [log lengthscale, log signal_std, log noise_std]
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
};

// Negative marginal log likelihood
//   0.5 y^T Ktilde^{-1} y + 0.5 log det Ktilde + n/2 log 2pi
// with its analytic gradient in log-hyperparameter space.
inline NllResult gp_nll(const GpState& gp) {
  const Eigen::Index n = gp.size();
  require(n >= 1, "gp_nll: needs at least one observation");

  const auto L = gp.chol.triangularView<Eigen::Lower>();
  const VectorXd u = L.solve(gp.y);           // L^{-1} y
  const VectorXd alpha = L.transpose().solve(u);  // Ktilde^{-1} y

  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(gp.chol(i, i));
  logdet *= 2.0;

  NllResult out;
  out.value = 0.5 * u.squaredNorm() + 0.5 * logdet
            + 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
  if (!std::isfinite(out.value)) throw NumericalError("gp_nll: non-finite value");

  // dNLL/dtheta = 0.5 tr(Kinv dK) - 0.5 alpha^T dK alpha
  MatrixXd Kinv = MatrixXd::Identity(n, n);
  Kinv = L.solve(Kinv);
  Kinv = L.transpose().solve(Kinv);

  const MatrixXd K = kernel_gram(gp.kernel, gp.X);
  const MatrixXd G = kernel_gram_dlog_lengthscale(gp.kernel, gp.X);
  const double noise_var = gp.noise_std * gp.noise_std;

  out.grad(0) = 0.5 * (Kinv.cwiseProduct(G)).sum() - 0.5 * alpha.dot(G * alpha);
  // dK/dlog(sigma_s) = 2K, dKtilde/dlog(sigma_n) = 2 sigma_n^2 I
  out.grad(1) = (Kinv.cwiseProduct(K)).sum() - alpha.dot(K * alpha);
  out.grad(2) = noise_var * (Kinv.trace() - alpha.squaredNorm());
  return out;
}

}  // namespace jumbo

#endif
