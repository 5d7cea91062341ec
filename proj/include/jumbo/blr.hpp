#ifndef JUMBO_BLR_HPP
#define JUMBO_BLR_HPP

#include <cmath>

#include <Eigen/Cholesky>

#include "jumbo/common.hpp"

namespace jumbo {

// Bayesian linear regression on a fixed feature map, weight prior
// N(0, sigma_w^2 I). Equivalent to a linear-kernel GP on the features
// with signal_variance = sigma_w^2.
struct BlrState {
  double weight_prior_std = 1.0;
  double noise_std = 0.1;
  MatrixXd Phi;  // n x m training features
  VectorXd y;    // n observations
};

struct BlrPrediction {
  VectorXd mean;
  VectorXd var;  // predictive variance, includes observation noise
};

// Predictive distribution at the rows of Phistar:
//   A = sigma_w^-2 I + sigma^-2 Phi^T Phi
//   mean = Phi* A^{-1} sigma^-2 Phi^T y
//   var  = diag(Phi* A^{-1} Phi*^T) + sigma^2
inline BlrPrediction blr_fit_predict(const BlrState& state, const MatrixXd& Phistar) {
  require(std::isfinite(state.weight_prior_std) && state.weight_prior_std > 0.0,
          "blr_fit_predict: weight_prior_std must be positive");
  require(std::isfinite(state.noise_std) && state.noise_std > 0.0,
          "blr_fit_predict: noise_std must be positive");
  require(state.Phi.rows() == state.y.size(), "blr_fit_predict: |y| != rows(Phi)");
  require_finite(state.Phi, "Phi");
  require_finite(state.y, "y");
  require_finite(Phistar, "Phistar");

  const double noise_var = state.noise_std * state.noise_std;
  const double prior_var = state.weight_prior_std * state.weight_prior_std;
  const Eigen::Index q = Phistar.rows();

  BlrPrediction out;
  if (state.Phi.rows() == 0) {
    out.mean = VectorXd::Zero(q);
    out.var = prior_var * Phistar.rowwise().squaredNorm();
    out.var.array() += noise_var;
    return out;
  }

  require(Phistar.cols() == state.Phi.cols(), "blr_fit_predict: feature dimension mismatch");
  MatrixXd A = state.Phi.transpose() * state.Phi / noise_var;
  A.diagonal().array() += 1.0 / prior_var;

  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw NumericalError("blr_fit_predict: weight precision matrix is not positive definite");

  const VectorXd wbar = llt.solve(state.Phi.transpose() * state.y / noise_var);
  out.mean = Phistar * wbar;

  // var_i = phi_i^T A^{-1} phi_i = ||L^{-1} phi_i||^2
  const MatrixXd V = llt.matrixL().solve(MatrixXd(Phistar.transpose()));  // m x q
  out.var = V.colwise().squaredNorm().transpose();
  out.var.array() += noise_var;
  return out;
}

}  // namespace jumbo

#endif
