#ifndef JUMBO_GP_FIT_HPP
#define JUMBO_GP_FIT_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "jumbo/gp.hpp"

namespace jumbo {

inline constexpr double kNoiseFloor = 1e-4;

namespace detail {

inline GpState condition_from_log_params(const GpState& base, const Eigen::Vector3d& u) {
  KernelSpec spec = base.kernel;
  spec.lengthscale = std::exp(u(0));
  const double sigma_s = std::exp(u(1));
  spec.signal_variance = sigma_s * sigma_s;
  return gp_condition(spec, std::exp(u(2)), base.X, base.y);
}

inline Eigen::Vector3d log_params_of(const GpState& gp) {
  return {std::log(gp.kernel.lengthscale),
          0.5 * std::log(gp.kernel.signal_variance),
          std::log(std::max(gp.noise_std, kNoiseFloor))};
}

// keeps exp(u) away from overflow; the noise floor is a modelling choice,
// the other bounds are only numerical guards
inline void clamp_log_params(Eigen::Vector3d& u) {
  const double lo = std::log(1e-6), hi = std::log(1e6);
  u(0) = std::clamp(u(0), lo, hi);
  u(1) = std::clamp(u(1), lo, hi);
  u(2) = std::clamp(u(2), std::log(kNoiseFloor), hi);
}

}  // namespace detail

// Adam ascent on the marginal likelihood in log-hyperparameter space
// [log lengthscale, log signal_std, log noise_std]. Returns the
// best-NLL iterate rather than the last one.
inline GpState fit_gp_hyperparams(const GpState& gp, int steps = 100, double lr = 0.1) {
  if (steps == 0) return gp;
  require(steps > 0, "fit_gp_hyperparams: steps must be >= 0");
  require(gp.size() >= 2, "fit_gp_hyperparams: needs at least two observations");

  Eigen::Vector3d u = detail::log_params_of(gp);
  detail::clamp_log_params(u);
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_u = u;

  for (int step = 0; step <= steps; ++step) {
    NllResult nll;
    bool ok = true;
    try {
      GpState cur = detail::condition_from_log_params(gp, u);
      nll = gp_nll(cur);
    } catch (const NumericalError&) {
      ok = false;
    }
    if (ok && std::isfinite(nll.value)) {
      if (nll.value < best_value) {
        best_value = nll.value;
        best_u = u;
      }
    } else {
      break;  // further steps from a broken point are meaningless
    }
    if (step == steps) break;

    const double t = static_cast<double>(step + 1);
    m = beta1 * m + (1.0 - beta1) * nll.grad;
    v = beta2 * v + (1.0 - beta2) * nll.grad.cwiseProduct(nll.grad);
    const Eigen::Vector3d mhat = m / (1.0 - std::pow(beta1, t));
    const Eigen::Vector3d vhat = v / (1.0 - std::pow(beta2, t));
    u -= lr * mhat.cwiseQuotient(vhat.cwiseSqrt().array().operator+(eps).matrix());
    detail::clamp_log_params(u);
  }

  if (!std::isfinite(best_value))
    throw NumericalError("fit_gp_hyperparams: every iterate failed numerically");
  return detail::condition_from_log_params(gp, best_u);
}

}  // namespace jumbo

#endif
