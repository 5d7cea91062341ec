#ifndef JUMBO_KERNELS_HPP
#define JUMBO_KERNELS_HPP

#include <cmath>
#include <string>

#include "jumbo/common.hpp"

namespace jumbo {

enum class KernelKind { Matern52, Rbf, Linear };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Matern52: return "matern52";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Linear: return "linear";
  }
  return "?";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "matern52") return KernelKind::Matern52;
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "linear") return KernelKind::Linear;
  throw std::invalid_argument("unknown kernel kind: " + s);
}

// Stationary kernels use a single shared lengthscale; the linear kernel
// ignores it. signal_variance is the prior variance k(x, x) for the
// stationary kernels.
struct KernelSpec {
  KernelKind kind = KernelKind::Matern52;
  double lengthscale = 1.0;
  double signal_variance = 1.0;
};

inline void validate(const KernelSpec& spec) {
  require(std::isfinite(spec.lengthscale) && spec.lengthscale > 0.0,
          "kernel lengthscale must be positive");
  require(std::isfinite(spec.signal_variance) && spec.signal_variance > 0.0,
          "kernel signal_variance must be positive");
}

namespace detail {

inline double matern52_of_r(double sv, double r) {
  const double a = std::sqrt(5.0) * r;
  return sv * (1.0 + a + a * a / 3.0) * std::exp(-a);
}

}  // namespace detail

inline double kernel_eval(const KernelSpec& spec, const VectorXd& x, const VectorXd& x2) {
  validate(spec);
  require(x.size() == x2.size(), "kernel_eval: dimension mismatch");
  require_finite(x, "x");
  require_finite(x2, "x2");
  switch (spec.kind) {
    case KernelKind::Matern52: {
      const double r = (x - x2).norm() / spec.lengthscale;
      return detail::matern52_of_r(spec.signal_variance, r);
    }
    case KernelKind::Rbf: {
      const double r = (x - x2).norm() / spec.lengthscale;
      return spec.signal_variance * std::exp(-0.5 * r * r);
    }
    case KernelKind::Linear:
      return spec.signal_variance * x.dot(x2);
  }
  return 0.0;
}

// Gram matrix K(X, X); rows of X are points.
inline MatrixXd kernel_gram(const KernelSpec& spec, const MatrixXd& X) {
  validate(spec);
  const Eigen::Index n = X.rows();
  MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel_eval(spec, X.row(i), X.row(j));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

// Cross covariance K(X, Z), shape |X| x |Z|.
inline MatrixXd kernel_cross(const KernelSpec& spec, const MatrixXd& X, const MatrixXd& Z) {
  validate(spec);
  require(X.cols() == Z.cols(), "kernel_cross: dimension mismatch");
  MatrixXd K(X.rows(), Z.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < Z.rows(); ++j)
      K(i, j) = kernel_eval(spec, X.row(i), Z.row(j));
  return K;
}

// dK/d(log lengthscale) over a training set, used by the marginal
// likelihood gradient. Zero for the linear kernel.
inline MatrixXd kernel_gram_dlog_lengthscale(const KernelSpec& spec, const MatrixXd& X) {
  const Eigen::Index n = X.rows();
  MatrixXd G = MatrixXd::Zero(n, n);
  if (spec.kind == KernelKind::Linear) return G;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (X.row(i) - X.row(j)).norm() / spec.lengthscale;
      double g = 0.0;
      if (spec.kind == KernelKind::Matern52) {
        // d/dr sv*(1 + s5 r + 5 r^2/3) e^{-s5 r} = -sv*(5r/3)(1 + s5 r) e^{-s5 r},
        // and dr/dlog(l) = -r.
        const double s5 = std::sqrt(5.0);
        g = spec.signal_variance * (5.0 * r * r / 3.0) * (1.0 + s5 * r) * std::exp(-s5 * r);
      } else {
        g = spec.signal_variance * r * r * std::exp(-0.5 * r * r);
      }
      G(i, j) = g;
      G(j, i) = g;
    }
  }
  return G;
}

}  // namespace jumbo

#endif
