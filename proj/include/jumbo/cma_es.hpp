#ifndef JUMBO_CMA_ES_HPP
#define JUMBO_CMA_ES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "jumbo/common.hpp"

namespace jumbo {

struct CmaOptions {
  int population = 0;   // 0 selects 4 + floor(3 ln d)
  int generations = 50;
  double sigma0 = 0.3;  // initial step size, in units of the box
};

struct CmaResult {
  VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

inline int cma_default_population(Eigen::Index d) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(d))));
}

// (mu/mu_w, lambda) covariance matrix adaptation, maximizing fn over the
// box [lo, hi]. Samples are clipped to the box before evaluation and the
// best evaluated (clipped) point is returned; the start point is evaluated
// first so it wins all-tie landscapes deterministically.
inline CmaResult cma_es_maximize(const std::function<double(const VectorXd&)>& fn,
                                 const VectorXd& lo, const VectorXd& hi,
                                 const VectorXd& x0, const CmaOptions& opt,
                                 std::mt19937_64& rng) {
  const Eigen::Index d = lo.size();
  require(d >= 1, "cma_es_maximize: empty search box");
  require(hi.size() == d && x0.size() == d, "cma_es_maximize: dimension mismatch");
  for (Eigen::Index j = 0; j < d; ++j)
    require(lo(j) < hi(j), "cma_es_maximize: box bounds must satisfy lo < hi");
  require(opt.sigma0 > 0.0, "cma_es_maximize: sigma0 must be positive");
  require(opt.generations >= 0, "cma_es_maximize: generations must be >= 0");

  auto clip = [&](VectorXd x) {
    for (Eigen::Index j = 0; j < d; ++j) x(j) = std::min(hi(j), std::max(lo(j), x(j)));
    return x;
  };

  CmaResult best;
  best.x = clip(x0);
  best.value = fn(best.x);
  best.evaluations = 1;

  const int lambda = opt.population > 0 ? opt.population : cma_default_population(d);
  const int mu = lambda / 2;
  VectorXd w(mu);
  for (int i = 0; i < mu; ++i)
    w(i) = std::log(mu + 0.5) - std::log(static_cast<double>(i + 1));
  w /= w.sum();
  const double mueff = 1.0 / w.squaredNorm();

  const double n = static_cast<double>(d);
  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                            ((n + 2.0) * (n + 2.0) + mueff));
  const double damps =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  VectorXd mean = best.x;
  double sigma = opt.sigma0;
  VectorXd ps = VectorXd::Zero(d), pc = VectorXd::Zero(d);
  MatrixXd C = MatrixXd::Identity(d, d);
  MatrixXd B = MatrixXd::Identity(d, d);
  VectorXd D = VectorXd::Ones(d);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int gen = 0; gen < opt.generations; ++gen) {
    std::vector<VectorXd> ys(static_cast<std::size_t>(lambda));
    std::vector<double> vals(static_cast<std::size_t>(lambda));
    for (int k = 0; k < lambda; ++k) {
      VectorXd z(d);
      for (Eigen::Index j = 0; j < d; ++j) z(j) = gauss(rng);
      ys[static_cast<std::size_t>(k)] = B * D.cwiseProduct(z);
      const VectorXd x = clip(mean + sigma * ys[static_cast<std::size_t>(k)]);
      const double v = fn(x);
      ++best.evaluations;
      vals[static_cast<std::size_t>(k)] = v;
      if (v > best.value) {
        best.value = v;
        best.x = x;
      }
    }

    std::vector<int> order(static_cast<std::size_t>(lambda));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double va = vals[static_cast<std::size_t>(a)];
      const double vb = vals[static_cast<std::size_t>(b)];
      return va != vb ? va > vb : a < b;
    });

    VectorXd yw = VectorXd::Zero(d);
    for (int i = 0; i < mu; ++i)
      yw += w(i) * ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    mean += sigma * yw;

    // step-size and covariance paths
    MatrixXd inv_sqrt_C = B * D.cwiseInverse().asDiagonal() * B.transpose();
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt_C * yw);
    const double ps_norm = ps.norm();
    const double hsig_denom =
        std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) * chi_n;
    const bool hsig = ps_norm / hsig_denom < 1.4 + 2.0 / (n + 1.0);
    pc = (1.0 - cc) * pc +
         (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

    MatrixXd rank_mu = MatrixXd::Zero(d, d);
    for (int i = 0; i < mu; ++i) {
      const VectorXd& yi = ys[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      rank_mu += w(i) * yi * yi.transpose();
    }
    C = (1.0 - c1 - cmu) * C +
        c1 * (pc * pc.transpose() + (hsig ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    if (!std::isfinite(sigma) || !mean.allFinite() || !C.allFinite()) break;

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig((C + C.transpose()) / 2.0);
    if (eig.info() != Eigen::Success) break;
    B = eig.eigenvectors();
    D = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
    if (D.maxCoeff() / D.minCoeff() > 1e7) break;  // degenerate covariance
  }
  return best;
}

}  // namespace jumbo

#endif
