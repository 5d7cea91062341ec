#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jumbo/gp_fit.hpp"
#include "oracles.hpp"

using namespace jumbo;

namespace {

GpState smooth_problem(double noise_std, int n = 12) {
  MatrixXd X(n, 1);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    X(i, 0) = x;
    y(i) = std::sin(4.0 * x);
  }
  return gp_condition(KernelSpec{KernelKind::Matern52, 1.0, 1.0}, noise_std, X, y);
}

}  // namespace

TEST_CASE("fitting never worsens the marginal likelihood") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 6; ++rep) {
    oracles::RandomProblem p = oracles::random_problem(rng, 10, 2);
    if (p.X.rows() < 2) continue;
    GpState gp = gp_condition(p.spec, std::max(p.noise_std, 0.1), p.X, p.y);
    const double before = gp_nll(gp).value;
    GpState fitted = fit_gp_hyperparams(gp, 60, 0.1);
    REQUIRE(gp_nll(fitted).value <= before + 1e-12);
  }
}

TEST_CASE("zero steps returns the input state unchanged") {
  GpState gp = smooth_problem(0.2);
  GpState same = fit_gp_hyperparams(gp, 0, 0.1);
  REQUIRE(same.kernel.lengthscale == gp.kernel.lengthscale);
  REQUIRE(same.kernel.signal_variance == gp.kernel.signal_variance);
  REQUIRE(same.noise_std == gp.noise_std);
}

TEST_CASE("fitting requires at least two observations") {
  MatrixXd X(1, 1);
  X << 0.0;
  VectorXd y(1);
  y << 1.0;
  GpState gp = gp_condition(KernelSpec{}, 0.1, X, y);
  REQUIRE_THROWS_AS(fit_gp_hyperparams(gp), std::invalid_argument);
}

TEST_CASE("fitted noise respects the floor") {
  // Noiseless smooth data drives the likelihood toward zero noise; the
  // fit must stop at the floor instead.
  GpState gp = smooth_problem(0.3);
  GpState fitted = fit_gp_hyperparams(gp, 100, 0.1);
  REQUIRE(fitted.noise_std >= kNoiseFloor);
  REQUIRE(fitted.kernel.lengthscale >= 1e-6);
  REQUIRE(fitted.kernel.lengthscale <= 1e6);
}

TEST_CASE("fitting is deterministic") {
  GpState gp = smooth_problem(0.2);
  GpState a = fit_gp_hyperparams(gp, 50, 0.1);
  GpState b = fit_gp_hyperparams(gp, 50, 0.1);
  REQUIRE(a.kernel.lengthscale == b.kernel.lengthscale);
  REQUIRE(a.kernel.signal_variance == b.kernel.signal_variance);
  REQUIRE(a.noise_std == b.noise_std);
}

TEST_CASE("fit explains smooth data better than a bad initialization") {
  MatrixXd X(15, 1);
  VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    const double x = static_cast<double>(i) / 14.0;
    X(i, 0) = x;
    y(i) = std::sin(8.0 * x);
  }
  // Misspecified: lengthscale too long and noise inflated. The likelihood
  // is multimodal, so start within reach of the sharp low-noise basin.
  GpState init = gp_condition(KernelSpec{KernelKind::Rbf, 1.0, 1.0}, 0.5, X, y);
  GpState fitted = fit_gp_hyperparams(init, 100, 0.1);
  REQUIRE(gp_nll(fitted).value < gp_nll(init).value - 20.0);
  REQUIRE(fitted.kernel.lengthscale < 0.6);
  REQUIRE(fitted.noise_std < 0.1);
}
