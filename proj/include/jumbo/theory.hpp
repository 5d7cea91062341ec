#ifndef JUMBO_THEORY_HPP
#define JUMBO_THEORY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "jumbo/acquisition.hpp"
#include "jumbo/gp.hpp"
#include "jumbo/mlp.hpp"

namespace jumbo {

// Greedy lower-bound estimate of the maximum information gain from n noisy
// observations: iteratively add the point with the largest marginal gain
// 0.5*log(1 + var/noise^2). Submodularity puts the result within a
// (1 - 1/e) factor of the exhaustive optimum over size-n subsets.
struct MigResult {
  double value = 0.0;
  std::vector<Eigen::Index> chosen;
  VectorXd gains;
};

inline MigResult mig_greedy_select(const KernelSpec& spec, const MatrixXd& candidates,
                                   int n, double noise_std) {
  validate(spec);
  require(std::isfinite(noise_std) && noise_std > 0.0,
          "mig_greedy: noise_std must be positive");
  require(n >= 0, "mig_greedy: n must be >= 0");
  require(n <= candidates.rows(), "mig_greedy: n exceeds candidate count");
  require_finite(candidates, "candidates");

  MigResult out;
  out.gains.resize(n);
  const double inv_noise_var = 1.0 / (noise_std * noise_std);
  std::vector<bool> taken(static_cast<std::size_t>(candidates.rows()), false);

  for (int step = 0; step < n; ++step) {
    MatrixXd Xs(step, candidates.cols());
    for (int i = 0; i < step; ++i)
      Xs.row(i) = candidates.row(out.chosen[static_cast<std::size_t>(i)]);
    const GpState gp = gp_condition(spec, noise_std, Xs, VectorXd::Zero(step));
    const GpPosterior post = gp_posterior(gp, candidates);

    Eigen::Index best = -1;
    double best_gain = 0.0;
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double gain = 0.5 * std::log1p(inv_noise_var * post.cov(i, i));
      if (best < 0 || gain > best_gain) {
        best = i;
        best_gain = gain;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    out.chosen.push_back(best);
    out.gains(step) = best_gain;
    out.value += best_gain;
  }
  return out;
}

inline double mig_greedy(const KernelSpec& spec, const MatrixXd& candidates, int n,
                         double noise_std) {
  return mig_greedy_select(spec, candidates, n, noise_std).value;
}

// Exact information value 0.5*log det(I + noise^-2 K_S) of one subset,
// the quantity the greedy rule approximates.
inline double information_value(const KernelSpec& spec, const MatrixXd& subset,
                                double noise_std) {
  require(std::isfinite(noise_std) && noise_std > 0.0,
          "information_value: noise_std must be positive");
  const Eigen::Index n = subset.rows();
  if (n == 0) return 0.0;
  MatrixXd M = kernel_gram(spec, subset) / (noise_std * noise_std);
  M.diagonal().array() += 1.0;
  const Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw NumericalError("information_value: Cholesky failed");
  double logdet = 0.0;
  const MatrixXd L = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(L(i, i));
  return logdet;  // 0.5 * 2 * sum log diag
}

namespace detail {

// Draw one function sample over the domain rows from the GP prior.
inline VectorXd sample_gp_function(const KernelSpec& spec, const MatrixXd& X,
                                   std::mt19937_64& rng) {
  MatrixXd K = kernel_gram(spec, X);
  K.diagonal().array() += 1e-10;
  const Eigen::LLT<MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_gp_function: prior covariance not positive definite");
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd z(X.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
  return MatrixXd(llt.matrixL()) * z;
}

}  // namespace detail

// Confidence parameter of the regret analysis:
//   beta_t = 2 log(|domain| pi^2 t^2 / (3 delta)).
inline double theoretical_beta(Eigen::Index domain_size, int t, double delta) {
  require(domain_size >= 1, "theoretical_beta: empty domain");
  require(t >= 1, "theoretical_beta: t must be >= 1");
  require(delta > 0.0 && delta < 1.0, "theoretical_beta: delta must lie in (0,1)");
  const double tt = static_cast<double>(t);
  return 2.0 * std::log(static_cast<double>(domain_size) * M_PI * M_PI * tt * tt /
                        (3.0 * delta));
}

enum class CoverageMode { ColdOnly, Full };

struct CoverageReport {
  int trials = 0;
  int violated_trials = 0;

  // Fraction of trials where the confidence band missed f anywhere;
  // undefined without trials.
  std::optional<double> rate() const {
    if (trials == 0) return std::nullopt;
    return static_cast<double>(violated_trials) / static_cast<double>(trials);
  }
};

// Monte-Carlo check of the pointwise confidence statement
// |f(x) - mu_{t-1}(x)| <= sqrt(beta_t) sigma_{t-1}(x) for all x and t, with
// f drawn from the cold prior (its assumption regime), fixed true
// hyperparameters, and the theoretical beta_t. ColdOnly keeps the
// assumptions exactly; Full runs the dual-surrogate selection rule, whose
// warm model is not covered by the assumptions, so its rate is reported
// rather than asserted.
inline CoverageReport lemma_coverage(const KernelSpec& cold, double cold_noise_std,
                                     const KernelSpec& warm, double warm_noise_std,
                                     const SurrogateModel* model, const MatrixXd& domain,
                                     double delta, int rounds, int trials,
                                     std::uint64_t seed,
                                     CoverageMode mode = CoverageMode::ColdOnly,
                                     double beta_multiplier = 1.0) {
  validate(cold);
  require(std::isfinite(cold_noise_std) && cold_noise_std > 0.0,
          "lemma_coverage: cold_noise_std must be positive");
  require(domain.rows() >= 1, "lemma_coverage: empty domain");
  require(rounds >= 1, "lemma_coverage: rounds must be >= 1");
  require(trials >= 0, "lemma_coverage: trials must be >= 0");
  require(beta_multiplier > 0.0, "lemma_coverage: beta_multiplier must be positive");
  if (mode == CoverageMode::Full) {
    require(model != nullptr, "lemma_coverage: full mode needs a surrogate model");
    validate(warm);
    require(std::isfinite(warm_noise_std) && warm_noise_std > 0.0,
            "lemma_coverage: warm_noise_std must be positive");
  }

  const Eigen::Index m = domain.rows();
  MatrixXd domain_embedded;
  if (mode == CoverageMode::Full) domain_embedded = detail::embed_rows(*model, domain);

  AcqConfig acq;
  acq.l_alpha = 0.1;
  acq.total_budget = rounds;

  CoverageReport report;
  report.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 f_rng = make_rng(seed, static_cast<std::uint64_t>(trial), 0);
    std::mt19937_64 noise_rng = make_rng(seed, static_cast<std::uint64_t>(trial), 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const VectorXd f = detail::sample_gp_function(cold, domain, f_rng);

    std::vector<Eigen::Index> picks;
    VectorXd yobs(rounds);
    bool violated = false;

    for (int t = 1; t <= rounds; ++t) {
      const Eigen::Index k = static_cast<Eigen::Index>(picks.size());
      MatrixXd Xs(k, domain.cols());
      for (Eigen::Index i = 0; i < k; ++i)
        Xs.row(i) = domain.row(picks[static_cast<std::size_t>(i)]);
      const GpState cold_gp = gp_condition(cold, cold_noise_std, Xs, yobs.head(k));
      const GpPosterior post = gp_posterior(cold_gp, domain);
      const double sqrt_beta =
          std::sqrt(beta_multiplier * theoretical_beta(m, t, delta));

      for (Eigen::Index i = 0; i < m; ++i) {
        if (std::abs(f(i) - post.mean(i)) > sqrt_beta * std::sqrt(post.cov(i, i))) {
          violated = true;
          break;
        }
      }
      if (violated) break;  // the per-trial statistic is already decided

      Eigen::Index pick = -1;
      double best = 0.0;
      if (mode == CoverageMode::ColdOnly) {
        for (Eigen::Index i = 0; i < m; ++i) {
          const double s = post.mean(i) + sqrt_beta * std::sqrt(post.cov(i, i));
          if (pick < 0 || s > best) {
            pick = i;
            best = s;
          }
        }
      } else {
        MatrixXd Zs(k, domain_embedded.cols());
        for (Eigen::Index i = 0; i < k; ++i)
          Zs.row(i) = domain_embedded.row(picks[static_cast<std::size_t>(i)]);
        const GpState warm_gp = gp_condition(warm, warm_noise_std, Zs, yobs.head(k));
        const GpPosterior wpost = gp_posterior(warm_gp, domain_embedded);
        VectorXd wscore(m);
        for (Eigen::Index i = 0; i < m; ++i)
          wscore(i) = wpost.mean(i) + sqrt_beta * std::sqrt(wpost.cov(i, i));
        const WarmScale scale{wscore.minCoeff(), wscore.maxCoeff()};
        // near-optimal warm region, scored by the cold acquisition
        for (Eigen::Index i = 0; i < m; ++i) {
          if (lambda_from_scale(wscore(i), scale, acq) != 1.0) continue;
          const double s = post.mean(i) + sqrt_beta * std::sqrt(post.cov(i, i));
          if (pick < 0 || s > best) {
            pick = i;
            best = s;
          }
        }
      }
      picks.push_back(pick);
      yobs(k) = f(pick) + cold_noise_std * gauss(noise_rng);
    }
    if (violated) ++report.violated_trials;
  }
  return report;
}

// Median cumulative-regret-per-round of the theoretical-beta UCB rule at
// several horizons, one prior-sampled function per trial shared across
// horizons. A downward trend is the no-regret direction.
inline VectorXd no_regret_medians(const KernelSpec& spec, double noise_std,
                                  const MatrixXd& domain, const std::vector<int>& horizons,
                                  int trials, double delta, std::uint64_t seed) {
  validate(spec);
  require(std::isfinite(noise_std) && noise_std > 0.0,
          "no_regret_medians: noise_std must be positive");
  require(!horizons.empty(), "no_regret_medians: no horizons");
  require(trials >= 1, "no_regret_medians: trials must be >= 1");
  int t_max = 0;
  for (int h : horizons) {
    require(h >= 1, "no_regret_medians: horizons must be >= 1");
    t_max = std::max(t_max, h);
  }
  const Eigen::Index m = domain.rows();
  require(m >= 1, "no_regret_medians: empty domain");

  std::vector<std::vector<double>> per_horizon(horizons.size());
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 f_rng = make_rng(seed, static_cast<std::uint64_t>(trial), 0);
    std::mt19937_64 noise_rng = make_rng(seed, static_cast<std::uint64_t>(trial), 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const VectorXd f = detail::sample_gp_function(spec, domain, f_rng);
    const double f_star = f.maxCoeff();

    std::vector<Eigen::Index> picks;
    VectorXd yobs(t_max);
    VectorXd cumulative(t_max);
    double total = 0.0;
    for (int t = 1; t <= t_max; ++t) {
      const Eigen::Index k = static_cast<Eigen::Index>(picks.size());
      MatrixXd Xs(k, domain.cols());
      for (Eigen::Index i = 0; i < k; ++i)
        Xs.row(i) = domain.row(picks[static_cast<std::size_t>(i)]);
      const GpState gp = gp_condition(spec, noise_std, Xs, yobs.head(k));
      const GpPosterior post = gp_posterior(gp, domain);
      const double sqrt_beta = std::sqrt(theoretical_beta(m, t, delta));

      Eigen::Index pick = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double s = post.mean(i) + sqrt_beta * std::sqrt(post.cov(i, i));
        if (pick < 0 || s > best) {
          pick = i;
          best = s;
        }
      }
      picks.push_back(pick);
      yobs(k) = f(pick) + noise_std * gauss(noise_rng);
      total += f_star - f(pick);
      cumulative(t - 1) = total;
    }
    for (std::size_t h = 0; h < horizons.size(); ++h)
      per_horizon[h].push_back(cumulative(horizons[h] - 1) /
                               static_cast<double>(horizons[h]));
  }

  VectorXd medians(static_cast<Eigen::Index>(horizons.size()));
  for (std::size_t h = 0; h < horizons.size(); ++h)
    medians(static_cast<Eigen::Index>(h)) = median_of(per_horizon[h]);
  return medians;
}

}  // namespace jumbo

#endif
