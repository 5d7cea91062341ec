#ifndef JUMBO_ACQUISITION_HPP
#define JUMBO_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "jumbo/cma_es.hpp"
#include "jumbo/gp.hpp"
#include "jumbo/mlp.hpp"
#include "jumbo/search_space.hpp"

namespace jumbo {

enum class LambdaMode { Indicator, Constant };

struct AcqConfig {
  double l_alpha = 0.1;  // +infinity allowed
  int total_budget = 1;
  double ucb_scale_initial = 10.0;
  LambdaMode lambda_mode = LambdaMode::Indicator;
  double lambda_constant = 0.5;
  // compare l_alpha against min-max normalized warm scores (the default)
  // or against raw acquisition gaps
  bool normalize_threshold = true;
};

inline void validate(const AcqConfig& cfg) {
  require(cfg.l_alpha >= 0.0, "l_alpha must be >= 0");
  require(cfg.total_budget >= 1, "total_budget must be >= 1");
  require(std::isfinite(cfg.ucb_scale_initial) && cfg.ucb_scale_initial > 0.0,
          "ucb_scale_initial must be positive");
  require(cfg.lambda_constant >= 0.0 && cfg.lambda_constant <= 1.0,
          "lambda_constant must lie in [0,1]");
}

// One evaluated point of the combined acquisition. The invariant
// combined == lambda*alpha_cold + (1-lambda)*alpha_warm holds exactly.
struct AcqScore {
  double alpha_warm = 0.0;
  double alpha_cold = 0.0;
  double lambda = 1.0;
  double combined = 0.0;
};

inline double ucb(const GpState& gp, const VectorXd& x, double beta) {
  require(std::isfinite(beta) && beta >= 0.0, "ucb: beta must be >= 0");
  const auto [mean, var] = gp_mean_var(gp, x);
  return mean + std::sqrt(beta) * std::sqrt(var);
}

// Exploration coefficient schedule: initial * exp(-t/T), strictly
// decreasing so early rounds explore and late rounds exploit.
inline double exploration_weight(int t, int T, double initial = 10.0) {
  require(T >= 1 && t >= 1 && t <= T, "exploration_weight: need 1 <= t <= T");
  return initial * std::exp(-static_cast<double>(t) / static_cast<double>(T));
}

// Interpolation coefficient: 1 where the warm acquisition is within
// l_alpha of its maximum, 0 elsewhere (or the constant c).
inline double jumbo_lambda(double alpha_warm_star, double alpha_warm_x,
                           const AcqConfig& cfg) {
  require(alpha_warm_star >= alpha_warm_x - 1e-9,
          "jumbo_lambda: alpha_warm_star must be the maximum");
  if (cfg.lambda_mode == LambdaMode::Constant) return cfg.lambda_constant;
  return alpha_warm_star - alpha_warm_x <= cfg.l_alpha ? 1.0 : 0.0;
}

// Observed range of the warm acquisition this round; the threshold
// comparison runs on scores min-max normalized to [0,1] against it.
struct WarmScale {
  double min = 0.0;
  double max = 0.0;  // alpha_warm_star

  // Degenerate ranges treat every point as near-optimal; values above the
  // window (found later by continuous search) clamp to 1.
  double normalized(double a) const {
    if (!(max > min)) return 1.0;
    return std::min(1.0, (a - min) / (max - min));
  }
};

inline double lambda_from_scale(double alpha_warm, const WarmScale& scale,
                                const AcqConfig& cfg) {
  if (cfg.lambda_mode == LambdaMode::Indicator && cfg.normalize_threshold)
    return jumbo_lambda(1.0, scale.normalized(alpha_warm), cfg);
  return jumbo_lambda(std::max(scale.max, alpha_warm), alpha_warm, cfg);
}

// Combined acquisition at one point: cold UCB on the raw input, warm UCB
// on the network features, interpolated by lambda.
inline AcqScore jumbo_acq(const GpState& warm, const GpState& cold,
                          const SurrogateModel& model, const VectorXd& x, double beta,
                          const WarmScale& scale, const AcqConfig& cfg) {
  AcqScore s;
  s.alpha_warm = ucb(warm, embed(model, x), beta);
  s.alpha_cold = ucb(cold, x, beta);
  s.lambda = lambda_from_scale(s.alpha_warm, scale, cfg);
  s.combined = s.lambda * s.alpha_cold + (1.0 - s.lambda) * s.alpha_warm;
  return s;
}

struct DiscreteArgmax {
  Eigen::Index index = -1;
  double value = -std::numeric_limits<double>::infinity();
};

// Exhaustive argmax over the given candidate rows; ties go to the lowest
// row index.
inline DiscreteArgmax maximize_acq(const std::function<double(const VectorXd&)>& score,
                                   const MatrixXd& candidates,
                                   const std::vector<Eigen::Index>& rows) {
  require(!rows.empty(), "maximize_acq: empty candidate set");
  DiscreteArgmax best;
  for (Eigen::Index r : rows) {
    require(r >= 0 && r < candidates.rows(), "maximize_acq: row index out of range");
    const double v = score(candidates.row(r).transpose());
    if (best.index < 0 || v > best.value) {
      best.index = r;
      best.value = v;
    }
  }
  return best;
}

inline DiscreteArgmax maximize_acq(const std::function<double(const VectorXd&)>& score,
                                   const MatrixXd& candidates) {
  require(candidates.rows() > 0, "maximize_acq: empty candidate set");
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(candidates.rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
  return maximize_acq(score, candidates, rows);
}

struct ContinuousArgmax {
  VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

// Continuous maximization over the relaxed box: CMA-ES in normalized
// coordinates, restarted from the incumbent (or box center) plus uniform
// starts. Every evaluation goes through the encoding transform, so the
// returned point is always a valid encoded point.
inline ContinuousArgmax maximize_acq(const std::function<double(const VectorXd&)>& score,
                                     const SearchSpace& space, std::uint64_t rng_seed,
                                     const VectorXd* incumbent = nullptr,
                                     int restarts = 4, const CmaOptions& opt = {}) {
  validate(space);
  require(restarts >= 1, "maximize_acq: restarts must be >= 1");
  VectorXd lo, hi;
  space_box(space, lo, hi);
  const VectorXd range = hi - lo;
  const Eigen::Index d = lo.size();

  auto score_unit = [&](const VectorXd& u) {
    return score(transform_encoded(space, lo + u.cwiseProduct(range)));
  };
  const VectorXd unit_lo = VectorXd::Zero(d);
  const VectorXd unit_hi = VectorXd::Ones(d);

  ContinuousArgmax best;
  for (int r = 0; r < restarts; ++r) {
    VectorXd u0(d);
    if (r == 0) {
      if (incumbent != nullptr) {
        require(incumbent->size() == d, "maximize_acq: incumbent dimension mismatch");
        u0 = (*incumbent - lo).cwiseQuotient(range).cwiseMin(1.0).cwiseMax(0.0);
      } else {
        u0 = VectorXd::Constant(d, 0.5);
      }
    } else {
      std::mt19937_64 start_rng = make_rng(rng_seed, static_cast<std::uint64_t>(r), 1);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (Eigen::Index j = 0; j < d; ++j) u0(j) = unit(start_rng);
    }
    std::mt19937_64 rng = make_rng(rng_seed, static_cast<std::uint64_t>(r), 2);
    const CmaResult res = cma_es_maximize(score_unit, unit_lo, unit_hi, u0, opt, rng);
    best.evaluations += res.evaluations;
    if (best.x.size() == 0 || res.value > best.value) {
      best.value = res.value;
      best.x = transform_encoded(space, lo + res.x.cwiseProduct(range));
    }
  }
  return best;
}

}  // namespace jumbo

#endif
