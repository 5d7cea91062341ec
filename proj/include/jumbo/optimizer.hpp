#ifndef JUMBO_OPTIMIZER_HPP
#define JUMBO_OPTIMIZER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jumbo/acquisition.hpp"
#include "jumbo/benchmarks.hpp"
#include "jumbo/blr.hpp"
#include "jumbo/common.hpp"
#include "jumbo/gp_fit.hpp"
#include "jumbo/io.hpp"

namespace jumbo {

// The full strategy family: the dual-surrogate optimizer, its two
// single-surrogate limits, and two ablations (linear warm head, constant
// interpolation weight).
enum class StrategyKind { Jumbo, GpUcb, OfflineDkl, JumboBlr, JumboConstLambda };

struct Strategy {
  StrategyKind kind = StrategyKind::Jumbo;
  double l_alpha = 0.1;          // indicator window on the normalized warm gap
  double lambda_constant = 0.5;  // only used by JumboConstLambda

  bool has_warm() const { return kind != StrategyKind::GpUcb; }
  bool has_cold() const { return kind != StrategyKind::OfflineDkl; }
  bool needs_model() const { return has_warm(); }
  bool indicator() const {
    return kind == StrategyKind::Jumbo || kind == StrategyKind::JumboBlr;
  }
};

inline void validate(const Strategy& s) {
  require(s.l_alpha >= 0.0, "strategy: l_alpha must be >= 0");
  require(s.lambda_constant >= 0.0 && s.lambda_constant <= 1.0,
          "strategy: lambda_constant must lie in [0,1]");
}

inline std::string strategy_label(const Strategy& s) {
  switch (s.kind) {
    case StrategyKind::Jumbo: return "jumbo-l" + fmt_compact(s.l_alpha);
    case StrategyKind::GpUcb: return "gp-ucb";
    case StrategyKind::OfflineDkl: return "offline-dkl";
    case StrategyKind::JumboBlr: return "jumbo-blr-l" + fmt_compact(s.l_alpha);
    case StrategyKind::JumboConstLambda:
      return "jumbo-const-c" + fmt_compact(s.lambda_constant);
  }
  throw std::invalid_argument("strategy_label: unknown kind");
}

// Base name only; window and constant are set separately.
inline Strategy strategy_from_string(const std::string& name) {
  Strategy s;
  if (name == "jumbo") s.kind = StrategyKind::Jumbo;
  else if (name == "gp-ucb") s.kind = StrategyKind::GpUcb;
  else if (name == "offline-dkl") s.kind = StrategyKind::OfflineDkl;
  else if (name == "jumbo-blr") s.kind = StrategyKind::JumboBlr;
  else if (name == "jumbo-const") s.kind = StrategyKind::JumboConstLambda;
  else throw std::invalid_argument("unknown strategy: '" + name + "'");
  return s;
}

// A target task the optimizer can query. Discrete benchmarks enumerate their
// candidate rows (encoded points) with the true value per row; continuous
// ones expose the objective directly.
struct Benchmark {
  std::string name;
  SearchSpace space;
  MatrixXd candidates;       // n x d encoded rows; 0 rows means continuous
  VectorXd candidate_values; // true target value per row
  std::function<double(const VectorXd&)> truth;  // continuous objective
  double noise_std = 0.0;    // observation noise applied to queries
  double f_star = 0.0;       // best attainable true value

  bool discrete() const { return candidates.rows() > 0; }
};

inline void validate(const Benchmark& bench) {
  validate(bench.space);
  require(bench.noise_std >= 0.0, "benchmark: noise_std must be >= 0");
  if (bench.discrete()) {
    require(bench.candidates.cols() == bench.space.encoded_dim(),
            "benchmark: candidate width does not match the encoded space");
    require(bench.candidate_values.size() == bench.candidates.rows(),
            "benchmark: need one value per candidate row");
    require_finite(bench.candidate_values, "benchmark values");
  } else {
    require(static_cast<bool>(bench.truth), "benchmark: continuous objective missing");
  }
  require(std::isfinite(bench.f_star), "benchmark: f_star must be finite");
}

inline Benchmark make_benchmark(const TabularBenchmark& tb) {
  Benchmark b;
  b.name = tb.name;
  b.space = tb.space;
  b.candidates = tb.X;
  b.candidate_values = tb.f;
  b.noise_std = 0.0;
  b.f_star = tb.f_star;
  validate(b);
  return b;
}

inline Benchmark make_benchmark(const SyntheticPair& pair) {
  Benchmark b;
  b.name = pair.name;
  b.space.vars = {VarSpec::continuous(0.0, 1.0)};
  b.truth = [f = pair.f](const VectorXd& x) { return f(x(0)); };
  b.noise_std = pair.noise_std;
  b.f_star = pair.f_star;
  validate(b);
  return b;
}

// Observations are standardized before conditioning the surrogates so the
// unit-scale hyperparameter initialization is sensible; regret bookkeeping
// stays in the raw scale.
struct Standardizer {
  double mean = 0.0;
  double scale = 1.0;

  static Standardizer fit(const VectorXd& y) {
    Standardizer s;
    if (y.size() <= 1) {
      if (y.size() == 1) s.mean = y(0);
      return s;
    }
    s.mean = y.mean();
    const double sd = std::sqrt((y.array() - s.mean).square().mean());
    s.scale = sd < 1e-12 ? 1.0 : sd;
    return s;
  }

  double forward(double v) const { return (v - mean) / scale; }
  VectorXd forward(const VectorXd& v) const {
    return (v.array() - mean) / scale;
  }
  double inverse(double v) const { return v * scale + mean; }
};

struct RoundRecord {
  int t = 0;
  VectorXd x;            // encoded point queried
  double y = 0.0;        // observed value (raw scale)
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double alpha_warm = std::numeric_limits<double>::quiet_NaN();
  double alpha_cold = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double best = 0.0;           // running max of observed values
  double simple_regret = 0.0;  // f_star minus best true value queried
  double instantaneous_regret = 0.0;
  double seconds = 0.0;  // wall time; kept in memory only, never serialized
};

struct RunTrace {
  Strategy strategy;
  std::string benchmark;
  int T = 0;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  bool budget_exhausted = false;  // discrete pool ran out before T
  bool aborted = false;           // numerical failure; rounds holds the prefix
  std::string abort_reason;
};

struct RunOptions {
  KernelSpec cold_kernel{KernelKind::Matern52, 1.0, 1.0};
  double cold_noise_std = 0.1;
  KernelSpec warm_kernel{KernelKind::Matern52, 1.0, 1.0};
  double warm_noise_std = 0.1;
  bool refit_hyperparams = true;  // marginal-likelihood fit each round, n >= 2
  int fit_steps = 100;
  double fit_lr = 0.1;
  double ucb_scale_initial = 10.0;
  bool normalize_threshold = true;
  int initial_random_points = 0;
  bool no_repeat = true;  // discrete: never query the same row twice
  int cma_restarts = 4;
  CmaOptions cma{};
};

inline void validate(const RunOptions& opt) {
  validate(opt.cold_kernel);
  validate(opt.warm_kernel);
  require(opt.cold_noise_std > 0.0 && opt.warm_noise_std > 0.0,
          "run options: noise levels must be positive");
  require(opt.fit_steps >= 0, "run options: fit_steps must be >= 0");
  require(std::isfinite(opt.fit_lr) && opt.fit_lr > 0.0,
          "run options: fit_lr must be positive");
  require(opt.ucb_scale_initial > 0.0, "run options: ucb_scale_initial must be positive");
  require(opt.initial_random_points >= 0,
          "run options: initial_random_points must be >= 0");
  require(opt.cma_restarts >= 1, "run options: cma_restarts must be >= 1");
}

// Rows not yet queried, in ascending order.
inline std::vector<Eigen::Index> no_repeat_filter(Eigen::Index n_rows,
                                                  const std::vector<Eigen::Index>& visited) {
  require(n_rows >= 0, "no_repeat_filter: negative row count");
  std::vector<bool> seen(static_cast<std::size_t>(n_rows), false);
  for (const Eigen::Index r : visited) {
    require(r >= 0 && r < n_rows, "no_repeat_filter: visited row out of range");
    seen[static_cast<std::size_t>(r)] = true;
  }
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n_rows) - visited.size());
  for (Eigen::Index r = 0; r < n_rows; ++r)
    if (!seen[static_cast<std::size_t>(r)]) out.push_back(r);
  return out;
}

namespace detail {

inline void append_row(MatrixXd& M, const VectorXd& row) {
  M.conservativeResize(M.rows() + 1, row.size());
  M.row(M.rows() - 1) = row.transpose();
}

// Index of the best observation so far; -1 when empty.
inline Eigen::Index incumbent_index(const std::vector<double>& ys) {
  Eigen::Index best = -1;
  double value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ys.size(); ++i)
    if (ys[i] > value) {
      value = ys[i];
      best = static_cast<Eigen::Index>(i);
    }
  return best;
}

}  // namespace detail

// One optimization run. The random stream is derived from (seed, round,
// stage) with stage 0 the warm-acquisition search, stage 1 the selection
// search, stage 2 the observation noise, so strategies sharing a stage
// consume identical draws and the lambda-extreme reductions are exact.
inline RunTrace run(const Strategy& strategy, const Benchmark& bench,
                    const SurrogateModel* model, int T, std::uint64_t seed,
                    const RunOptions& opt = {}) {
  validate(strategy);
  validate(bench);
  validate(opt);
  require(T >= 1, "run: budget must be >= 1");
  if (strategy.needs_model()) {
    require(model != nullptr, "run: this strategy needs a pretrained surrogate");
  }
  if (model != nullptr) {
    require(model->input_dim() == bench.space.encoded_dim(),
            "run: surrogate input width does not match the encoded space");
  }

  RunTrace trace;
  trace.strategy = strategy;
  trace.benchmark = bench.name;
  trace.T = T;
  trace.seed = seed;

  const bool discrete = bench.discrete();
  const Eigen::Index dim = bench.space.encoded_dim();

  // Feature rows are computed once per candidate table.
  MatrixXd cand_embed;
  if (discrete && model != nullptr) cand_embed = detail::embed_rows(*model, bench.candidates);

  MatrixXd Xc(0, dim);  // raw encoded observations
  MatrixXd Zw(0, model != nullptr ? model->config.latent_dim : 0);
  std::vector<double> ys, fs;  // observed values / true values, raw scale
  std::vector<Eigen::Index> visited;

  // Hyperparameters carry over between rounds; each refit starts from the
  // previous optimum.
  KernelSpec cold_spec = opt.cold_kernel;
  double cold_noise = opt.cold_noise_std;
  KernelSpec warm_spec = opt.warm_kernel;
  double warm_noise = opt.warm_noise_std;
  KernelSpec blr_spec{KernelKind::Linear, 1.0, 1.0};
  double blr_noise = opt.warm_noise_std;

  AcqConfig acq;
  acq.l_alpha = strategy.l_alpha;
  acq.total_budget = T;
  acq.ucb_scale_initial = opt.ucb_scale_initial;
  acq.normalize_threshold = opt.normalize_threshold;
  if (strategy.kind == StrategyKind::JumboConstLambda) {
    acq.lambda_mode = LambdaMode::Constant;
    acq.lambda_constant = strategy.lambda_constant;
  }
  validate(acq);

  for (int t = 1; t <= T; ++t) {
    const auto round_start = std::chrono::steady_clock::now();

    std::vector<Eigen::Index> pool;
    if (discrete) {
      if (opt.no_repeat) {
        pool = no_repeat_filter(bench.candidates.rows(), visited);
      } else {
        pool.resize(static_cast<std::size_t>(bench.candidates.rows()));
        for (Eigen::Index r = 0; r < bench.candidates.rows(); ++r)
          pool[static_cast<std::size_t>(r)] = r;
      }
      if (pool.empty()) {
        trace.budget_exhausted = true;
        break;
      }
    }

    RoundRecord rec;
    rec.t = t;

    try {
      const Eigen::Index n = Xc.rows();

      if (t <= opt.initial_random_points) {
        // Random design rounds before any surrogate is trusted.
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(t), 1);
        if (discrete) {
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
          const Eigen::Index row = pool[pick(rng)];
          rec.x = bench.candidates.row(row).transpose();
          visited.push_back(row);
        } else {
          rec.x = sample_point(bench.space, rng);
        }
      } else {
        const Standardizer std_y =
            Standardizer::fit(Eigen::Map<const VectorXd>(ys.data(), n));
        const VectorXd ys_std =
            std_y.forward(Eigen::Map<const VectorXd>(ys.data(), n));

        const double beta = exploration_weight(t, T, opt.ucb_scale_initial);
        rec.beta = beta;

        std::optional<GpState> cold_gp;
        if (strategy.has_cold()) {
          if (opt.refit_hyperparams && n >= 2) {
            GpState fitted = fit_gp_hyperparams(
                gp_condition(cold_spec, cold_noise, Xc, ys_std), opt.fit_steps,
                opt.fit_lr);
            cold_spec = fitted.kernel;
            cold_noise = fitted.noise_std;
            cold_gp = std::move(fitted);
          } else {
            cold_gp = gp_condition(cold_spec, cold_noise, Xc, ys_std);
          }
        }

        std::optional<GpState> warm_gp;
        std::optional<BlrState> warm_blr;
        if (strategy.has_warm()) {
          if (strategy.kind == StrategyKind::JumboBlr) {
            // The linear warm head is fit as the equivalent linear-kernel GP:
            // the weight prior variance is its signal variance.
            if (opt.refit_hyperparams && n >= 2) {
              GpState fitted = fit_gp_hyperparams(
                  gp_condition(blr_spec, blr_noise, Zw, ys_std), opt.fit_steps,
                  opt.fit_lr);
              blr_spec = fitted.kernel;
              blr_noise = fitted.noise_std;
            }
            BlrState state;
            state.weight_prior_std = std::sqrt(blr_spec.signal_variance);
            state.noise_std = blr_noise;
            state.Phi = Zw;
            state.y = ys_std;
            warm_blr = std::move(state);
          } else {
            if (opt.refit_hyperparams && n >= 2) {
              GpState fitted = fit_gp_hyperparams(
                  gp_condition(warm_spec, warm_noise, Zw, ys_std), opt.fit_steps,
                  opt.fit_lr);
              warm_spec = fitted.kernel;
              warm_noise = fitted.noise_std;
              warm_gp = std::move(fitted);
            } else {
              warm_gp = gp_condition(warm_spec, warm_noise, Zw, ys_std);
            }
          }
        }

        auto cold_score = [&](const VectorXd& x) { return ucb(*cold_gp, x, beta); };
        auto warm_score_z = [&](const VectorXd& z) {
          if (warm_blr) {
            const BlrPrediction p = blr_fit_predict(*warm_blr, z.transpose());
            return p.mean(0) + std::sqrt(beta) * std::sqrt(p.var(0));
          }
          return ucb(*warm_gp, z, beta);
        };
        auto warm_score_x = [&](const VectorXd& x) {
          return warm_score_z(embed(*model, x));
        };

        if (discrete) {
          std::vector<double> warm_scores(pool.size());
          WarmScale scale;
          if (strategy.has_warm()) {
            scale.min = std::numeric_limits<double>::infinity();
            scale.max = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < pool.size(); ++j) {
              warm_scores[j] = warm_score_z(cand_embed.row(pool[j]).transpose());
              scale.min = std::min(scale.min, warm_scores[j]);
              scale.max = std::max(scale.max, warm_scores[j]);
            }
          }

          // Selection: the indicator restricts the pool to rows whose warm
          // score is within the window, then the cold score decides; the
          // constant mode ranks the full interpolation. Ties break to the
          // lowest row index. A zero-width window admits only the warm
          // maximizers, where the warm rule itself already settles the
          // choice; routing it through the warm argmax keeps the reduction
          // to the warm-only strategy exact even when the warm surface is
          // flat enough to tie several rows bitwise.
          std::size_t chosen = pool.size();
          double best_val = -std::numeric_limits<double>::infinity();
          auto consider = [&](std::size_t j, double v) {
            if (v > best_val) {
              best_val = v;
              chosen = j;
            }
          };
          switch (strategy.kind) {
            case StrategyKind::GpUcb:
              for (std::size_t j = 0; j < pool.size(); ++j)
                consider(j, cold_score(bench.candidates.row(pool[j]).transpose()));
              break;
            case StrategyKind::OfflineDkl:
              for (std::size_t j = 0; j < pool.size(); ++j) consider(j, warm_scores[j]);
              break;
            case StrategyKind::JumboConstLambda:
              for (std::size_t j = 0; j < pool.size(); ++j) {
                const double lam = acq.lambda_constant;
                const double cold_v =
                    cold_score(bench.candidates.row(pool[j]).transpose());
                consider(j, lam * cold_v + (1.0 - lam) * warm_scores[j]);
              }
              break;
            case StrategyKind::Jumbo:
            case StrategyKind::JumboBlr:
              if (acq.l_alpha == 0.0) {
                for (std::size_t j = 0; j < pool.size(); ++j) consider(j, warm_scores[j]);
                break;
              }
              for (std::size_t j = 0; j < pool.size(); ++j) {
                if (lambda_from_scale(warm_scores[j], scale, acq) != 1.0) continue;
                consider(j, cold_score(bench.candidates.row(pool[j]).transpose()));
              }
              break;
          }
          require(chosen < pool.size(), "run: selection produced no candidate");
          const Eigen::Index row = pool[chosen];
          rec.x = bench.candidates.row(row).transpose();
          visited.push_back(row);
          if (strategy.has_warm()) {
            rec.alpha_warm = warm_scores[chosen];
            rec.lambda = lambda_from_scale(rec.alpha_warm, scale, acq);
          }
          if (strategy.has_cold()) rec.alpha_cold = cold_score(rec.x);
        } else {
          // Continuous: search the warm acquisition first to anchor the
          // normalization window, then search the combined objective.
          VectorXd incumbent;
          const Eigen::Index inc = detail::incumbent_index(ys);
          if (inc >= 0) incumbent = Xc.row(inc).transpose();

          WarmScale scale;
          if (strategy.indicator()) {
            double wmin = std::numeric_limits<double>::infinity();
            double wmax = -std::numeric_limits<double>::infinity();
            auto tracked = [&](const VectorXd& x) {
              const double v = warm_score_x(x);
              wmin = std::min(wmin, v);
              wmax = std::max(wmax, v);
              return v;
            };
            maximize_acq(tracked, bench.space, derive_seed(seed, static_cast<std::uint64_t>(t), 0),
                         inc >= 0 ? &incumbent : nullptr, opt.cma_restarts, opt.cma);
            scale.min = wmin;
            scale.max = wmax;
          }

          std::function<double(const VectorXd&)> selection;
          switch (strategy.kind) {
            case StrategyKind::GpUcb:
              selection = cold_score;
              break;
            case StrategyKind::OfflineDkl:
              selection = warm_score_x;
              break;
            default:
              selection = [&](const VectorXd& x) {
                const double aw = warm_score_x(x);
                const double ac = cold_score(x);
                const double lam = lambda_from_scale(aw, scale, acq);
                return lam * ac + (1.0 - lam) * aw;
              };
              break;
          }
          const ContinuousArgmax best = maximize_acq(
              selection, bench.space, derive_seed(seed, static_cast<std::uint64_t>(t), 1),
              inc >= 0 ? &incumbent : nullptr, opt.cma_restarts, opt.cma);
          rec.x = best.x;
          if (strategy.has_warm()) {
            rec.alpha_warm = warm_score_x(rec.x);
            rec.lambda = strategy.indicator()
                             ? lambda_from_scale(rec.alpha_warm, scale, acq)
                             : acq.lambda_constant;
          }
          if (strategy.has_cold()) rec.alpha_cold = cold_score(rec.x);
        }

        if (strategy.kind == StrategyKind::GpUcb) rec.lambda = 1.0;
        if (strategy.kind == StrategyKind::OfflineDkl) rec.lambda = 0.0;
      }

      // True value and noisy observation of the chosen point.
      double f_true;
      if (discrete) {
        f_true = bench.candidate_values(visited.back());
      } else {
        f_true = bench.truth(rec.x);
        require(std::isfinite(f_true), "run: objective returned a non-finite value");
      }
      double y = f_true;
      if (bench.noise_std > 0.0) {
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(t), 2);
        std::normal_distribution<double> gauss(0.0, 1.0);
        y += bench.noise_std * gauss(rng);
      }

      detail::append_row(Xc, rec.x);
      if (model != nullptr) {
        detail::append_row(Zw, discrete ? VectorXd(cand_embed.row(visited.back()).transpose())
                                        : embed(*model, rec.x));
      }
      ys.push_back(y);
      fs.push_back(f_true);

      rec.y = y;
      rec.best = *std::max_element(ys.begin(), ys.end());
      rec.simple_regret = bench.f_star - *std::max_element(fs.begin(), fs.end());
      rec.instantaneous_regret = bench.f_star - f_true;
      rec.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - round_start)
              .count();
      trace.rounds.push_back(std::move(rec));
    } catch (const NumericalError& e) {
      trace.aborted = true;
      trace.abort_reason = e.what();
      break;
    }
  }
  return trace;
}

// Trace serialization: one row per round. Wall time is deliberately
// excluded so identical runs produce identical bytes.
inline std::string trace_csv(const RunTrace& trace) {
  std::ostringstream out;
  const Eigen::Index dim = trace.rounds.empty() ? 0 : trace.rounds.front().x.size();
  out << "t";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  out << ",y,lambda,alpha_warm,alpha_cold,beta,best,simple_regret\n";
  for (const RoundRecord& rec : trace.rounds) {
    out << rec.t;
    for (Eigen::Index i = 0; i < rec.x.size(); ++i) out << ',' << fmt_double(rec.x(i));
    out << ',' << fmt_double(rec.y) << ',' << fmt_double(rec.lambda) << ','
        << fmt_double(rec.alpha_warm) << ',' << fmt_double(rec.alpha_cold) << ','
        << fmt_double(rec.beta) << ',' << fmt_double(rec.best) << ','
        << fmt_double(rec.simple_regret) << '\n';
  }
  return out.str();
}

inline void write_trace_csv(const RunTrace& trace, const std::string& path) {
  write_text_atomic(path, trace_csv(trace));
}

// Per-strategy aggregate over seeds. Aborted runs are excluded from the
// statistics but counted; runs that exhausted a discrete pool early carry
// their last simple regret forward.
struct StrategySummary {
  Strategy strategy;
  std::string label;
  MatrixXd regret;  // T x n_completed simple-regret columns
  VectorXd median;
  VectorXd stderr_values;
  int failed = 0;
};

struct CompareResult {
  std::string benchmark;
  int T = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<StrategySummary> strategies;
  std::vector<RunTrace> traces;  // strategy-major, seed order, aborted included
};

inline CompareResult compare(const std::vector<Strategy>& strategies,
                             const Benchmark& bench, const SurrogateModel* model,
                             int T, const std::vector<std::uint64_t>& seeds,
                             const RunOptions& opt = {}) {
  require(!strategies.empty(), "compare: need at least one strategy");
  require(!seeds.empty(), "compare: need at least one seed");
  CompareResult result;
  result.benchmark = bench.name;
  result.T = T;
  result.seeds = seeds;
  for (const Strategy& strategy : strategies) {
    StrategySummary summary;
    summary.strategy = strategy;
    summary.label = strategy_label(strategy);
    std::vector<VectorXd> columns;
    for (const std::uint64_t seed : seeds) {
      RunTrace trace = run(strategy, bench, strategy.needs_model() ? model : nullptr,
                           T, seed, opt);
      if (trace.aborted || trace.rounds.empty()) {
        ++summary.failed;
      } else {
        VectorXd col(T);
        for (int t = 0; t < T; ++t) {
          const std::size_t i = std::min(static_cast<std::size_t>(t),
                                         trace.rounds.size() - 1);
          col(t) = trace.rounds[i].simple_regret;
        }
        columns.push_back(std::move(col));
      }
      result.traces.push_back(std::move(trace));
    }
    const Eigen::Index n_ok = static_cast<Eigen::Index>(columns.size());
    summary.regret.resize(T, n_ok);
    for (Eigen::Index c = 0; c < n_ok; ++c) summary.regret.col(c) = columns[static_cast<std::size_t>(c)];
    if (n_ok > 0) {
      summary.median.resize(T);
      summary.stderr_values.resize(T);
      for (int t = 0; t < T; ++t) {
        std::vector<double> row(summary.regret.row(t).begin(), summary.regret.row(t).end());
        summary.median(t) = median_of(row);
        summary.stderr_values(t) = stderr_of(row);
      }
    }
    result.strategies.push_back(std::move(summary));
  }
  return result;
}

// Wide per-round table: t, then median and standard error per strategy.
inline std::string aggregate_csv(const CompareResult& result) {
  std::ostringstream out;
  out << "t";
  for (const StrategySummary& s : result.strategies)
    out << ',' << s.label << "_median," << s.label << "_stderr";
  out << '\n';
  for (int t = 0; t < result.T; ++t) {
    out << (t + 1);
    for (const StrategySummary& s : result.strategies) {
      if (s.median.size() > t) {
        out << ',' << fmt_double(s.median(t)) << ',' << fmt_double(s.stderr_values(t));
      } else {
        out << ",nan,nan";
      }
    }
    out << '\n';
  }
  return out.str();
}

inline std::string summary_csv(const CompareResult& result) {
  std::ostringstream out;
  out << "strategy,final_median,final_stderr,completed,failed\n";
  for (const StrategySummary& s : result.strategies) {
    const bool has = s.median.size() > 0;
    out << s.label << ','
        << (has ? fmt_double(s.median(s.median.size() - 1)) : "nan") << ','
        << (has ? fmt_double(s.stderr_values(s.stderr_values.size() - 1)) : "nan") << ','
        << s.regret.cols() << ',' << s.failed << '\n';
  }
  return out.str();
}

}  // namespace jumbo

#endif  // JUMBO_OPTIMIZER_HPP
