#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "jumbo/optimizer.hpp"

using namespace jumbo;

namespace {

// Shared fixtures: a coarse tabular version of the periodic pair and a tiny
// surrogate pretrained on its auxiliary column. Built once; every run test
// reuses them.
struct Fixture {
  TabularBenchmark table;
  Benchmark discrete_bench;
  Benchmark continuous_bench;
  SurrogateModel model;

  Fixture() {
    const SyntheticPair pair = make_periodic_pair();
    table = tabulate_pair(pair, 25);
    discrete_bench = make_benchmark(table);
    continuous_bench = make_benchmark(make_periodic_pair(0.05));

    MlpConfig cfg;
    cfg.n_layers = 1;
    cfg.hidden_units = 8;
    cfg.latent_dim = 3;
    cfg.epochs = 30;
    cfg.batch_size = 16;
    cfg.learning_rate = 1e-3;
    cfg.seed = 7;
    model = pretrain(offline_from_pair(pair, 60, 42), cfg);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

RunOptions quick_options() {
  RunOptions opt;
  opt.fit_steps = 15;  // keep hyperparameter refits cheap in unit tests
  opt.cma.generations = 12;
  opt.cma_restarts = 2;
  return opt;
}

bool same_bits(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

// Bitwise equality on the strategy-independent columns; the lambda and
// alpha columns legitimately differ between a reduction pair.
void require_same_path(const RunTrace& a, const RunTrace& b) {
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    const RoundRecord& ra = a.rounds[i];
    const RoundRecord& rb = b.rounds[i];
    REQUIRE(ra.t == rb.t);
    REQUIRE(ra.x.size() == rb.x.size());
    for (Eigen::Index j = 0; j < ra.x.size(); ++j) REQUIRE(ra.x(j) == rb.x(j));
    REQUIRE(ra.y == rb.y);
    REQUIRE(same_bits(ra.beta, rb.beta));
    REQUIRE(ra.best == rb.best);
    REQUIRE(ra.simple_regret == rb.simple_regret);
  }
}

}  // namespace

TEST_CASE("strategy labels name the run and parse back", "[optimizer]") {
  Strategy s;
  REQUIRE(strategy_label(s) == "jumbo-l0.1");
  s.l_alpha = std::numeric_limits<double>::infinity();
  REQUIRE(strategy_label(s) == "jumbo-linf");
  s = strategy_from_string("gp-ucb");
  REQUIRE(s.kind == StrategyKind::GpUcb);
  REQUIRE(strategy_label(s) == "gp-ucb");
  REQUIRE(strategy_label(strategy_from_string("offline-dkl")) == "offline-dkl");
  Strategy blr = strategy_from_string("jumbo-blr");
  blr.l_alpha = 0.25;
  REQUIRE(strategy_label(blr) == "jumbo-blr-l0.25");
  Strategy c = strategy_from_string("jumbo-const");
  c.lambda_constant = 0.5;
  REQUIRE(strategy_label(c) == "jumbo-const-c0.5");
  REQUIRE_THROWS_AS(strategy_from_string("thompson"), std::invalid_argument);
}

TEST_CASE("strategy capability flags follow the kind", "[optimizer]") {
  Strategy s;
  s.kind = StrategyKind::GpUcb;
  REQUIRE(!s.has_warm());
  REQUIRE(s.has_cold());
  REQUIRE(!s.needs_model());
  s.kind = StrategyKind::OfflineDkl;
  REQUIRE(s.has_warm());
  REQUIRE(!s.has_cold());
  REQUIRE(s.needs_model());
  s.kind = StrategyKind::Jumbo;
  REQUIRE(s.indicator());
  s.kind = StrategyKind::JumboConstLambda;
  REQUIRE(!s.indicator());
  s.lambda_constant = 1.5;
  REQUIRE_THROWS_AS(validate(s), std::invalid_argument);
  s.lambda_constant = 0.5;
  s.kind = StrategyKind::Jumbo;
  s.l_alpha = -0.1;
  REQUIRE_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("standardizer centers and rescales", "[optimizer]") {
  VectorXd y(4);
  y << 1.0, 2.0, 3.0, 4.0;
  const Standardizer st = Standardizer::fit(y);
  REQUIRE(st.mean == Catch::Approx(2.5));
  const double pop_std = std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 4.0);
  REQUIRE(st.scale == Catch::Approx(pop_std));
  REQUIRE(st.inverse(st.forward(3.7)) == Catch::Approx(3.7).epsilon(1e-14));
  REQUIRE(st.forward(y).mean() == Catch::Approx(0.0).margin(1e-14));

  const Standardizer flat = Standardizer::fit(VectorXd::Constant(3, 3.0));
  REQUIRE(flat.mean == Catch::Approx(3.0));
  REQUIRE(flat.scale == 1.0);

  const Standardizer single = Standardizer::fit(VectorXd::Constant(1, 5.0));
  REQUIRE(single.mean == Catch::Approx(5.0));
  REQUIRE(single.scale == 1.0);
}

TEST_CASE("no-repeat filter drops visited rows", "[optimizer]") {
  const std::vector<Eigen::Index> visited{1, 3};
  const std::vector<Eigen::Index> pool = no_repeat_filter(5, visited);
  const std::vector<Eigen::Index> expected{0, 2, 4};
  REQUIRE(pool == expected);
  REQUIRE(no_repeat_filter(2, {0, 1}).empty());
  REQUIRE(no_repeat_filter(3, {}).size() == 3);
}

TEST_CASE("benchmark construction checks its pieces", "[optimizer]") {
  Benchmark b = fixture().discrete_bench;
  REQUIRE(b.discrete());
  REQUIRE(b.candidates.rows() == 25);
  b.noise_std = -1.0;
  REQUIRE_THROWS_AS(validate(b), std::invalid_argument);

  Benchmark c = fixture().continuous_bench;
  REQUIRE(!c.discrete());
  c.f_star = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(validate(c), std::invalid_argument);
}

TEST_CASE("a model is demanded exactly when the strategy warms up",
          "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy jumbo;
  REQUIRE_THROWS_AS(run(jumbo, fx.discrete_bench, nullptr, 3, 1, quick_options()),
                    std::invalid_argument);
  Strategy cold = strategy_from_string("gp-ucb");
  const RunTrace t = run(cold, fx.discrete_bench, nullptr, 3, 1, quick_options());
  REQUIRE(t.rounds.size() == 3);
}

TEST_CASE("discrete runs keep the bookkeeping invariants", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy jumbo;  // indicator, l_alpha 0.1
  const RunTrace trace =
      run(jumbo, fx.discrete_bench, &fx.model, 10, 3, quick_options());
  REQUIRE(!trace.aborted);
  REQUIRE(!trace.budget_exhausted);
  REQUIRE(trace.rounds.size() == 10);

  std::set<double> seen_x;
  double best = -std::numeric_limits<double>::infinity();
  double prev_regret = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const RoundRecord& rec = trace.rounds[i];
    REQUIRE(rec.t == static_cast<int>(i) + 1);
    REQUIRE(rec.x.size() == 1);
    // No-repeat: each round must visit a fresh table row.
    REQUIRE(seen_x.insert(rec.x(0)).second);
    best = std::max(best, rec.y);
    REQUIRE(rec.best == best);
    // Noiseless table: observed equals true, so regret tracks best directly.
    REQUIRE(rec.simple_regret ==
            Catch::Approx(fx.discrete_bench.f_star - best).margin(1e-15));
    REQUIRE(rec.simple_regret <= prev_regret);
    prev_regret = rec.simple_regret;
    // The pool filter admits only unit-lambda rows, so the chosen row
    // always sits inside the indicator window.
    REQUIRE(rec.lambda == 1.0);
    REQUIRE(std::isfinite(rec.alpha_warm));
    REQUIRE(std::isfinite(rec.alpha_cold));
    REQUIRE(std::isfinite(rec.beta));
    REQUIRE(rec.beta <= 10.0);
  }
}

TEST_CASE("exhausting a finite pool stops the run early", "[optimizer]") {
  const SyntheticPair pair = make_periodic_pair();
  const Benchmark tiny = make_benchmark(tabulate_pair(pair, 5));
  Strategy cold = strategy_from_string("gp-ucb");
  const RunTrace trace = run(cold, tiny, nullptr, 10, 1, quick_options());
  REQUIRE(trace.budget_exhausted);
  REQUIRE(!trace.aborted);
  REQUIRE(trace.rounds.size() == 5);
  REQUIRE(trace.rounds.back().simple_regret == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("traces are bitwise reproducible per seed", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy jumbo;
  const RunTrace a = run(jumbo, fx.discrete_bench, &fx.model, 6, 5, quick_options());
  const RunTrace b = run(jumbo, fx.discrete_bench, &fx.model, 6, 5, quick_options());
  REQUIRE(trace_csv(a) == trace_csv(b));

  // Observation noise separates seeds on the continuous benchmark.
  Strategy cold = strategy_from_string("gp-ucb");
  const RunTrace c = run(cold, fx.continuous_bench, nullptr, 4, 5, quick_options());
  const RunTrace d = run(cold, fx.continuous_bench, nullptr, 4, 6, quick_options());
  REQUIRE(trace_csv(c) != trace_csv(d));
  const RunTrace e = run(cold, fx.continuous_bench, nullptr, 4, 5, quick_options());
  REQUIRE(trace_csv(c) == trace_csv(e));
}

TEST_CASE("an infinite window reduces to the cold-only rule", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy wide;
  wide.l_alpha = std::numeric_limits<double>::infinity();
  Strategy cold = strategy_from_string("gp-ucb");
  for (std::uint64_t seed : {11u, 12u}) {
    const RunTrace a = run(wide, fx.discrete_bench, &fx.model, 8, seed, quick_options());
    const RunTrace b = run(cold, fx.discrete_bench, nullptr, 8, seed, quick_options());
    require_same_path(a, b);
  }
}

TEST_CASE("a zero window reduces to the warm-only rule", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy narrow;
  narrow.l_alpha = 0.0;
  Strategy warm = strategy_from_string("offline-dkl");
  for (std::uint64_t seed : {11u, 12u}) {
    const RunTrace a = run(narrow, fx.discrete_bench, &fx.model, 8, seed, quick_options());
    const RunTrace b = run(warm, fx.discrete_bench, &fx.model, 8, seed, quick_options());
    require_same_path(a, b);
  }
}

TEST_CASE("the infinite-window reduction also holds off the grid", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy wide;
  wide.l_alpha = std::numeric_limits<double>::infinity();
  Strategy cold = strategy_from_string("gp-ucb");
  const RunTrace a = run(wide, fx.continuous_bench, &fx.model, 5, 21, quick_options());
  const RunTrace b = run(cold, fx.continuous_bench, nullptr, 5, 21, quick_options());
  require_same_path(a, b);
}

TEST_CASE("ablation strategies complete and log their lambdas", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy constant = strategy_from_string("jumbo-const");
  const RunTrace c = run(constant, fx.discrete_bench, &fx.model, 5, 2, quick_options());
  REQUIRE(c.rounds.size() == 5);

  Strategy blr = strategy_from_string("jumbo-blr");
  const RunTrace br = run(blr, fx.discrete_bench, &fx.model, 5, 2, quick_options());
  REQUIRE(br.rounds.size() == 5);
  for (const RoundRecord& rec : br.rounds) REQUIRE(rec.lambda == 1.0);

  Strategy cold = strategy_from_string("gp-ucb");
  const RunTrace g = run(cold, fx.discrete_bench, nullptr, 5, 2, quick_options());
  for (const RoundRecord& rec : g.rounds) {
    REQUIRE(rec.lambda == 1.0);
    REQUIRE(std::isnan(rec.alpha_warm));
  }
  Strategy warm = strategy_from_string("offline-dkl");
  const RunTrace w = run(warm, fx.discrete_bench, &fx.model, 5, 2, quick_options());
  for (const RoundRecord& rec : w.rounds) {
    REQUIRE(rec.lambda == 0.0);
    REQUIRE(std::isnan(rec.alpha_cold));
  }
}

TEST_CASE("seeding rounds query at random before the surrogates engage",
          "[optimizer]") {
  const Fixture& fx = fixture();
  RunOptions opt = quick_options();
  opt.initial_random_points = 2;
  Strategy jumbo;
  const RunTrace trace = run(jumbo, fx.discrete_bench, &fx.model, 6, 9, opt);
  REQUIRE(trace.rounds.size() == 6);
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const RoundRecord& rec = trace.rounds[i];
    if (i < 2) {
      REQUIRE(std::isnan(rec.beta));
      REQUIRE(std::isnan(rec.lambda));
    } else {
      REQUIRE(std::isfinite(rec.beta));
    }
  }
}

TEST_CASE("continuous runs stay inside the box and observe noisily",
          "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy jumbo;
  const RunTrace trace =
      run(jumbo, fx.continuous_bench, &fx.model, 5, 4, quick_options());
  REQUIRE(!trace.aborted);
  REQUIRE(trace.rounds.size() == 5);
  const SyntheticPair pair = make_periodic_pair();
  for (const RoundRecord& rec : trace.rounds) {
    REQUIRE(rec.x.size() == 1);
    REQUIRE(rec.x(0) >= 0.0);
    REQUIRE(rec.x(0) <= 1.0);
    // Observation = truth + noise; regret is computed on the noiseless value.
    const double f_true = pair.f(rec.x(0));
    REQUIRE(std::abs(rec.y - f_true) < 1.0);
    REQUIRE(rec.simple_regret >= -1e-6);
  }
}

TEST_CASE("the trace header matches the encoded dimension", "[optimizer]") {
  const Fixture& fx = fixture();
  Strategy cold = strategy_from_string("gp-ucb");
  const RunTrace trace = run(cold, fx.discrete_bench, nullptr, 2, 1, quick_options());
  const std::string csv = trace_csv(trace);
  REQUIRE(csv.rfind("t,x0,y,lambda,alpha_warm,alpha_cold,beta,best,simple_regret\n",
                    0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("comparisons aggregate seeds per strategy", "[optimizer]") {
  const Fixture& fx = fixture();
  const std::vector<Strategy> strategies{Strategy{},
                                         strategy_from_string("gp-ucb")};
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const CompareResult result =
      compare(strategies, fx.discrete_bench, &fx.model, 6, seeds, quick_options());
  REQUIRE(result.T == 6);
  REQUIRE(result.strategies.size() == 2);
  REQUIRE(result.traces.size() == 6);
  for (const StrategySummary& s : result.strategies) {
    REQUIRE(s.failed == 0);
    REQUIRE(s.regret.rows() == 6);
    REQUIRE(s.regret.cols() == 3);
    REQUIRE(s.median.size() == 6);
    REQUIRE(s.stderr_values.size() == 6);
    REQUIRE(s.median.allFinite());
    // Medians of simple regret never increase over rounds.
    for (Eigen::Index t = 1; t < s.median.size(); ++t)
      REQUIRE(s.median(t) <= s.median(t - 1) + 1e-15);
  }

  const std::string agg = aggregate_csv(result);
  REQUIRE(agg.rfind("t,jumbo-l0.1_median,jumbo-l0.1_stderr,gp-ucb_median,"
                    "gp-ucb_stderr\n",
                    0) == 0);
  REQUIRE(std::count(agg.begin(), agg.end(), '\n') == 7);

  const std::string sum = summary_csv(result);
  REQUIRE(sum.rfind("strategy,final_median,final_stderr,completed,failed\n", 0) ==
          0);
  REQUIRE(std::count(sum.begin(), sum.end(), '\n') == 3);
}
