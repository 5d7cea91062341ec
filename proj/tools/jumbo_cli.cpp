// jumbo: pretrain surrogates, run optimization strategies, aggregate traces,
// and exercise the confidence-bound theory from the command line.
//
// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or config
// error. JUMBO_THREADS caps Eigen's internal parallelism.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jumbo/jumbo.hpp"
#include "jumbo/reporting.hpp"

namespace {

using namespace jumbo;

// Sectioned key-value config: '[section]' headers, 'key = value' lines,
// '#' comments. Flat map keyed as "section.key".
using Config = std::map<std::string, std::string>;

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = strip(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      section = strip(line.substr(1, line.size() - 2));
      require(!section.empty(), "config line " + std::to_string(line_no) +
                                    ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = strip(line.substr(0, eq));
    require(!key.empty(),
            "config line " + std::to_string(line_no) + ": empty key");
    require(!section.empty(), "config line " + std::to_string(line_no) +
                                  ": key before any [section]");
    cfg[section + "." + key] = strip(line.substr(eq + 1));
  }
  return cfg;
}

Config load_config(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw std::invalid_argument("config file not found: " + path);
  return parse_config_text(read_text(path));
}

std::string get_str(const Config& cfg, const std::string& key,
                    const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

std::string get_required(const Config& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end())
    throw std::invalid_argument("config: missing required key '" + key + "'");
  return it->second;
}

double get_double(const Config& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    return parse_double(it->second);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' is not a number: '" +
                                it->second + "'");
  }
}

int get_int(const Config& cfg, const std::string& key, int fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    require(used == it->second.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' is not an integer: '" + it->second + "'");
  }
}

bool get_bool(const Config& cfg, const std::string& key, bool fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument("config: key '" + key +
                              "' must be true or false, got '" + it->second +
                              "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& tok : split_list(s)) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(tok, &used));
      require(used == tok.size(), "trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("seeds: '" + tok + "' is not an integer");
    }
  }
  require(!seeds.empty(), "seeds: empty list");
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      require(seeds[i] != seeds[j], "seeds: duplicate seed " +
                                        std::to_string(seeds[i]));
  return seeds;
}

// Benchmark assembly shared by pretrain (offline data) and run (objective).
struct BenchmarkBundle {
  Benchmark bench;
  std::optional<SyntheticPair> pair;           // set for synthetic kinds
  std::optional<TabularBenchmark> table;       // set for tabular kind
};

BenchmarkBundle build_benchmark(const Config& cfg) {
  BenchmarkBundle out;
  const std::string kind = get_required(cfg, "benchmark.kind");
  if (kind == "periodic1d") {
    const double noise = get_double(cfg, "benchmark.noise", 0.0);
    out.pair = make_periodic_pair(noise);
    const int grid = get_int(cfg, "benchmark.grid", 0);
    if (grid > 0) {
      out.table = tabulate_pair(*out.pair, grid);
      out.bench = make_benchmark(*out.table);
    } else {
      out.bench = make_benchmark(*out.pair);
    }
  } else if (kind == "tabular") {
    const std::string path = get_required(cfg, "benchmark.path");
    if (!std::filesystem::exists(path))
      throw std::invalid_argument("benchmark file not found: " + path);
    out.table = load_tabular(path);
    out.bench = make_benchmark(*out.table);
  } else {
    throw std::invalid_argument("benchmark.kind must be periodic1d or tabular, got '" +
                                kind + "'");
  }
  return out;
}

OfflineDataset build_offline(const Config& cfg, const BenchmarkBundle& bundle) {
  if (bundle.pair && !bundle.table) {
    const int samples = get_int(cfg, "offline.samples", 500);
    const auto seed = static_cast<std::uint64_t>(get_int(cfg, "offline.seed", 0));
    const double noise = get_double(cfg, "offline.noise", 0.0);
    require(samples >= 1, "offline.samples must be >= 1");
    return offline_from_pair(*bundle.pair, samples, seed, noise);
  }
  return offline_from_tabular(*bundle.table);
}

MlpConfig build_mlp_config(const Config& cfg, Eigen::Index num_tasks) {
  MlpConfig m;
  m.n_layers = get_int(cfg, "model.layers", m.n_layers);
  m.hidden_units = get_int(cfg, "model.hidden", m.hidden_units);
  m.latent_dim = get_int(cfg, "model.latent", m.latent_dim);
  m.dropout_rate = get_double(cfg, "model.dropout", m.dropout_rate);
  m.epochs = get_int(cfg, "model.epochs", m.epochs);
  m.batch_size = get_int(cfg, "model.batch", m.batch_size);
  m.learning_rate = get_double(cfg, "model.lr", m.learning_rate);
  m.seed = static_cast<std::uint64_t>(get_int(cfg, "model.seed", 0));
  m.val_fraction = get_double(cfg, "model.val_fraction", m.val_fraction);
  m.patience = get_int(cfg, "model.patience", m.patience);
  m.num_tasks = static_cast<int>(num_tasks);
  validate(m);
  return m;
}

KernelSpec build_kernel(const Config& cfg, const std::string& prefix,
                        const KernelSpec& fallback) {
  KernelSpec k = fallback;
  const std::string name = get_str(cfg, prefix + "_kernel", to_string(k.kind));
  k.kind = kernel_kind_from_string(name);
  k.lengthscale = get_double(cfg, prefix + "_lengthscale", k.lengthscale);
  k.signal_variance = get_double(cfg, prefix + "_signal_variance", k.signal_variance);
  validate(k);
  return k;
}

RunOptions build_run_options(const Config& cfg) {
  RunOptions opt;
  opt.cold_kernel = build_kernel(cfg, "run.cold", opt.cold_kernel);
  opt.cold_noise_std = get_double(cfg, "run.cold_noise_std", opt.cold_noise_std);
  opt.warm_kernel = build_kernel(cfg, "run.warm", opt.warm_kernel);
  opt.warm_noise_std = get_double(cfg, "run.warm_noise_std", opt.warm_noise_std);
  opt.refit_hyperparams = get_bool(cfg, "run.refit", opt.refit_hyperparams);
  opt.fit_steps = get_int(cfg, "run.fit_steps", opt.fit_steps);
  opt.fit_lr = get_double(cfg, "run.fit_lr", opt.fit_lr);
  opt.ucb_scale_initial = get_double(cfg, "run.ucb_scale", opt.ucb_scale_initial);
  opt.normalize_threshold =
      get_bool(cfg, "run.normalize_threshold", opt.normalize_threshold);
  opt.initial_random_points =
      get_int(cfg, "run.initial_random", opt.initial_random_points);
  opt.no_repeat = get_bool(cfg, "run.no_repeat", opt.no_repeat);
  opt.cma_restarts = get_int(cfg, "run.cma_restarts", opt.cma_restarts);
  opt.cma.population = get_int(cfg, "run.cma_population", opt.cma.population);
  opt.cma.generations = get_int(cfg, "run.cma_generations", opt.cma.generations);
  opt.cma.sigma0 = get_double(cfg, "run.cma_sigma0", opt.cma.sigma0);
  validate(opt);
  return opt;
}

std::vector<Strategy> build_strategies(const Config& cfg,
                                       const std::string& strategy_flag,
                                       const std::string& l_alpha_flag) {
  std::vector<std::string> names;
  if (!strategy_flag.empty()) {
    names = split_list(strategy_flag);
  } else {
    names = split_list(get_str(cfg, "run.strategies", "jumbo"));
  }
  require(!names.empty(), "no strategies requested");

  double l_alpha = get_double(cfg, "run.l_alpha", 0.1);
  if (!l_alpha_flag.empty()) {
    try {
      l_alpha = parse_double(l_alpha_flag);
    } catch (const std::exception&) {
      throw std::invalid_argument("--l-alpha: not a number: '" + l_alpha_flag + "'");
    }
  }
  const double lambda_constant = get_double(cfg, "run.lambda_constant", 0.5);

  std::vector<Strategy> out;
  for (const std::string& name : names) {
    Strategy s = strategy_from_string(name);
    s.l_alpha = l_alpha;
    s.lambda_constant = lambda_constant;
    validate(s);
    out.push_back(s);
  }
  return out;
}

int cmd_pretrain(const std::string& config_path, const std::string& out_path) {
  const Config cfg = load_config(config_path);
  const BenchmarkBundle bundle = build_benchmark(cfg);
  const OfflineDataset data = build_offline(cfg, bundle);
  const MlpConfig mcfg =
      build_mlp_config(cfg, static_cast<Eigen::Index>(data.tasks.size()));

  const SurrogateModel model = pretrain(data, mcfg);
  save_model(model, out_path);

  // Epoch-by-epoch training curve next to the model file.
  std::ostringstream loss;
  loss << "epoch,train_mse\n";
  for (std::size_t e = 0; e < model.loss_history.size(); ++e)
    loss << e + 1 << ',' << fmt_double(model.loss_history[e]) << '\n';
  std::filesystem::path loss_path(out_path);
  loss_path.replace_extension(".loss.csv");
  write_text_atomic(loss_path.string(), loss.str());

  std::cout << "model: " << out_path << " (" << data.tasks.size()
            << " tasks, input dim " << model.input_dim() << ")\n";
  for (std::size_t k = 0; k < data.tasks.size(); ++k) {
    const TaskData& task = data.tasks[k];
    double mse = 0.0;
    for (Eigen::Index i = 0; i < task.X.rows(); ++i) {
      const MlpForward f = mlp_forward(model, task.X.row(i).transpose());
      const double target =
          (task.y(i) - model.y_mean(static_cast<Eigen::Index>(k))) /
          model.y_std(static_cast<Eigen::Index>(k));
      const double err = f.heads(static_cast<Eigen::Index>(k)) - target;
      mse += err * err;
    }
    mse /= static_cast<double>(task.X.rows());
    std::cout << "task " << task.name << ": mse " << fmt_compact(mse) << '\n';
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& model_path,
            const std::string& out_dir, const std::string& seeds_flag,
            int budget_flag, const std::string& strategy_flag,
            const std::string& l_alpha_flag) {
  const Config cfg = load_config(config_path);
  const BenchmarkBundle bundle = build_benchmark(cfg);
  const std::vector<Strategy> strategies =
      build_strategies(cfg, strategy_flag, l_alpha_flag);
  const RunOptions opt = build_run_options(cfg);

  const int budget =
      budget_flag > 0 ? budget_flag : get_int(cfg, "run.budget", 50);
  require(budget >= 1, "budget must be >= 1");
  const std::vector<std::uint64_t> seeds =
      parse_seeds(seeds_flag.empty() ? get_str(cfg, "run.seeds", "0") : seeds_flag);

  std::optional<SurrogateModel> model;
  const bool any_warm = std::any_of(strategies.begin(), strategies.end(),
                                    [](const Strategy& s) { return s.needs_model(); });
  if (any_warm) {
    std::string path = model_path.empty() ? get_str(cfg, "run.model", "") : model_path;
    if (path.empty())
      throw std::invalid_argument(
          "a warm-started strategy needs a pretrained surrogate: pass --model "
          "or set run.model");
    if (!std::filesystem::exists(path))
      throw std::invalid_argument("model file not found: " + path);
    model = load_model(path);
  }

  const std::string dir = out_dir.empty() ? get_str(cfg, "run.out", "runs") : out_dir;
  std::filesystem::create_directories(dir);

  int failed = 0;
  for (const Strategy& strategy : strategies) {
    const SurrogateModel* m = strategy.needs_model() ? &*model : nullptr;
    for (std::uint64_t seed : seeds) {
      try {
        const RunTrace trace = run(strategy, bundle.bench, m, budget, seed, opt);
        const std::string stem = write_run_outputs(trace, opt, dir);
        std::cout << stem << ": rounds " << trace.rounds.size();
        if (!trace.rounds.empty())
          std::cout << ", final regret "
                    << fmt_compact(trace.rounds.back().simple_regret);
        if (trace.aborted) {
          std::cout << ", ABORTED (" << trace.abort_reason << ")";
          ++failed;
        }
        std::cout << '\n';
      } catch (const std::exception& e) {
        std::cerr << strategy_label(strategy) << " seed " << seed
                  << " failed: " << e.what() << '\n';
        ++failed;
      }
    }
  }
  if (failed > 0) {
    std::cerr << failed << " run(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_dir) {
  if (!std::filesystem::is_directory(in_dir))
    throw std::invalid_argument("not a directory: " + in_dir);
  // An empty directory surfaces as invalid_argument, i.e. a usage error.
  const ReportTables tables = report_from_directory(in_dir);
  const std::string dir = out_dir.empty() ? in_dir : out_dir;
  std::filesystem::create_directories(dir);
  const auto agg = std::filesystem::path(dir) / "aggregate.csv";
  const auto sum = std::filesystem::path(dir) / "summary.csv";
  write_text_atomic(agg.string(), tables.aggregate);
  write_text_atomic(sum.string(), tables.summary);
  std::cout << "wrote " << agg.string() << " and " << sum.string() << '\n';
  std::cout << tables.summary;
  return 0;
}

MatrixXd unit_grid(int points) {
  require(points >= 2, "domain must have at least 2 points");
  MatrixXd X(points, 1);
  for (int i = 0; i < points; ++i)
    X(i, 0) = static_cast<double>(i) / static_cast<double>(points - 1);
  return X;
}

int cmd_theory_lemma1(int domain, double lengthscale, double noise, double delta,
                      int rounds, int trials, std::uint64_t seed, double tol,
                      const std::string& out_path) {
  const KernelSpec cold{KernelKind::Matern52, lengthscale, 1.0};
  const MatrixXd X = unit_grid(domain);
  const CoverageReport rep = lemma_coverage(cold, noise, cold, noise, nullptr, X,
                                            delta, rounds, trials, seed);
  const double rate = rep.rate().value_or(0.0);
  const bool pass = rate <= tol;
  std::cout << "confidence-bound coverage: " << rep.violated_trials << "/"
            << rep.trials << " trials violated, rate " << fmt_compact(rate)
            << ", tolerance " << fmt_compact(tol) << " -> "
            << (pass ? "PASS" : "FAIL") << '\n';
  if (!out_path.empty()) {
    std::ostringstream csv;
    csv << "domain,delta,rounds,trials,violated,rate\n"
        << domain << ',' << fmt_double(delta) << ',' << rounds << ','
        << rep.trials << ',' << rep.violated_trials << ',' << fmt_double(rate)
        << '\n';
    write_text_atomic(out_path, csv.str());
  }
  return pass ? 0 : 1;
}

int cmd_theory_mig(int candidates, int n, double lengthscale, double noise,
                   const std::string& out_path) {
  require(n >= 0, "--n must be >= 0");
  require(n <= candidates, "--n exceeds the candidate count");
  const KernelSpec spec{KernelKind::Matern52, lengthscale, 1.0};
  const MatrixXd X = unit_grid(candidates);
  const MigResult res = mig_greedy_select(spec, X, n, noise);
  std::cout << "greedy information gain over " << n << " of " << candidates
            << " candidates: " << fmt_compact(res.value) << " nats\n";
  if (!out_path.empty()) {
    std::ostringstream csv;
    csv << "step,chosen,gain,total\n";
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += res.gains(i);
      csv << i + 1 << ',' << res.chosen[static_cast<std::size_t>(i)] << ','
          << fmt_double(res.gains(i)) << ',' << fmt_double(total) << '\n';
    }
    write_text_atomic(out_path, csv.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("JUMBO_THREADS")) {
    const int n = std::atoi(threads);
    if (n >= 1) Eigen::setNbThreads(n);
  }

  CLI::App app{"Multi-task Bayesian optimization with a warm-started dual surrogate"};
  app.require_subcommand(1);

  std::string config_path, model_path, out_path, seeds_flag, strategy_flag,
      l_alpha_flag, in_dir;
  int budget_flag = 0;

  CLI::App* pre = app.add_subcommand(
      "pretrain", "Train the offline surrogate and save it to disk");
  pre->add_option("--config", config_path, "config file")->required();
  pre->add_option("--out", out_path, "output model file")->required();

  CLI::App* runc = app.add_subcommand(
      "run", "Run optimization strategies and write one trace per seed");
  runc->add_option("--config", config_path, "config file")->required();
  runc->add_option("--model", model_path, "pretrained surrogate file");
  runc->add_option("--out", out_path, "output directory for traces");
  runc->add_option("--seeds", seeds_flag, "comma-separated seed list");
  runc->add_option("--budget", budget_flag, "number of rounds");
  runc->add_option("--strategy", strategy_flag,
                   "strategy list (jumbo, gp-ucb, offline-dkl, jumbo-blr, jumbo-const)");
  runc->add_option("--l-alpha", l_alpha_flag,
                   "indicator window on the normalized warm gap (inf allowed)");

  CLI::App* rep = app.add_subcommand(
      "report", "Aggregate trace CSVs into median/stderr tables");
  rep->add_option("--in", in_dir, "directory of trace CSVs")->required();
  rep->add_option("--out", out_path, "output directory (default: --in)");

  CLI::App* theory = app.add_subcommand("theory", "Empirical theory checks");
  theory->require_subcommand(1);

  int domain = 50, rounds = 15, trials = 200, candidates = 50, n_select = 10;
  double lengthscale = 0.4, noise = 0.1, delta = 0.1, tol = 0.135;
  std::uint64_t seed = 0;

  CLI::App* lemma = theory->add_subcommand(
      "lemma1", "Monte-Carlo coverage of the UCB confidence band");
  lemma->add_option("--domain", domain, "grid points in [0,1]");
  lemma->add_option("--lengthscale", lengthscale, "kernel lengthscale");
  lemma->add_option("--noise", noise, "observation noise std");
  lemma->add_option("--delta", delta, "confidence parameter");
  lemma->add_option("--rounds", rounds, "rounds per trial");
  lemma->add_option("--trials", trials, "Monte-Carlo trials");
  lemma->add_option("--seed", seed, "random seed");
  lemma->add_option("--tol", tol, "maximum acceptable violation rate");
  lemma->add_option("--out", out_path, "optional CSV output file");

  CLI::App* mig = theory->add_subcommand(
      "mig", "Greedy maximum information gain on a grid");
  mig->add_option("--candidates", candidates, "grid points in [0,1]");
  mig->add_option("--n", n_select, "selections");
  mig->add_option("--lengthscale", lengthscale, "kernel lengthscale");
  mig->add_option("--noise", noise, "observation noise std");
  mig->add_option("--out", out_path, "optional CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (pre->parsed()) return cmd_pretrain(config_path, out_path);
    if (runc->parsed())
      return cmd_run(config_path, model_path, out_path, seeds_flag, budget_flag,
                     strategy_flag, l_alpha_flag);
    if (rep->parsed()) return cmd_report(in_dir, out_path);
    if (theory->parsed()) {
      if (lemma->parsed())
        return cmd_theory_lemma1(domain, lengthscale, noise, delta, rounds,
                                 trials, seed, tol, out_path);
      if (mig->parsed())
        return cmd_theory_mig(candidates, n_select, lengthscale, noise, out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
