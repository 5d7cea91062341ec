#ifndef JUMBO_MLP_HPP
#define JUMBO_MLP_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "jumbo/gp_fit.hpp"

namespace jumbo {

// Architecture and training schedule of the multi-head surrogate network:
// n_layers tanh layers of hidden_units, dropout, tanh projection to
// latent_dim, one linear head per task.
struct MlpConfig {
  int n_layers = 3;
  int hidden_units = 32;
  int latent_dim = 4;
  double dropout_rate = 0.0;
  int num_tasks = 1;
  double learning_rate = 5e-5;
  int batch_size = 128;
  int epochs = 200;
  std::uint64_t seed = 0;
  double val_fraction = 0.2;  // held out per task for early stopping
  int patience = 20;          // epochs without validation improvement before stopping
};

inline void validate(const MlpConfig& cfg) {
  require(cfg.n_layers >= 1, "mlp: n_layers must be >= 1");
  require(cfg.hidden_units >= 1, "mlp: hidden_units must be >= 1");
  require(cfg.latent_dim >= 1, "mlp: latent_dim must be >= 1");
  require(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0,
          "mlp: dropout_rate must be in [0,1)");
  require(cfg.num_tasks >= 1, "mlp: num_tasks must be >= 1");
  require(std::isfinite(cfg.learning_rate) && cfg.learning_rate > 0.0,
          "mlp: learning_rate must be positive");
  require(cfg.batch_size >= 1, "mlp: batch_size must be >= 1");
  require(cfg.epochs >= 0, "mlp: epochs must be >= 0");
  require(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0,
          "mlp: val_fraction must be in [0,1)");
  require(cfg.patience >= 1, "mlp: patience must be >= 1");
}

struct TaskData {
  std::string name;
  MatrixXd X;  // points x d
  VectorXd y;
};

// Offline corpus: one block per head (auxiliary tasks, plus the target
// task as a final block when offline target data is folded in), and an
// optional small target-task set used by the joint pretraining objective.
struct OfflineDataset {
  std::vector<TaskData> tasks;
  MatrixXd target_X;  // may have zero rows
  VectorXd target_y;
};

inline Eigen::Index dataset_dim(const OfflineDataset& data) {
  require(!data.tasks.empty(), "dataset has no tasks");
  return data.tasks.front().X.cols();
}

inline void validate(const OfflineDataset& data) {
  const Eigen::Index d = dataset_dim(data);
  for (const TaskData& t : data.tasks) {
    require(t.X.rows() >= 1, "task '" + t.name + "' has no points");
    require(t.X.cols() == d, "task '" + t.name + "' dimension mismatch");
    require(t.X.rows() == t.y.size(), "task '" + t.name + "': |y| != rows(X)");
    require_finite(t.X, "task X");
    require_finite(t.y, "task y");
  }
  require(data.target_X.rows() == data.target_y.size(), "target set: |y| != rows(X)");
  if (data.target_X.rows() > 0) {
    require(data.target_X.cols() == d, "target set dimension mismatch");
    require_finite(data.target_X, "target X");
    require_finite(data.target_y, "target y");
  }
}

// Parameter tensors in a fixed order: trunk layers 0..n_layers-1, then the
// latent projection, then the task heads. Gradients and optimizer state
// mirror this layout.
struct MlpParams {
  std::vector<MatrixXd> W;
  std::vector<VectorXd> b;
};

inline MlpParams zeros_like(const MlpParams& p) {
  MlpParams g;
  g.W.reserve(p.W.size());
  g.b.reserve(p.b.size());
  for (const MatrixXd& W : p.W) g.W.push_back(MatrixXd::Zero(W.rows(), W.cols()));
  for (const VectorXd& b : p.b) g.b.push_back(VectorXd::Zero(b.size()));
  return g;
}

struct SurrogateModel {
  MlpConfig config;
  MlpParams params;
  VectorXd x_mean, x_std;            // input normalization
  VectorXd y_mean, y_std;            // per-task target standardization
  std::vector<double> loss_history;  // training MSE per epoch

  Eigen::Index input_dim() const { return x_mean.size(); }
};

enum class MlpMode { Train, Eval };

struct MlpForward {
  VectorXd z;      // latent features, each coordinate in (-1, 1)
  VectorXd heads;  // per-task outputs in standardized target space
};

namespace detail {

// Full activation record of one forward pass, kept for backprop.
struct MlpTrace {
  VectorXd xin;             // normalized input
  std::vector<VectorXd> a;  // trunk activations
  VectorXd mask;            // dropout keep mask, already scaled by 1/keep
  VectorXd dropped;
  VectorXd z;
  VectorXd heads;
};

inline MlpTrace mlp_forward_trace(const SurrogateModel& m, const VectorXd& x,
                                  MlpMode mode, std::mt19937_64* rng) {
  require(x.size() == m.input_dim(), "mlp_forward: input dimension mismatch");
  require_finite(x, "x");
  const MlpConfig& cfg = m.config;

  MlpTrace t;
  t.xin = (x - m.x_mean).cwiseQuotient(m.x_std);
  t.a.resize(cfg.n_layers);
  const VectorXd* prev = &t.xin;
  for (int l = 0; l < cfg.n_layers; ++l) {
    t.a[l] = (m.params.W[l] * (*prev) + m.params.b[l]).array().tanh().matrix();
    prev = &t.a[l];
  }

  const int nl = cfg.n_layers;
  if (mode == MlpMode::Train && cfg.dropout_rate > 0.0) {
    require(rng != nullptr, "mlp_forward: train mode with dropout needs an rng");
    const double keep = 1.0 - cfg.dropout_rate;
    std::bernoulli_distribution keep_dist(keep);
    t.mask.resize(cfg.hidden_units);
    for (int i = 0; i < cfg.hidden_units; ++i)
      t.mask(i) = keep_dist(*rng) ? 1.0 / keep : 0.0;
    t.dropped = t.a[nl - 1].cwiseProduct(t.mask);
  } else {
    t.mask = VectorXd::Ones(cfg.hidden_units);
    t.dropped = t.a[nl - 1];
  }

  t.z = (m.params.W[nl] * t.dropped + m.params.b[nl]).array().tanh().matrix();
  t.heads = m.params.W[nl + 1] * t.z + m.params.b[nl + 1];
  if (!t.z.allFinite() || !t.heads.allFinite())
    throw NumericalError("mlp_forward: non-finite activations");
  return t;
}

// Accumulates d(loss)/d(params) for one sample given dout = dL/d(head output).
inline void backprop_sample(const SurrogateModel& m, const MlpTrace& t, int task,
                            double dout, MlpParams& g) {
  const int nl = m.config.n_layers;
  g.W[nl + 1].row(task) += dout * t.z.transpose();
  g.b[nl + 1](task) += dout;

  const VectorXd dz = dout * m.params.W[nl + 1].row(task).transpose();
  const VectorXd dzpre = (dz.array() * (1.0 - t.z.array().square())).matrix();
  g.W[nl] += dzpre * t.dropped.transpose();
  g.b[nl] += dzpre;

  VectorXd da = (m.params.W[nl].transpose() * dzpre).cwiseProduct(t.mask);
  for (int l = nl - 1; l >= 0; --l) {
    const VectorXd dh = (da.array() * (1.0 - t.a[l].array().square())).matrix();
    const VectorXd& below = (l == 0) ? t.xin : t.a[l - 1];
    g.W[l] += dh * below.transpose();
    g.b[l] += dh;
    if (l > 0) da = m.params.W[l].transpose() * dh;
  }
}

inline MlpParams init_params(const MlpConfig& cfg, Eigen::Index input_dim,
                             std::mt19937_64& rng) {
  auto fill = [&rng](Eigen::Index rows, Eigen::Index cols, MatrixXd& W, VectorXd& b) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    W.resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) W(i, j) = dist(rng);
    b.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) b(i) = dist(rng);
  };

  MlpParams p;
  const int n_tensors = cfg.n_layers + 2;
  p.W.resize(n_tensors);
  p.b.resize(n_tensors);
  Eigen::Index fan_in = input_dim;
  for (int l = 0; l < cfg.n_layers; ++l) {
    fill(cfg.hidden_units, fan_in, p.W[l], p.b[l]);
    fan_in = cfg.hidden_units;
  }
  fill(cfg.latent_dim, cfg.hidden_units, p.W[cfg.n_layers], p.b[cfg.n_layers]);
  fill(cfg.num_tasks, cfg.latent_dim, p.W[cfg.n_layers + 1], p.b[cfg.n_layers + 1]);
  return p;
}

inline void adam_step(MlpParams& p, const MlpParams& g, MlpParams& m, MlpParams& v,
                      double lr, std::int64_t t) {
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t k = 0; k < p.W.size(); ++k) {
    m.W[k] = b1 * m.W[k] + (1.0 - b1) * g.W[k];
    v.W[k] = b2 * v.W[k] + (1.0 - b2) * g.W[k].cwiseProduct(g.W[k]);
    p.W[k] -= lr * ((m.W[k] / c1).array() / ((v.W[k] / c2).array().sqrt() + eps)).matrix();
    m.b[k] = b1 * m.b[k] + (1.0 - b1) * g.b[k];
    v.b[k] = b2 * v.b[k] + (1.0 - b2) * g.b[k].cwiseProduct(g.b[k]);
    p.b[k] -= lr * ((m.b[k] / c1).array() / ((v.b[k] / c2).array().sqrt() + eps)).matrix();
  }
}

}  // namespace detail

inline MlpForward mlp_forward(const SurrogateModel& m, const VectorXd& x,
                              MlpMode mode = MlpMode::Eval,
                              std::mt19937_64* rng = nullptr) {
  detail::MlpTrace t = detail::mlp_forward_trace(m, x, mode, rng);
  return {std::move(t.z), std::move(t.heads)};
}

// Frozen feature map h(x): deterministic eval-mode latent vector.
inline VectorXd embed(const SurrogateModel& m, const VectorXd& x) {
  return mlp_forward(m, x).z;
}

// Weighted squared-error loss (mean over samples of weight * err^2) and its
// gradient over every parameter tensor, dropout disabled. Targets are in
// standardized space. grads, when given, must be zero-initialized to the
// parameter shapes.
inline double mlp_loss_and_grads(const SurrogateModel& m, const MatrixXd& X,
                                 const VectorXd& y, const std::vector<int>& task,
                                 const VectorXd& weight, MlpParams* grads) {
  const Eigen::Index n = X.rows();
  require(n == y.size() && n == static_cast<Eigen::Index>(task.size()) && n == weight.size(),
          "mlp_loss_and_grads: size mismatch");
  require(n >= 1, "mlp_loss_and_grads: empty batch");
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(task[i] >= 0 && task[i] < m.config.num_tasks,
            "mlp_loss_and_grads: task index out of range");
    const detail::MlpTrace t =
        detail::mlp_forward_trace(m, X.row(i).transpose(), MlpMode::Eval, nullptr);
    const double err = t.heads(task[i]) - y(i);
    loss += weight(i) * err * err * inv_n;
    if (grads) detail::backprop_sample(m, t, task[i], 2.0 * weight(i) * err * inv_n, *grads);
  }
  return loss;
}

namespace detail {

// Pooled training arrays: raw inputs, standardized targets, head index and
// balance weight per sample. weight = N/(K_eff * n_task) so the weighted
// sample mean equals the average of per-task MSEs.
struct PooledSamples {
  MatrixXd X;
  VectorXd y;
  std::vector<int> task;
  VectorXd weight;
};

inline PooledSamples pool_samples(const std::vector<std::pair<int, Eigen::Index>>& rows,
                                  const OfflineDataset& data, const SurrogateModel& model) {
  PooledSamples out;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index d = dataset_dim(data);
  out.X.resize(n, d);
  out.y.resize(n);
  out.task.resize(rows.size());
  out.weight.resize(n);

  std::vector<Eigen::Index> per_task(model.config.num_tasks, 0);
  for (const auto& [k, i] : rows) ++per_task[k];
  int active_tasks = 0;
  for (Eigen::Index c : per_task)
    if (c > 0) ++active_tasks;

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& [k, i] = rows[r];
    out.X.row(r) = data.tasks[k].X.row(i);
    out.y(r) = (data.tasks[k].y(i) - model.y_mean(k)) / model.y_std(k);
    out.task[r] = k;
    out.weight(r) = static_cast<double>(n) /
                    (static_cast<double>(active_tasks) * static_cast<double>(per_task[k]));
  }
  return out;
}

}  // namespace detail

// Trains the multi-head network on the offline corpus by minibatch Adam on
// the task-balanced MSE, with a per-task validation split for early
// stopping. Fixed seed gives a bit-reproducible model.
inline SurrogateModel pretrain(const OfflineDataset& data, const MlpConfig& cfg) {
  validate(cfg);
  validate(data);
  require(static_cast<int>(data.tasks.size()) == cfg.num_tasks,
          "pretrain: num_tasks != number of task blocks");

  const Eigen::Index d = dataset_dim(data);
  SurrogateModel model;
  model.config = cfg;

  Eigen::Index total = 0;
  for (const TaskData& t : data.tasks) total += t.X.rows();
  VectorXd mean = VectorXd::Zero(d), sq = VectorXd::Zero(d);
  for (const TaskData& t : data.tasks) {
    mean += t.X.colwise().sum().transpose();
    sq += t.X.array().square().colwise().sum().transpose().matrix();
  }
  mean /= static_cast<double>(total);
  VectorXd var = sq / static_cast<double>(total) - mean.cwiseProduct(mean);
  model.x_mean = mean;
  model.x_std = var.cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index j = 0; j < d; ++j)
    if (model.x_std(j) < 1e-12) model.x_std(j) = 1.0;

  model.y_mean.resize(cfg.num_tasks);
  model.y_std.resize(cfg.num_tasks);
  for (int k = 0; k < cfg.num_tasks; ++k) {
    const VectorXd& y = data.tasks[k].y;
    const double mu = y.mean();
    const double sd = std::sqrt((y.array() - mu).square().mean());
    model.y_mean(k) = mu;
    model.y_std(k) = sd < 1e-12 ? 1.0 : sd;
  }

  std::mt19937_64 init_rng = make_rng(cfg.seed, 101);
  model.params = detail::init_params(cfg, d, init_rng);
  if (cfg.epochs == 0) return model;

  // per-task split so every task keeps at least one training point
  std::mt19937_64 split_rng = make_rng(cfg.seed, 202);
  std::vector<std::pair<int, Eigen::Index>> train_rows, val_rows;
  for (int k = 0; k < cfg.num_tasks; ++k) {
    const Eigen::Index nk = data.tasks[k].X.rows();
    std::vector<Eigen::Index> idx(nk);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), split_rng);
    Eigen::Index n_val = static_cast<Eigen::Index>(
        std::floor(cfg.val_fraction * static_cast<double>(nk)));
    if (nk - n_val < 1) n_val = nk - 1;
    for (Eigen::Index i = 0; i < nk; ++i) {
      if (i < nk - n_val)
        train_rows.emplace_back(k, idx[static_cast<std::size_t>(i)]);
      else
        val_rows.emplace_back(k, idx[static_cast<std::size_t>(i)]);
    }
  }
  const detail::PooledSamples train = detail::pool_samples(train_rows, data, model);
  const bool has_val = !val_rows.empty();
  detail::PooledSamples val;
  if (has_val) val = detail::pool_samples(val_rows, data, model);

  MlpParams mstate = zeros_like(model.params);
  MlpParams vstate = zeros_like(model.params);
  std::int64_t adam_t = 0;
  std::mt19937_64 shuffle_rng = make_rng(cfg.seed, 303);
  std::mt19937_64 dropout_rng = make_rng(cfg.seed, 404);

  double best_val = std::numeric_limits<double>::infinity();
  MlpParams best_params = model.params;
  int stall = 0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(train.X.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      MlpParams grads = zeros_like(model.params);
      double batch_loss = 0.0;
      for (std::size_t s = start; s < stop; ++s) {
        const Eigen::Index i = order[s];
        const detail::MlpTrace t = detail::mlp_forward_trace(
            model, train.X.row(i).transpose(), MlpMode::Train, &dropout_rng);
        const double err = t.heads(train.task[static_cast<std::size_t>(i)]) - train.y(i);
        batch_loss += train.weight(i) * err * err * inv_b;
        detail::backprop_sample(model, t, train.task[static_cast<std::size_t>(i)],
                                2.0 * train.weight(i) * err * inv_b, grads);
      }
      if (!std::isfinite(batch_loss))
        throw NumericalError("pretrain: loss diverged at epoch " + std::to_string(epoch));
      detail::adam_step(model.params, grads, mstate, vstate, cfg.learning_rate, ++adam_t);
    }

    const double train_mse =
        mlp_loss_and_grads(model, train.X, train.y, train.task, train.weight, nullptr);
    if (!std::isfinite(train_mse))
      throw NumericalError("pretrain: loss diverged at epoch " + std::to_string(epoch));
    model.loss_history.push_back(train_mse);

    if (has_val) {
      const double val_mse =
          mlp_loss_and_grads(model, val.X, val.y, val.task, val.weight, nullptr);
      if (val_mse < best_val) {
        best_val = val_mse;
        best_params = model.params;
        stall = 0;
      } else if (++stall >= cfg.patience) {
        break;
      }
    }
  }
  if (has_val) model.params = best_params;
  return model;
}

// One alternation pass of the joint pretraining objective
//   MSE(network | offline tasks) + NLL(warm GP | target set in feature
//   space) + NLL(cold GP | target set in input space).
// The better of {initial, final} states under the total is returned, so the
// reported total never increases.
struct JointPretrainResult {
  SurrogateModel model;
  KernelSpec warm_kernel;
  double warm_noise_std = 0.1;
  KernelSpec cold_kernel;
  double cold_noise_std = 0.1;
  std::vector<double> total_loss_history;
};

namespace detail {

inline MatrixXd embed_rows(const SurrogateModel& model, const MatrixXd& X) {
  MatrixXd Z(X.rows(), model.config.latent_dim);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    Z.row(i) = embed(model, X.row(i).transpose()).transpose();
  return Z;
}

inline double full_corpus_mse(const SurrogateModel& model, const OfflineDataset& data) {
  std::vector<std::pair<int, Eigen::Index>> rows;
  for (int k = 0; k < static_cast<int>(data.tasks.size()); ++k)
    for (Eigen::Index i = 0; i < data.tasks[k].X.rows(); ++i) rows.emplace_back(k, i);
  const PooledSamples all = pool_samples(rows, data, model);
  return mlp_loss_and_grads(model, all.X, all.y, all.task, all.weight, nullptr);
}

}  // namespace detail

inline JointPretrainResult joint_pretrain(const OfflineDataset& data, const MlpConfig& cfg,
                                          const KernelSpec& warm, const KernelSpec& cold,
                                          double warm_noise_std = 0.1,
                                          double cold_noise_std = 0.1) {
  validate(cfg);
  validate(data);
  validate(warm);
  validate(cold);

  JointPretrainResult out;
  out.warm_kernel = warm;
  out.warm_noise_std = warm_noise_std;
  out.cold_kernel = cold;
  out.cold_noise_std = cold_noise_std;

  const Eigen::Index nf = data.target_X.rows();
  if (nf == 0) {
    out.model = pretrain(data, cfg);
    return out;
  }

  MlpConfig init_cfg = cfg;
  init_cfg.epochs = 0;
  SurrogateModel init_model = pretrain(data, init_cfg);

  auto total_of = [&](const SurrogateModel& model, const KernelSpec& wspec, double wnoise,
                      const KernelSpec& cspec, double cnoise) {
    const MatrixXd Z = detail::embed_rows(model, data.target_X);
    const double warm_nll =
        gp_nll(gp_condition(wspec, wnoise, Z, data.target_y)).value;
    const double cold_nll =
        gp_nll(gp_condition(cspec, cnoise, data.target_X, data.target_y)).value;
    return detail::full_corpus_mse(model, data) + warm_nll + cold_nll;
  };

  const double initial_total = total_of(init_model, warm, warm_noise_std, cold, cold_noise_std);
  out.total_loss_history.push_back(initial_total);

  SurrogateModel model = pretrain(data, cfg);
  KernelSpec warm_fit = warm;
  double warm_noise_fit = warm_noise_std;
  KernelSpec cold_fit = cold;
  double cold_noise_fit = cold_noise_std;
  if (nf >= 2) {
    const MatrixXd Z = detail::embed_rows(model, data.target_X);
    GpState wgp = fit_gp_hyperparams(gp_condition(warm, warm_noise_std, Z, data.target_y));
    warm_fit = wgp.kernel;
    warm_noise_fit = wgp.noise_std;
    GpState cgp = fit_gp_hyperparams(
        gp_condition(cold, cold_noise_std, data.target_X, data.target_y));
    cold_fit = cgp.kernel;
    cold_noise_fit = cgp.noise_std;
  }
  const double final_total = total_of(model, warm_fit, warm_noise_fit, cold_fit, cold_noise_fit);
  out.total_loss_history.push_back(final_total);

  if (final_total <= initial_total) {
    out.model = std::move(model);
    out.warm_kernel = warm_fit;
    out.warm_noise_std = warm_noise_fit;
    out.cold_kernel = cold_fit;
    out.cold_noise_std = cold_noise_fit;
  } else {
    out.model = std::move(init_model);
  }
  return out;
}

// Binary model persistence. Raw host-order doubles, so round trips are
// bit-exact on the machine that wrote the file.
namespace detail {

inline constexpr char kModelMagic[8] = {'J', 'M', 'B', 'O', 'M', 'L', 'P', '1'};

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("model file truncated");
}

inline void write_i64(std::ostream& os, std::int64_t v) { write_bytes(os, &v, sizeof v); }
inline void write_u64(std::ostream& os, std::uint64_t v) { write_bytes(os, &v, sizeof v); }
inline void write_f64(std::ostream& os, double v) { write_bytes(os, &v, sizeof v); }

inline std::int64_t read_i64(std::istream& is) {
  std::int64_t v;
  read_bytes(is, &v, sizeof v);
  return v;
}
inline std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v;
  read_bytes(is, &v, sizeof v);
  return v;
}
inline double read_f64(std::istream& is) {
  double v;
  read_bytes(is, &v, sizeof v);
  return v;
}

inline void write_vector(std::ostream& os, const VectorXd& v) {
  write_i64(os, v.size());
  write_bytes(os, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

inline VectorXd read_vector(std::istream& is) {
  const std::int64_t n = read_i64(is);
  if (n < 0) throw std::runtime_error("model file corrupt: negative vector length");
  VectorXd v(n);
  read_bytes(is, v.data(), sizeof(double) * static_cast<std::size_t>(n));
  return v;
}

inline void write_matrix(std::ostream& os, const MatrixXd& m) {
  write_i64(os, m.rows());
  write_i64(os, m.cols());
  write_bytes(os, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

inline MatrixXd read_matrix(std::istream& is) {
  const std::int64_t r = read_i64(is);
  const std::int64_t c = read_i64(is);
  if (r < 0 || c < 0) throw std::runtime_error("model file corrupt: negative matrix shape");
  MatrixXd m(r, c);
  read_bytes(is, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return m;
}

}  // namespace detail

inline void save_model(const SurrogateModel& model, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
    detail::write_bytes(os, detail::kModelMagic, sizeof detail::kModelMagic);
    const MlpConfig& c = model.config;
    detail::write_i64(os, c.n_layers);
    detail::write_i64(os, c.hidden_units);
    detail::write_i64(os, c.latent_dim);
    detail::write_f64(os, c.dropout_rate);
    detail::write_i64(os, c.num_tasks);
    detail::write_f64(os, c.learning_rate);
    detail::write_i64(os, c.batch_size);
    detail::write_i64(os, c.epochs);
    detail::write_u64(os, c.seed);
    detail::write_f64(os, c.val_fraction);
    detail::write_i64(os, c.patience);

    detail::write_vector(os, model.x_mean);
    detail::write_vector(os, model.x_std);
    detail::write_vector(os, model.y_mean);
    detail::write_vector(os, model.y_std);

    detail::write_i64(os, static_cast<std::int64_t>(model.params.W.size()));
    for (const MatrixXd& W : model.params.W) detail::write_matrix(os, W);
    for (const VectorXd& b : model.params.b) detail::write_vector(os, b);

    detail::write_i64(os, static_cast<std::int64_t>(model.loss_history.size()));
    for (double v : model.loss_history) detail::write_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move model file into place: " + path);
  }
}

inline SurrogateModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file: " + path);
  char magic[8];
  detail::read_bytes(is, magic, sizeof magic);
  if (!std::equal(magic, magic + 8, detail::kModelMagic))
    throw std::runtime_error("not a model file: " + path);

  SurrogateModel model;
  MlpConfig& c = model.config;
  c.n_layers = static_cast<int>(detail::read_i64(is));
  c.hidden_units = static_cast<int>(detail::read_i64(is));
  c.latent_dim = static_cast<int>(detail::read_i64(is));
  c.dropout_rate = detail::read_f64(is);
  c.num_tasks = static_cast<int>(detail::read_i64(is));
  c.learning_rate = detail::read_f64(is);
  c.batch_size = static_cast<int>(detail::read_i64(is));
  c.epochs = static_cast<int>(detail::read_i64(is));
  c.seed = detail::read_u64(is);
  c.val_fraction = detail::read_f64(is);
  c.patience = static_cast<int>(detail::read_i64(is));
  validate(c);

  model.x_mean = detail::read_vector(is);
  model.x_std = detail::read_vector(is);
  model.y_mean = detail::read_vector(is);
  model.y_std = detail::read_vector(is);

  const std::int64_t n_tensors = detail::read_i64(is);
  if (n_tensors != c.n_layers + 2)
    throw std::runtime_error("model file corrupt: tensor count mismatch");
  model.params.W.reserve(static_cast<std::size_t>(n_tensors));
  for (std::int64_t k = 0; k < n_tensors; ++k)
    model.params.W.push_back(detail::read_matrix(is));
  model.params.b.reserve(static_cast<std::size_t>(n_tensors));
  for (std::int64_t k = 0; k < n_tensors; ++k)
    model.params.b.push_back(detail::read_vector(is));

  const std::int64_t n_loss = detail::read_i64(is);
  if (n_loss < 0) throw std::runtime_error("model file corrupt: negative history length");
  model.loss_history.resize(static_cast<std::size_t>(n_loss));
  for (std::int64_t k = 0; k < n_loss; ++k)
    model.loss_history[static_cast<std::size_t>(k)] = detail::read_f64(is);
  return model;
}

}  // namespace jumbo

#endif
