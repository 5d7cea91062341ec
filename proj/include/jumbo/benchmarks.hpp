#ifndef JUMBO_BENCHMARKS_HPP
#define JUMBO_BENCHMARKS_HPP

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "jumbo/io.hpp"
#include "jumbo/mlp.hpp"
#include "jumbo/search_space.hpp"

namespace jumbo {

// Finite lookup benchmark: encoded configurations with a target value and
// zero or more auxiliary task values per row.
struct TabularBenchmark {
  std::string name;
  SearchSpace space;
  MatrixXd X;    // rows x encoded_dim
  VectorXd f;    // target values
  MatrixXd aux;  // rows x (num_tasks - 1) auxiliary values
  std::vector<std::string> task_names;  // target first
  Eigen::Index best_row = -1;
  double f_star = 0.0;
  int duplicates_dropped = 0;
};

inline void finalize_optimum(TabularBenchmark& tb) {
  require(tb.X.rows() >= 1, "tabular benchmark has no rows");
  tb.best_row = 0;
  for (Eigen::Index i = 1; i < tb.f.size(); ++i)
    if (tb.f(i) > tb.f(tb.best_row)) tb.best_row = i;
  tb.f_star = tb.f(tb.best_row);
}

// 1D target/auxiliary pair sharing one periodic backbone with envelopes
// sloping in opposite directions, so the two optima sit far apart.
struct SyntheticPair {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> f_aux;
  double noise_std = 0.0;
  double x_star = 0.0;
  double f_star = 0.0;
};

namespace detail {

// Grid scan plus golden-section refinement inside the bracketing cell.
inline double argmax_1d(const std::function<double(double)>& f, int grid_points) {
  double best_x = 0.0, best_v = f(0.0);
  for (int i = 1; i < grid_points; ++i) {
    const double x = static_cast<double>(i) / (grid_points - 1);
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double h = 1.0 / (grid_points - 1);
  double a = std::max(0.0, best_x - h), b = std::min(1.0, best_x + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace detail

inline SyntheticPair make_periodic_pair(double noise_std = 0.0) {
  SyntheticPair p;
  p.name = "periodic1d";
  p.f = [](double x) { return std::sin(6.0 * M_PI * x) * (1.0 - 0.7 * x) + 0.3 * x; };
  p.f_aux = [](double x) {
    return std::sin(6.0 * M_PI * x) * (1.0 - 0.7 * (1.0 - x)) + 0.3 * (1.0 - x);
  };
  p.noise_std = noise_std;
  p.x_star = detail::argmax_1d(p.f, 20001);
  p.f_star = p.f(p.x_star);
  return p;
}

// Tabular benchmark file format:
//   line 1: "#space: c(lo,hi)|i(lo,hi)|k(n)" tokens, one per variable
//   line 2: "#tasks: target,aux1,..."
//   rows:   encoded x coordinates, then one value per task
namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline VarSpec parse_var_token(const std::string& token, int line) {
  const std::string t = trim(token);
  const auto fail = [&](const std::string& why) {
    throw std::invalid_argument("tabular file line " + std::to_string(line) +
                                ": bad space token '" + t + "' (" + why + ")");
  };
  if (t.size() < 4 || t[1] != '(' || t.back() != ')') fail("expected kind(args)");
  const std::string args = t.substr(2, t.size() - 3);
  const std::vector<std::string> parts = split(args, ',');
  const auto num = [&](const std::string& s) {
    try {
      return parse_double(trim(s));
    } catch (const std::invalid_argument&) {
      fail("unparseable number");
      return 0.0;
    }
  };
  switch (t[0]) {
    case 'c':
      if (parts.size() != 2) fail("c needs (lo,hi)");
      return VarSpec::continuous(num(parts[0]), num(parts[1]));
    case 'i':
      if (parts.size() != 2) fail("i needs (lo,hi)");
      return VarSpec::integer(num(parts[0]), num(parts[1]));
    case 'k':
      if (parts.size() != 1) fail("k needs (n)");
      return VarSpec::categorical(static_cast<int>(num(parts[0])));
    default:
      fail("unknown kind");
  }
  return {};
}

}  // namespace detail

inline TabularBenchmark parse_tabular(const std::string& text, const std::string& name) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  const auto fail = [&](const std::string& why) {
    throw std::invalid_argument("tabular file line " + std::to_string(line_no) + ": " + why);
  };

  TabularBenchmark tb;
  tb.name = name;

  if (!std::getline(is, line)) fail("missing #space: header");
  ++line_no;
  line = detail::trim(line);
  if (line.rfind("#space:", 0) != 0) fail("first line must start with '#space:'");
  for (const std::string& token : detail::split(line.substr(7), '|'))
    tb.space.vars.push_back(detail::parse_var_token(token, line_no));
  validate(tb.space);

  if (!std::getline(is, line)) fail("missing #tasks: header");
  ++line_no;
  line = detail::trim(line);
  if (line.rfind("#tasks:", 0) != 0) fail("second line must start with '#tasks:'");
  for (const std::string& t : detail::split(line.substr(7), ',')) {
    const std::string nm = detail::trim(t);
    if (nm.empty()) fail("empty task name");
    tb.task_names.push_back(nm);
  }
  const Eigen::Index d = tb.space.encoded_dim();
  const Eigen::Index n_tasks = static_cast<Eigen::Index>(tb.task_names.size());

  std::vector<VectorXd> xs;
  std::vector<double> fs;
  std::vector<VectorXd> auxs;
  while (std::getline(is, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split(line, ',');
    if (static_cast<Eigen::Index>(cells.size()) != d + n_tasks)
      fail("expected " + std::to_string(d + n_tasks) + " values, got " +
           std::to_string(cells.size()));
    VectorXd row(d + n_tasks);
    for (Eigen::Index j = 0; j < row.size(); ++j) {
      try {
        row(j) = parse_double(detail::trim(cells[static_cast<std::size_t>(j)]));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      if (std::isnan(row(j))) fail("NaN value");
    }
    const VectorXd x = row.head(d);
    bool dup = false;
    for (const VectorXd& seen : xs)
      if ((seen - x).cwiseAbs().maxCoeff() == 0.0) {
        dup = true;
        break;
      }
    if (dup) {
      ++tb.duplicates_dropped;
      continue;
    }
    xs.push_back(x);
    fs.push_back(row(d));
    auxs.push_back(row.tail(n_tasks - 1));
  }
  if (xs.empty()) fail("no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  tb.X.resize(n, d);
  tb.f.resize(n);
  tb.aux.resize(n, n_tasks - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    tb.X.row(i) = xs[static_cast<std::size_t>(i)].transpose();
    tb.f(i) = fs[static_cast<std::size_t>(i)];
    tb.aux.row(i) = auxs[static_cast<std::size_t>(i)].transpose();
  }
  finalize_optimum(tb);
  return tb;
}

inline TabularBenchmark load_tabular(const std::string& path) {
  std::string name = path;
  const std::size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_tabular(read_text(path), name);
}

inline std::string format_tabular(const TabularBenchmark& tb) {
  std::ostringstream os;
  os << "#space: ";
  for (std::size_t i = 0; i < tb.space.vars.size(); ++i) {
    const VarSpec& v = tb.space.vars[i];
    if (i) os << "|";
    switch (v.kind) {
      case VarKind::Continuous:
        os << "c(" << fmt_double(v.lo) << "," << fmt_double(v.hi) << ")";
        break;
      case VarKind::Integer:
        os << "i(" << fmt_double(v.lo) << "," << fmt_double(v.hi) << ")";
        break;
      case VarKind::Categorical:
        os << "k(" << v.n_choices << ")";
        break;
    }
  }
  os << "\n#tasks: ";
  for (std::size_t i = 0; i < tb.task_names.size(); ++i) {
    if (i) os << ",";
    os << tb.task_names[i];
  }
  os << "\n";
  for (Eigen::Index i = 0; i < tb.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < tb.X.cols(); ++j) os << fmt_double(tb.X(i, j)) << ",";
    os << fmt_double(tb.f(i));
    for (Eigen::Index k = 0; k < tb.aux.cols(); ++k) os << "," << fmt_double(tb.aux(i, k));
    os << "\n";
  }
  return os.str();
}

inline void save_tabular(const TabularBenchmark& tb, const std::string& path) {
  write_text_atomic(path, format_tabular(tb));
}

// Evaluates a synthetic pair on a uniform grid, producing a lookup table with
// one auxiliary task column. Useful for exhaustive-argmax runs.
inline TabularBenchmark tabulate_pair(const SyntheticPair& pair, int grid_points) {
  require(grid_points >= 2, "tabulate_pair: need at least two grid points");
  TabularBenchmark tb;
  tb.name = pair.name + "-grid" + std::to_string(grid_points);
  tb.space.vars = {VarSpec::continuous(0.0, 1.0)};
  tb.X.resize(grid_points, 1);
  tb.f.resize(grid_points);
  tb.aux.resize(grid_points, 1);
  for (int i = 0; i < grid_points; ++i) {
    const double x = static_cast<double>(i) / (grid_points - 1);
    tb.X(i, 0) = x;
    tb.f(i) = pair.f(x);
    tb.aux(i, 0) = pair.f_aux(x);
  }
  tb.task_names = {"target", "aux"};
  finalize_optimum(tb);
  return tb;
}

// Draws an offline corpus of auxiliary-task observations, uniform on [0,1].
inline OfflineDataset offline_from_pair(const SyntheticPair& pair, int n_samples,
                                        std::uint64_t seed, double noise_std = 0.0) {
  require(n_samples >= 1, "offline_from_pair: need at least one sample");
  require(noise_std >= 0.0, "offline_from_pair: noise_std must be non-negative");
  std::mt19937_64 rng = make_rng(seed, 11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TaskData task;
  task.name = "aux";
  task.X.resize(n_samples, 1);
  task.y.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double x = unif(rng);
    task.X(i, 0) = x;
    task.y(i) = pair.f_aux(x);
    if (noise_std > 0.0) task.y(i) += noise_std * gauss(rng);
  }
  OfflineDataset data;
  data.tasks = {std::move(task)};
  return data;
}

// Recasts a lookup table's auxiliary columns as an offline corpus, one task
// per column. The target column is deliberately excluded: it is the quantity
// the optimizer is supposed to discover.
inline OfflineDataset offline_from_tabular(const TabularBenchmark& tb) {
  require(tb.aux.cols() >= 1, "offline_from_tabular: table has no auxiliary tasks");
  OfflineDataset data;
  for (Eigen::Index k = 0; k < tb.aux.cols(); ++k) {
    TaskData task;
    task.name = tb.task_names.at(static_cast<std::size_t>(k) + 1);
    task.X = tb.X;
    task.y = tb.aux.col(k);
    data.tasks.push_back(std::move(task));
  }
  return data;
}

struct RegretCurves {
  VectorXd simple;      // f_star - best true value so far, non-increasing
  VectorXd cumulative;  // running sum of instantaneous gaps
};

inline RegretCurves regret_curves(const VectorXd& f_values, double f_star) {
  require_finite(f_values, "f_values");
  require(std::isfinite(f_star), "f_star must be finite");
  RegretCurves out;
  const Eigen::Index n = f_values.size();
  out.simple.resize(n);
  out.cumulative.resize(n);
  double best = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    best = std::max(best, f_values(t));
    total += f_star - f_values(t);
    out.simple(t) = f_star - best;
    out.cumulative(t) = total;
  }
  return out;
}

}  // namespace jumbo

#endif
