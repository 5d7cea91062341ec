#ifndef JUMBO_REPORTING_HPP
#define JUMBO_REPORTING_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jumbo/optimizer.hpp"

namespace jumbo {

// Configuration sidecar written next to each trace. Keys are emitted in
// sorted order and doubles in shortest round-trip form, so identical runs
// produce identical bytes. l_alpha may be infinite, which JSON cannot
// carry as a number, so it is stored in its canonical string form.
inline std::string run_config_json(const RunTrace& trace, const RunOptions& opt) {
  nlohmann::json j;
  j["abort_reason"] = trace.abort_reason;
  j["aborted"] = trace.aborted;
  j["benchmark"] = trace.benchmark;
  j["budget"] = trace.T;
  j["budget_exhausted"] = trace.budget_exhausted;
  j["cma_generations"] = opt.cma.generations;
  j["cma_population"] = opt.cma.population;
  j["cma_restarts"] = opt.cma_restarts;
  j["cma_sigma0"] = opt.cma.sigma0;
  j["cold_kernel"] = to_string(opt.cold_kernel.kind);
  j["cold_lengthscale"] = opt.cold_kernel.lengthscale;
  j["cold_noise_std"] = opt.cold_noise_std;
  j["cold_signal_variance"] = opt.cold_kernel.signal_variance;
  j["fit_lr"] = opt.fit_lr;
  j["fit_steps"] = opt.fit_steps;
  j["initial_random_points"] = opt.initial_random_points;
  j["l_alpha"] = fmt_compact(trace.strategy.l_alpha);
  j["lambda_constant"] = trace.strategy.lambda_constant;
  j["no_repeat"] = opt.no_repeat;
  j["normalize_threshold"] = opt.normalize_threshold;
  j["refit_hyperparams"] = opt.refit_hyperparams;
  j["rounds_completed"] = trace.rounds.size();
  j["seed"] = trace.seed;
  j["strategy"] = strategy_label(trace.strategy);
  j["ucb_scale_initial"] = opt.ucb_scale_initial;
  j["warm_kernel"] = to_string(opt.warm_kernel.kind);
  j["warm_lengthscale"] = opt.warm_kernel.lengthscale;
  j["warm_noise_std"] = opt.warm_noise_std;
  j["warm_signal_variance"] = opt.warm_kernel.signal_variance;
  return j.dump(2) + "\n";
}

// File stem shared by a trace and its sidecar.
inline std::string trace_stem(const RunTrace& trace) {
  return "trace_" + strategy_label(trace.strategy) + "_seed" + std::to_string(trace.seed);
}

// Writes trace_<strategy>_seed<seed>.csv and .json into dir; returns the stem.
inline std::string write_run_outputs(const RunTrace& trace, const RunOptions& opt,
                                     const std::string& dir) {
  const std::string stem = trace_stem(trace);
  const std::filesystem::path base = std::filesystem::path(dir) / stem;
  write_trace_csv(trace, base.string() + ".csv");
  write_text_atomic(base.string() + ".json", run_config_json(trace, opt));
  return stem;
}

// The slice of a persisted run needed for aggregation.
struct ParsedTrace {
  std::string label;
  std::string benchmark;
  std::uint64_t seed = 0;
  int T = 0;
  bool aborted = false;
  std::vector<double> simple_regret;  // may be shorter than T
};

// Reads a trace CSV plus its sidecar (same stem, .json extension).
inline ParsedTrace read_run_outputs(const std::string& csv_path) {
  std::filesystem::path sidecar(csv_path);
  sidecar.replace_extension(".json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(sidecar.string()));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("bad sidecar " + sidecar.string() + ": " + e.what());
  }
  ParsedTrace parsed;
  try {
    parsed.label = j.at("strategy").get<std::string>();
    parsed.benchmark = j.at("benchmark").get<std::string>();
    parsed.seed = j.at("seed").get<std::uint64_t>();
    parsed.T = j.at("budget").get<int>();
    parsed.aborted = j.at("aborted").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("bad sidecar " + sidecar.string() + ": " + e.what());
  }

  const std::string text = read_text(csv_path);
  std::istringstream lines(text);
  std::string line;
  require(static_cast<bool>(std::getline(lines, line)),
          "trace csv is empty: " + csv_path);
  const std::vector<std::string> header = detail::split(line, ',');
  Eigen::Index regret_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "simple_regret") regret_col = static_cast<Eigen::Index>(i);
  require(regret_col >= 0, "trace csv lacks a simple_regret column: " + csv_path);
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split(line, ',');
    require(cells.size() == header.size(), "ragged trace csv row: " + csv_path);
    parsed.simple_regret.push_back(parse_double(cells[static_cast<std::size_t>(regret_col)]));
  }
  return parsed;
}

struct ReportTables {
  std::string aggregate;  // wide per-round medians and standard errors
  std::string summary;    // final-round line per strategy
};

// Aggregates persisted runs grouped by strategy label. Aborted runs are
// excluded from the statistics but counted in the summary; short traces
// carry their last regret forward.
inline ReportTables report_from_traces(const std::vector<ParsedTrace>& traces) {
  require(!traces.empty(), "report: no traces to aggregate");
  std::vector<std::string> labels;
  std::map<std::string, std::vector<const ParsedTrace*>> by_label;
  int T = 0;
  for (const ParsedTrace& tr : traces) {
    if (by_label.find(tr.label) == by_label.end()) labels.push_back(tr.label);
    by_label[tr.label].push_back(&tr);
    T = std::max(T, tr.T);
  }
  require(T >= 1, "report: traces carry no budget");

  std::ostringstream agg;
  agg << "t";
  for (const std::string& label : labels) agg << ',' << label << "_median," << label << "_stderr";
  agg << '\n';

  std::map<std::string, std::vector<std::vector<double>>> columns;
  std::map<std::string, int> failed;
  for (const std::string& label : labels) {
    failed[label] = 0;
    for (const ParsedTrace* tr : by_label[label]) {
      if (tr->aborted || tr->simple_regret.empty()) {
        ++failed[label];
        continue;
      }
      std::vector<double> col(static_cast<std::size_t>(T));
      for (int t = 0; t < T; ++t) {
        const std::size_t i =
            std::min(static_cast<std::size_t>(t), tr->simple_regret.size() - 1);
        col[static_cast<std::size_t>(t)] = tr->simple_regret[i];
      }
      columns[label].push_back(std::move(col));
    }
  }

  std::map<std::string, std::pair<std::string, std::string>> final_cells;
  for (int t = 0; t < T; ++t) {
    agg << (t + 1);
    for (const std::string& label : labels) {
      const auto& cols = columns[label];
      if (cols.empty()) {
        agg << ",nan,nan";
        if (t == T - 1) final_cells[label] = {"nan", "nan"};
        continue;
      }
      std::vector<double> values;
      values.reserve(cols.size());
      for (const auto& col : cols) values.push_back(col[static_cast<std::size_t>(t)]);
      const std::string med = fmt_double(median_of(values));
      const std::string se = fmt_double(stderr_of(values));
      agg << ',' << med << ',' << se;
      if (t == T - 1) final_cells[label] = {med, se};
    }
    agg << '\n';
  }

  std::ostringstream sum;
  sum << "strategy,final_median,final_stderr,completed,failed\n";
  for (const std::string& label : labels) {
    sum << label << ',' << final_cells[label].first << ',' << final_cells[label].second
        << ',' << columns[label].size() << ',' << failed[label] << '\n';
  }
  ReportTables tables;
  tables.aggregate = agg.str();
  tables.summary = sum.str();
  return tables;
}

// Scans a directory for trace_*.csv files (sorted by name, so output is
// stable) and aggregates them.
inline ReportTables report_from_directory(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("trace_", 0) == 0 && entry.path().extension() == ".csv")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  require(!paths.empty(), "report: no trace_*.csv files in " + dir);
  std::vector<ParsedTrace> traces;
  traces.reserve(paths.size());
  for (const std::string& path : paths) traces.push_back(read_run_outputs(path));
  return report_from_traces(traces);
}

}  // namespace jumbo

#endif  // JUMBO_REPORTING_HPP
