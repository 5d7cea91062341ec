// End-to-end checks of the command-line tool: exit codes, file outputs, and
// byte-level determinism of reruns. Run as: cli_checks --cli <path-to-jumbo>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

int checks = 0;
int failures = 0;

void expect(bool ok, const std::string& name) {
  ++checks;
  if (ok) {
    std::cout << "ok - " << name << '\n';
  } else {
    ++failures;
    std::cout << "FAIL - " << name << '\n';
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct CliResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

std::string cli_path;
fs::path scratch;

CliResult run_cli(const std::string& args) {
  const fs::path log = scratch / "cli_output.txt";
  const std::string cmd = "'" + cli_path + "' " + args + " > '" + log.string() +
                          "' 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.output = read_file(log);
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Identical file sets with identical bytes in both directories.
bool dirs_identical(const fs::path& a, const fs::path& b) {
  std::vector<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(a))
    names_a.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b))
    names_b.push_back(e.path().filename().string());
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  if (names_a != names_b) return false;
  for (const std::string& name : names_a)
    if (read_file(a / name) != read_file(b / name)) return false;
  return !names_a.empty();
}

const char* kConfig = R"(# coarse periodic benchmark, tiny surrogate
[benchmark]
kind = periodic1d
grid = 15

[offline]
samples = 40
seed = 3

[model]
layers = 1
hidden = 8
latent = 3
epochs = 5
batch = 16
lr = 1e-3
seed = 7

[run]
budget = 6
seeds = 1,2
strategies = jumbo
l_alpha = 0.1
fit_steps = 10
)";

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli_path = argv[i + 1];
  if (cli_path.empty()) {
    std::cerr << "usage: cli_checks --cli <path-to-jumbo>\n";
    return 2;
  }

  scratch = fs::temp_directory_path() /
            ("jumbo_cli_checks_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  // Help must document itself and succeed everywhere.
  expect(run_cli("--help").code == 0, "top-level --help exits 0");
  for (const std::string sub :
       {"pretrain", "run", "report", "theory", "theory lemma1", "theory mig"})
    expect(run_cli(sub + " --help").code == 0, sub + " --help exits 0");

  // Usage errors: unknown subcommand, missing flags, missing files.
  expect(run_cli("frobnicate").code == 2, "unknown subcommand exits 2");
  expect(run_cli("").code == 2, "missing subcommand exits 2");
  expect(run_cli("run").code == 2, "run without --config exits 2");
  expect(run_cli("pretrain --config /nonexistent.ini --out x.bin").code == 2,
         "missing config file exits 2");

  const fs::path bad_cfg = scratch / "bad.ini";
  write_file(bad_cfg, "[benchmark]\nkind = tabular\npath = /no/such/table.tsv\n");
  const CliResult bad = run_cli("pretrain --config '" + bad_cfg.string() +
                                "' --out '" + (scratch / "m.bin").string() + "'");
  expect(bad.code == 2, "missing benchmark table exits 2");
  expect(contains(bad.output, "/no/such/table.tsv"),
         "the error names the missing path");

  const fs::path malformed = scratch / "malformed.ini";
  write_file(malformed, "[run\nbudget = 5\n");
  expect(run_cli("pretrain --config '" + malformed.string() + "' --out x.bin")
                 .code == 2,
         "malformed config exits 2");

  // Pretraining writes the model and its loss curve, deterministically.
  const fs::path cfg = scratch / "config.ini";
  write_file(cfg, kConfig);
  const fs::path model_a = scratch / "model_a.bin";
  const fs::path model_b = scratch / "model_b.bin";
  expect(run_cli("pretrain --config '" + cfg.string() + "' --out '" +
                 model_a.string() + "'")
                 .code == 0,
         "pretrain succeeds");
  expect(fs::exists(model_a), "pretrain writes the model file");
  expect(fs::exists(scratch / "model_a.loss.csv"),
         "pretrain writes the loss curve");
  expect(run_cli("pretrain --config '" + cfg.string() + "' --out '" +
                 model_b.string() + "'")
                 .code == 0,
         "pretrain reruns");
  expect(read_file(model_a) == read_file(model_b),
         "pretrained models are byte-identical across reruns");

  // The cold-only baseline needs no model; the warm strategies insist on one.
  const fs::path runs_cold = scratch / "runs_cold";
  expect(run_cli("run --config '" + cfg.string() + "' --strategy gp-ucb --out '" +
                 runs_cold.string() + "'")
                 .code == 0,
         "gp-ucb runs without a model");
  const CliResult need = run_cli("run --config '" + cfg.string() + "' --out '" +
                                 (scratch / "runs_none").string() + "'");
  expect(need.code == 2, "jumbo without a model exits 2");
  expect(contains(need.output, "--model"), "the error explains the fix");

  // Full runs: one trace and one sidecar per (strategy, seed), reruns
  // byte-identical, flags overriding the config.
  const fs::path runs_a = scratch / "runs_a";
  const fs::path runs_b = scratch / "runs_b";
  const std::string run_args = "run --config '" + cfg.string() + "' --model '" +
                               model_a.string() +
                               "' --strategy jumbo,gp-ucb --seeds 1,2 --budget 6";
  expect(run_cli(run_args + " --out '" + runs_a.string() + "'").code == 0,
         "run succeeds");
  int csvs = 0, sidecars = 0;
  for (const auto& e : fs::directory_iterator(runs_a)) {
    if (e.path().extension() == ".csv") ++csvs;
    if (e.path().extension() == ".json") ++sidecars;
  }
  expect(csvs == 4 && sidecars == 4, "one trace and sidecar per strategy-seed");
  expect(run_cli(run_args + " --out '" + runs_b.string() + "'").code == 0,
         "run reruns");
  expect(dirs_identical(runs_a, runs_b), "reruns are byte-identical");

  // Reports aggregate whatever traces the directory holds.
  const fs::path report_a = scratch / "report_a";
  const fs::path report_b = scratch / "report_b";
  expect(run_cli("report --in '" + runs_a.string() + "' --out '" +
                 report_a.string() + "'")
                 .code == 0,
         "report succeeds");
  expect(fs::exists(report_a / "aggregate.csv") &&
             fs::exists(report_a / "summary.csv"),
         "report writes both tables");
  expect(run_cli("report --in '" + runs_b.string() + "' --out '" +
                 report_b.string() + "'")
                 .code == 0,
         "report reruns");
  expect(dirs_identical(report_a, report_b), "reports are byte-identical");
  const fs::path empty_dir = scratch / "empty";
  fs::create_directories(empty_dir);
  expect(run_cli("report --in '" + empty_dir.string() + "'").code == 2,
         "report on an empty directory exits 2");

  // Theory commands: the greedy value of zero selections is zero, and the
  // coverage check passes at its default tolerance.
  const CliResult mig0 = run_cli("theory mig --candidates 20 --n 0");
  expect(mig0.code == 0 && contains(mig0.output, " 0 nats"),
         "zero selections carry zero information");
  const fs::path mig_csv = scratch / "mig.csv";
  expect(run_cli("theory mig --candidates 20 --n 5 --out '" + mig_csv.string() +
                 "'")
                 .code == 0,
         "mig writes its gain table");
  expect(contains(read_file(mig_csv), "step,chosen,gain,total"),
         "gain table has the expected header");
  const CliResult lemma = run_cli(
      "theory lemma1 --domain 20 --rounds 5 --trials 30 --seed 1");
  expect(lemma.code == 0 && contains(lemma.output, "PASS"),
         "coverage check passes at the default tolerance");

  // A corrupted model is a runtime failure, not a usage error.
  const fs::path corrupt = scratch / "corrupt.bin";
  std::string bytes = read_file(model_a);
  bytes[0] = 'X';
  write_file(corrupt, bytes);
  expect(run_cli("run --config '" + cfg.string() + "' --model '" +
                 corrupt.string() + "' --out '" +
                 (scratch / "runs_corrupt").string() + "'")
                 .code == 1,
         "corrupt model exits 1");

  std::cout << failures << " of " << checks << " checks failed\n";
  fs::remove_all(scratch);
  return failures == 0 ? 0 : 1;
}
