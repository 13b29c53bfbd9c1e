#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "relbandit/core.hpp"
#include "relbandit/envs.hpp"
#include "relbandit/learner.hpp"
#include "relbandit/verify.hpp"

namespace relbandit {

// First line of every trace CSV; the header is the schema version.
inline constexpr std::string_view kTraceHeaderV1 =
    "run_id,learner,adversary,seed,t,context,action,observed_cost,expected_round_cost,"
    "cum_expected_regret,oracle_calls";

struct LearnerSpecConfig {
  std::string kind;      // relax_bandit | full_rademacher | exp4 | epsilon_greedy
  std::string label;     // defaults to kind, deduplicated
  double gamma = -1.0;   // < 0 selects the horizon-tuned default
  double lambda = -1.0;  // exp4 only; <= 0 selects the default rate
  double epsilon = 0.1;  // epsilon_greedy only
};

struct AdversarySpecConfig {
  std::string kind;  // fixed | stochastic | punish_mode | punish_above_uniform |
                     // best_policy_chaser | constant
  std::string label;
  std::string csv_path;                          // fixed: file with T rows, K columns
  std::vector<std::vector<double>> fixed_costs;  // fixed: inline T rows x K columns
  std::vector<std::vector<double>> means;        // stochastic: X rows x K columns
  std::string noise = "bernoulli";               // stochastic: bernoulli | none
  double constant_value = 0.5;                   // constant
};

struct VerificationConfig {
  bool enabled = false;
  std::vector<std::string> checks;  // default: all five
  // Tiny certification instance.
  int tiny_horizon = 3;
  int tiny_policies = 4;
  int tiny_contexts = 2;
  int tiny_actions = 2;
  double tiny_gamma = 0.5;
  std::uint64_t tiny_seed = 11;
  std::int64_t n_inner = 20000;
  std::int64_t n_outer = 20000;
  std::int64_t n_samples = 10000;
  // Hallucinated-sum bound check.
  int rademacher_horizon = 64;
  int rademacher_actions = 2;
  int rademacher_policies = 8;
  int rademacher_contexts = 4;
  double rademacher_gamma = 0.3;
  // End-to-end regret bound check.
  int regret_horizon = 512;
  int regret_seeds = 20;
  double regret_gamma = -1.0;  // < 0 selects the horizon-tuned default
};

struct ExperimentConfig {
  int horizon = 0;
  int num_actions = 0;
  int num_contexts = 0;
  std::vector<double> context_probs;  // empty = uniform
  // Policy class: explicit tables, or |size| random tables from a seed.
  std::vector<std::vector<int>> policy_tables;
  int policy_count = 0;
  std::uint64_t policy_seed = 0;
  std::vector<LearnerSpecConfig> learners;
  std::vector<AdversarySpecConfig> adversaries;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  std::string out_dir = "results";
  VerificationConfig verification;

  PolicyClass build_policy_class() const;
  ContextDistribution build_context_distribution() const;
};

// Parses and cross-validates a JSON config; throws ConfigError on any
// inconsistency. `load_config` reads the file and resolves relative CSV paths
// against the config's directory.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunSummary {
  std::string run_id;
  std::string learner;
  std::string adversary;
  std::uint64_t seed = 0;
  double expected_regret = 0.0;
  double realized_regret = 0.0;
  double benchmark_cost = 0.0;
  int benchmark_policy = 0;
  std::int64_t total_oracle_calls = 0;
};

struct RunOutputs {
  std::vector<std::string> trace_files;
  std::string summary_file;
  std::vector<RunSummary> runs;
};

// Executes the learners x adversaries x seeds product, writing one trace CSV
// per run plus summary.json. Parallel and serial execution produce identical
// bytes.
RunOutputs run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs);

// Runs the requested verification checks (empty = config's list, or all) and
// writes verification_report.json under out_dir. Returns the reports.
std::vector<CheckReport> run_verification(const ExperimentConfig& config,
                                          std::vector<std::string> checks,
                                          const std::string& out_dir, int jobs);

// Aggregates trace CSVs in `trace_dir` into a regret table (written to
// `table_out` and regret_table.csv) and a plot-ready cumulative-regret CSV.
void summarize_traces(const std::string& trace_dir, const std::string& out_dir,
                      std::ostream& table_out);

// Shortest round-trip decimal rendering; used for every float the tool writes.
std::string format_double(double value);

}  // namespace relbandit
