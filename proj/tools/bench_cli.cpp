#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relbandit/experiment.hpp"

namespace {

// Exit codes: 0 success, 1 configuration error, 2 verification failure.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kVerificationFailure = 2;

std::vector<std::string> split_checks(const std::string& list) {
  std::vector<std::string> checks;
  std::string current;
  for (char ch : list) {
    if (ch == ',') {
      if (!current.empty()) checks.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) checks.push_back(current);
  return checks;
}

int report_outcome(const std::vector<relbandit::CheckReport>& reports) {
  bool all_pass = true;
  for (const relbandit::CheckReport& r : reports) {
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << "  lhs=" << relbandit::format_double(r.lhs)
              << " rhs=" << relbandit::format_double(r.rhs)
              << " se=" << relbandit::format_double(r.se) << " n=" << r.n;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
  }
  return all_pass ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oracle-efficient contextual bandit benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> master_seed;
  int jobs = 1;
  std::string checks_list;

  CLI::App* run = app.add_subcommand("run", "Execute the configured experiment grid");
  run->add_option("--config", config_path, "Path to the JSON config")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--seed", master_seed, "Master seed (overrides config)");
  run->add_option("--jobs", jobs, "Worker threads");
  run->add_option("--checks", checks_list, "Comma-separated verification checks");

  CLI::App* verify = app.add_subcommand("verify", "Run the numerical certification checks");
  verify->add_option("--config", config_path, "Path to the JSON config")->required();
  verify->add_option("--out", out_dir, "Output directory (overrides config)");
  verify->add_option("--seed", master_seed, "Master seed (overrides config)");
  verify->add_option("--jobs", jobs, "Worker threads");
  verify->add_option("--checks", checks_list, "Comma-separated subset of checks");

  std::string trace_dir;
  CLI::App* summarize = app.add_subcommand("summarize", "Aggregate trace CSVs into regret tables");
  summarize->add_option("--traces", trace_dir, "Directory of trace CSVs")->required();
  summarize->add_option("--out", out_dir, "Output directory (defaults to the trace dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (summarize->parsed()) {
      const std::string out = out_dir.empty() ? trace_dir : out_dir;
      relbandit::summarize_traces(trace_dir, out, std::cout);
      return kOk;
    }

    relbandit::ExperimentConfig config = relbandit::load_config(config_path);
    if (master_seed.has_value()) config.master_seed = *master_seed;
    const std::string out = out_dir.empty() ? config.out_dir : out_dir;
    const std::vector<std::string> checks = split_checks(checks_list);

    if (run->parsed()) {
      const relbandit::RunOutputs outputs = relbandit::run_experiment(config, out, jobs);
      std::cout << "wrote " << outputs.trace_files.size() << " trace files and "
                << outputs.summary_file << '\n';
      if (config.verification.enabled) {
        return report_outcome(relbandit::run_verification(config, checks, out, jobs));
      }
      return kOk;
    }
    return report_outcome(relbandit::run_verification(config, checks, out, jobs));
  } catch (const relbandit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
