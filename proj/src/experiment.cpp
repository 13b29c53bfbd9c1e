#include "relbandit/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relbandit/parallel.hpp"

namespace relbandit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  return out.empty() ? std::string("unnamed") : out;
}

// Assigns unique labels: the kind itself, then kind_2, kind_3, ...
template <typename Spec>
void assign_labels(std::vector<Spec>& specs) {
  std::map<std::string, int> seen;
  for (Spec& s : specs) {
    std::string base = sanitize_label(s.label.empty() ? s.kind : s.label);
    const int count = ++seen[base];
    s.label = count == 1 ? base : base + "_" + std::to_string(count);
  }
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError("config: missing or non-numeric '" + key + "'");
  }
  return j[key].get<double>();
}

std::vector<std::vector<double>> parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError("config: " + what + " must be a 2d array");
  std::vector<std::vector<double>> out;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) {
      throw ConfigError("config: " + what + " must be a 2d array");
    }
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ConfigError("config: " + what + " has a non-numeric cell");
      r.push_back(v.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct RunTask {
  int learner_index = 0;
  int adversary_index = 0;
  std::uint64_t seed = 0;
  std::string run_id;
};

std::unique_ptr<Learner> build_learner(const ExperimentConfig& cfg, const LearnerSpecConfig& spec,
                                       const PolicyClass& policies,
                                       const ContextDistribution& dist, RunStreams& streams) {
  const int t = cfg.horizon;
  const int k = cfg.num_actions;
  const auto tuned = [&](double g) {
    return g < 0.0 ? default_gamma(t, k, policies.size()) : g;
  };
  if (spec.kind == "relax_bandit") {
    return std::make_unique<RelaxBanditLearner>(policies, dist, t, tuned(spec.gamma),
                                                streams.rollout, streams.action,
                                                streams.estimator);
  }
  if (spec.kind == "full_rademacher") {
    return std::make_unique<FullRademacherLearner>(policies, dist, t, tuned(spec.gamma),
                                                   streams.rollout, streams.action,
                                                   streams.estimator);
  }
  if (spec.kind == "exp4") {
    return std::make_unique<Exp4Learner>(policies, t, tuned(spec.gamma), spec.lambda,
                                         streams.action, streams.estimator);
  }
  if (spec.kind == "epsilon_greedy") {
    return std::make_unique<EpsilonGreedyLearner>(policies, spec.epsilon, streams.action,
                                                  streams.estimator);
  }
  throw ConfigError("config: unknown learner kind '" + spec.kind + "'");
}

std::unique_ptr<Adversary> build_adversary(const AdversarySpecConfig& spec,
                                           const PolicyClass& policies, RunStreams& streams) {
  const int k = policies.num_actions();
  if (spec.kind == "fixed") {
    if (spec.fixed_costs.empty()) {
      throw ConfigError("fixed adversary '" + spec.label +
                        "': CSV not loaded; read the config with load_config");
    }
    std::vector<CostVector> costs;
    costs.reserve(spec.fixed_costs.size());
    for (const auto& row : spec.fixed_costs) costs.emplace_back(row);
    return std::make_unique<FixedSequenceAdversary>(std::move(costs));
  }
  if (spec.kind == "stochastic") {
    const auto noise = spec.noise == "none" ? StochasticAdversary::Noise::kNone
                                            : StochasticAdversary::Noise::kBernoulli;
    return std::make_unique<StochasticAdversary>(spec.means, noise, streams.adversary);
  }
  if (spec.kind == "punish_mode") return std::make_unique<PunishModeAdversary>(k);
  if (spec.kind == "punish_above_uniform") {
    return std::make_unique<PunishAboveUniformAdversary>(k);
  }
  if (spec.kind == "best_policy_chaser") {
    return std::make_unique<BestPolicyChaserAdversary>(policies);
  }
  if (spec.kind == "constant") {
    const double value = spec.constant_value;
    return std::make_unique<CustomRuleAdversary>(
        "constant", [value, k](int, Context, const ActionDistribution&) {
          return std::vector<double>(static_cast<std::size_t>(k), value);
        });
  }
  throw ConfigError("config: unknown adversary kind '" + spec.kind + "'");
}

void write_trace_csv(const std::string& path, const std::string& run_id,
                     const std::string& learner, const std::string& adversary,
                     std::uint64_t seed, const EpisodeResult& episode) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write trace file " + path);
  out << kTraceHeaderV1 << '\n';
  for (std::size_t i = 0; i < episode.records.size(); ++i) {
    const RoundRecord& r = episode.records[i];
    out << run_id << ',' << learner << ',' << adversary << ',' << seed << ',' << r.t << ','
        << r.context.id << ',' << r.action << ',' << format_double(r.observed_cost) << ','
        << format_double(episode.expected_round_cost[i]) << ','
        << format_double(episode.cum_expected_regret[i]) << ',' << r.oracle_calls << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

PolicyClass ExperimentConfig::build_policy_class() const {
  if (!policy_tables.empty()) {
    std::vector<Policy> policies;
    policies.reserve(policy_tables.size());
    for (const auto& table : policy_tables) policies.emplace_back(table);
    return PolicyClass(std::move(policies), num_actions);
  }
  return PolicyClass::random(num_contexts, num_actions, policy_count, policy_seed);
}

ContextDistribution ExperimentConfig::build_context_distribution() const {
  if (context_probs.empty()) return ContextDistribution::uniform(num_contexts);
  return ContextDistribution(context_probs);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  ExperimentConfig cfg;
  cfg.horizon = static_cast<int>(require_number(doc, "T"));
  cfg.num_actions = static_cast<int>(require_number(doc, "K"));
  cfg.num_contexts = static_cast<int>(require_number(doc, "X"));
  if (cfg.horizon < 1) throw ConfigError("config: T must be >= 1");
  if (cfg.num_actions < 1) throw ConfigError("config: K must be >= 1");
  if (cfg.num_contexts < 1) throw ConfigError("config: X must be >= 1");

  if (doc.contains("context_distribution")) {
    for (const auto& v : doc["context_distribution"]) {
      if (!v.is_number()) throw ConfigError("config: context_distribution must be numeric");
      cfg.context_probs.push_back(v.get<double>());
    }
    if (static_cast<int>(cfg.context_probs.size()) != cfg.num_contexts) {
      throw ConfigError("config: context_distribution length != X");
    }
  }

  if (!doc.contains("policy_class") || !doc["policy_class"].is_object()) {
    throw ConfigError("config: missing policy_class object");
  }
  const json& pc = doc["policy_class"];
  const std::string pc_kind = pc.value("kind", "");
  if (pc_kind == "random") {
    cfg.policy_count = static_cast<int>(require_number(pc, "size"));
    if (cfg.policy_count < 1) throw ConfigError("config: policy_class.size must be >= 1");
    cfg.policy_seed = pc.value("seed", 0ULL);
  } else if (pc_kind == "explicit") {
    if (!pc.contains("tables")) throw ConfigError("config: explicit policy_class needs tables");
    for (const auto& row : parse_matrix(pc["tables"], "policy_class.tables")) {
      std::vector<int> table;
      for (double v : row) table.push_back(static_cast<int>(v));
      cfg.policy_tables.push_back(std::move(table));
    }
    for (const auto& table : cfg.policy_tables) {
      if (static_cast<int>(table.size()) != cfg.num_contexts) {
        throw ConfigError("config: policy table length != X");
      }
      for (int a : table) {
        if (a < 0 || a >= cfg.num_actions) {
          throw ConfigError("config: policy table action outside [0, K)");
        }
      }
    }
  } else {
    throw ConfigError("config: policy_class.kind must be 'random' or 'explicit'");
  }

  if (!doc.contains("learners") || !doc["learners"].is_array() || doc["learners"].empty()) {
    throw ConfigError("config: learners must be a nonempty array");
  }
  for (const auto& l : doc["learners"]) {
    LearnerSpecConfig spec;
    spec.kind = l.value("kind", "");
    spec.label = l.value("label", "");
    if (l.contains("gamma")) {
      if (l["gamma"].is_string() && l["gamma"].get<std::string>() == "auto") {
        spec.gamma = -1.0;
      } else if (l["gamma"].is_number()) {
        spec.gamma = l["gamma"].get<double>();
        if (!(spec.gamma > 0.0 && spec.gamma <= 1.0)) {
          throw ConfigError("config: learner gamma must be in (0,1] or 'auto'");
        }
      } else {
        throw ConfigError("config: learner gamma must be a number or 'auto'");
      }
    }
    spec.lambda = l.value("lambda", -1.0);
    spec.epsilon = l.value("epsilon", 0.1);
    if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
      throw ConfigError("config: epsilon must be in [0,1]");
    }
    if (spec.kind != "relax_bandit" && spec.kind != "full_rademacher" && spec.kind != "exp4" &&
        spec.kind != "epsilon_greedy") {
      throw ConfigError("config: unknown learner kind '" + spec.kind + "'");
    }
    cfg.learners.push_back(std::move(spec));
  }
  assign_labels(cfg.learners);

  if (!doc.contains("adversaries") || !doc["adversaries"].is_array() ||
      doc["adversaries"].empty()) {
    throw ConfigError("config: adversaries must be a nonempty array");
  }
  for (const auto& a : doc["adversaries"]) {
    AdversarySpecConfig spec;
    spec.kind = a.value("kind", "");
    spec.label = a.value("label", "");
    if (spec.kind == "fixed") {
      if (a.contains("csv")) {
        spec.csv_path = a["csv"].get<std::string>();  // resolved in load_config
      } else if (a.contains("costs")) {
        spec.fixed_costs = parse_matrix(a["costs"], "adversary costs");
      } else {
        throw ConfigError("config: fixed adversary needs 'csv' or 'costs'");
      }
    } else if (spec.kind == "stochastic") {
      if (!a.contains("means")) throw ConfigError("config: stochastic adversary needs means");
      spec.means = parse_matrix(a["means"], "adversary means");
      if (static_cast<int>(spec.means.size()) != cfg.num_contexts) {
        throw ConfigError("config: stochastic means rows != X");
      }
      for (const auto& row : spec.means) {
        if (static_cast<int>(row.size()) != cfg.num_actions) {
          throw ConfigError("config: stochastic means columns != K");
        }
      }
      spec.noise = a.value("noise", "bernoulli");
      if (spec.noise != "bernoulli" && spec.noise != "none") {
        throw ConfigError("config: stochastic noise must be 'bernoulli' or 'none'");
      }
    } else if (spec.kind == "constant") {
      spec.constant_value = a.value("value", 0.5);
      if (!(spec.constant_value >= 0.0 && spec.constant_value <= 1.0)) {
        throw ConfigError("config: constant adversary value outside [0,1]");
      }
    } else if (spec.kind != "punish_mode" && spec.kind != "punish_above_uniform" &&
               spec.kind != "best_policy_chaser") {
      throw ConfigError("config: unknown adversary kind '" + spec.kind + "'");
    }
    cfg.adversaries.push_back(std::move(spec));
  }
  assign_labels(cfg.adversaries);

  if (doc.contains("seeds")) {
    const json& s = doc["seeds"];
    if (s.is_array()) {
      for (const auto& v : s) cfg.seeds.push_back(v.get<std::uint64_t>());
    } else if (s.is_object()) {
      const int count = static_cast<int>(require_number(s, "count"));
      const std::uint64_t base = s.value("base", 0ULL);
      for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + static_cast<std::uint64_t>(i));
    } else {
      throw ConfigError("config: seeds must be an array or {count, base}");
    }
  }
  if (cfg.seeds.empty()) throw ConfigError("config: need at least one seed");

  cfg.master_seed = doc.value("master_seed", 0ULL);
  cfg.out_dir = doc.value("out_dir", "results");

  if (doc.contains("verification")) {
    const json& v = doc["verification"];
    VerificationConfig& vc = cfg.verification;
    vc.enabled = v.value("enabled", false);
    if (v.contains("checks")) {
      for (const auto& c : v["checks"]) vc.checks.push_back(c.get<std::string>());
    }
    vc.tiny_horizon = v.value("tiny_horizon", vc.tiny_horizon);
    vc.tiny_policies = v.value("tiny_policies", vc.tiny_policies);
    vc.tiny_contexts = v.value("tiny_contexts", vc.tiny_contexts);
    vc.tiny_actions = v.value("tiny_actions", vc.tiny_actions);
    vc.tiny_gamma = v.value("tiny_gamma", vc.tiny_gamma);
    vc.tiny_seed = v.value("tiny_seed", vc.tiny_seed);
    vc.n_inner = v.value("n_inner", vc.n_inner);
    vc.n_outer = v.value("n_outer", vc.n_outer);
    vc.n_samples = v.value("n_samples", vc.n_samples);
    vc.rademacher_horizon = v.value("rademacher_horizon", vc.rademacher_horizon);
    vc.rademacher_actions = v.value("rademacher_actions", vc.rademacher_actions);
    vc.rademacher_policies = v.value("rademacher_policies", vc.rademacher_policies);
    vc.rademacher_contexts = v.value("rademacher_contexts", vc.rademacher_contexts);
    vc.rademacher_gamma = v.value("rademacher_gamma", vc.rademacher_gamma);
    vc.regret_horizon = v.value("regret_horizon", vc.regret_horizon);
    vc.regret_seeds = v.value("regret_seeds", vc.regret_seeds);
    vc.regret_gamma = v.value("regret_gamma", vc.regret_gamma);
  }

  // Fixed inline sequences must cover the horizon.
  for (const AdversarySpecConfig& a : cfg.adversaries) {
    if (a.kind == "fixed" && !a.fixed_costs.empty()) {
      if (static_cast<int>(a.fixed_costs.size()) < cfg.horizon) {
        throw ConfigError("config: fixed adversary has fewer rows than T");
      }
      for (const auto& row : a.fixed_costs) {
        if (static_cast<int>(row.size()) != cfg.num_actions) {
          throw ConfigError("config: fixed adversary columns != K");
        }
      }
    }
  }

  // Materialize the class once to surface any inconsistency now.
  cfg.build_policy_class();
  cfg.build_context_distribution();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig cfg = parse_config(buffer.str());
  // Resolve CSV-backed fixed adversaries relative to the config file.
  const fs::path base = fs::path(path).parent_path();
  for (AdversarySpecConfig& a : cfg.adversaries) {
    if (a.kind == "fixed" && !a.csv_path.empty()) {
      const fs::path csv =
          fs::path(a.csv_path).is_absolute() ? fs::path(a.csv_path) : base / a.csv_path;
      const std::vector<CostVector> rows = load_cost_csv(csv.string(), cfg.num_actions);
      if (static_cast<int>(rows.size()) < cfg.horizon) {
        throw ConfigError("config: " + csv.string() + " has fewer rows than T");
      }
      for (const CostVector& r : rows) a.fixed_costs.push_back(r.values());
    }
  }
  return cfg;
}

RunOutputs run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
  const PolicyClass policies = cfg.build_policy_class();
  const ContextDistribution dist = cfg.build_context_distribution();
  fs::create_directories(out_dir);

  std::vector<RunTask> tasks;
  for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
    for (std::size_t ai = 0; ai < cfg.adversaries.size(); ++ai) {
      for (std::uint64_t seed : cfg.seeds) {
        RunTask task;
        task.learner_index = static_cast<int>(li);
        task.adversary_index = static_cast<int>(ai);
        task.seed = seed;
        task.run_id = cfg.learners[li].label + "__" + cfg.adversaries[ai].label + "__s" +
                      std::to_string(seed);
        tasks.push_back(std::move(task));
      }
    }
  }

  RunOutputs outputs;
  outputs.runs.resize(tasks.size());
  outputs.trace_files.resize(tasks.size());

  parallel_for(static_cast<int>(tasks.size()), jobs, [&](int i) {
    const RunTask& task = tasks[static_cast<std::size_t>(i)];
    const LearnerSpecConfig& lspec = cfg.learners[static_cast<std::size_t>(task.learner_index)];
    const AdversarySpecConfig& aspec =
        cfg.adversaries[static_cast<std::size_t>(task.adversary_index)];

    RunStreams streams(cfg.master_seed, task.seed);
    std::unique_ptr<Learner> learner = build_learner(cfg, lspec, policies, dist, streams);
    std::unique_ptr<Adversary> adversary = build_adversary(aspec, policies, streams);
    const EpisodeResult episode =
        run_episode(*learner, *adversary, dist, policies, cfg.horizon, streams.context);

    const std::string path = (fs::path(out_dir) / (task.run_id + ".csv")).string();
    write_trace_csv(path, task.run_id, lspec.label, aspec.label, task.seed, episode);

    RunSummary summary;
    summary.run_id = task.run_id;
    summary.learner = lspec.label;
    summary.adversary = aspec.label;
    summary.seed = task.seed;
    summary.expected_regret = episode.regret.expected_regret;
    summary.realized_regret = episode.regret.realized_regret;
    summary.benchmark_cost = episode.regret.benchmark_cost;
    summary.benchmark_policy = episode.regret.benchmark_policy;
    for (const RoundRecord& r : episode.records) summary.total_oracle_calls += r.oracle_calls;
    outputs.runs[static_cast<std::size_t>(i)] = std::move(summary);
    outputs.trace_files[static_cast<std::size_t>(i)] = path;
  });

  json summary_doc;
  summary_doc["schema_version"] = 1;
  summary_doc["master_seed"] = cfg.master_seed;
  summary_doc["runs"] = json::array();
  std::map<std::pair<std::string, std::string>, std::vector<double>> grouped;
  for (const RunSummary& r : outputs.runs) {
    json entry;
    entry["run_id"] = r.run_id;
    entry["learner"] = r.learner;
    entry["adversary"] = r.adversary;
    entry["seed"] = r.seed;
    entry["expected_regret"] = r.expected_regret;
    entry["realized_regret"] = r.realized_regret;
    entry["benchmark_cost"] = r.benchmark_cost;
    entry["benchmark_policy"] = r.benchmark_policy;
    entry["total_oracle_calls"] = r.total_oracle_calls;
    summary_doc["runs"].push_back(std::move(entry));
    grouped[{r.learner, r.adversary}].push_back(r.expected_regret);
  }
  summary_doc["aggregates"] = json::array();
  for (const auto& [key, values] : grouped) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const std::size_t n = values.size();
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    const double half = n > 1 ? 1.96 * sd / std::sqrt(static_cast<double>(n)) : 0.0;
    json entry;
    entry["learner"] = key.first;
    entry["adversary"] = key.second;
    entry["n"] = n;
    entry["mean_expected_regret"] = mean;
    entry["ci95_low"] = mean - half;
    entry["ci95_high"] = mean + half;
    summary_doc["aggregates"].push_back(std::move(entry));
  }

  outputs.summary_file = (fs::path(out_dir) / "summary.json").string();
  std::ofstream summary_out(outputs.summary_file, std::ios::binary | std::ios::trunc);
  summary_out << summary_doc.dump(2) << '\n';
  return outputs;
}

std::vector<CheckReport> run_verification(const ExperimentConfig& cfg,
                                          std::vector<std::string> checks,
                                          const std::string& out_dir, int jobs) {
  const VerificationConfig& vc = cfg.verification;
  if (checks.empty()) checks = vc.checks;
  if (checks.empty()) {
    checks = {"admissibility", "final_step", "rademacher", "regret", "oracle_budget"};
  }

  TinyInstance tiny{
      PolicyClass::random(vc.tiny_contexts, vc.tiny_actions, vc.tiny_policies, vc.tiny_seed),
      ContextDistribution::uniform(vc.tiny_contexts), vc.tiny_horizon, vc.tiny_gamma,
      vc.tiny_seed};

  std::vector<CheckReport> reports;
  for (const std::string& check : checks) {
    if (check == "admissibility") {
      Rng rng(mix_seed(vc.tiny_seed, 0xAD000001ULL));
      for (int t = 1; t <= tiny.horizon; ++t) {
        reports.push_back(check_admissibility_step(tiny, t, vc.n_outer, vc.n_inner, rng,
                                                   CheckMode::kMonteCarlo, jobs));
      }
    } else if (check == "final_step") {
      Rng rng(mix_seed(vc.tiny_seed, 0xAD000002ULL));
      reports.push_back(check_final_condition(tiny, vc.n_samples, rng));
    } else if (check == "rademacher") {
      Rng rng(mix_seed(vc.tiny_seed, 0xAD000003ULL));
      const PolicyClass rad_class = PolicyClass::random(
          vc.rademacher_contexts, vc.rademacher_actions, vc.rademacher_policies, vc.tiny_seed);
      reports.push_back(check_rademacher_bound(
          vc.rademacher_horizon, vc.rademacher_actions, rad_class,
          ContextDistribution::uniform(vc.rademacher_contexts), vc.rademacher_gamma,
          vc.n_samples, rng, jobs));
    } else if (check == "regret") {
      const PolicyClass regret_class =
          PolicyClass::random(vc.tiny_contexts, vc.tiny_actions, vc.tiny_policies, vc.tiny_seed);
      const double gamma =
          vc.regret_gamma < 0.0
              ? default_gamma(vc.regret_horizon, vc.tiny_actions, regret_class.size())
              : vc.regret_gamma;
      for (CheckReport& r :
           check_regret_bound(regret_class, ContextDistribution::uniform(vc.tiny_contexts),
                              vc.regret_horizon, gamma, vc.regret_seeds, cfg.master_seed, jobs)) {
        reports.push_back(std::move(r));
      }
    } else if (check == "oracle_budget") {
      const PolicyClass policies = cfg.build_policy_class();
      const ContextDistribution dist = cfg.build_context_distribution();
      const int budget_horizon = std::min(cfg.horizon, 10);
      const int k = policies.num_actions();
      const double gamma = 0.5;
      for (const bool dense : {false, true}) {
        RunStreams streams(cfg.master_seed, dense ? 2 : 1);
        std::unique_ptr<Learner> learner;
        if (dense) {
          learner = std::make_unique<FullRademacherLearner>(policies, dist, budget_horizon, gamma,
                                                            streams.rollout, streams.action,
                                                            streams.estimator);
        } else {
          learner = std::make_unique<RelaxBanditLearner>(policies, dist, budget_horizon, gamma,
                                                         streams.rollout, streams.action,
                                                         streams.estimator);
        }
        PunishModeAdversary adversary(k);
        const EpisodeResult episode =
            run_episode(*learner, adversary, dist, policies, budget_horizon, streams.context);
        CheckReport r = check_oracle_budget_exact(episode.records, k + 1);
        r.name = std::string(learner->name()) + "_" + r.name;
        reports.push_back(std::move(r));
      }
      RunStreams streams(cfg.master_seed, 3);
      EpsilonGreedyLearner greedy(policies, 0.2, streams.action, streams.estimator);
      PunishModeAdversary adversary(k);
      const EpisodeResult episode =
          run_episode(greedy, adversary, dist, policies, budget_horizon, streams.context);
      CheckReport r = check_oracle_budget_at_most(episode.records, 1);
      r.name = "epsilon_greedy_" + r.name;
      reports.push_back(std::move(r));
    } else {
      throw ConfigError("verification: unknown check '" + check + "'");
    }
  }

  fs::create_directories(out_dir);
  const std::string report_text = render_report_json(reports);
  validate_report_json(report_text);
  std::ofstream out(fs::path(out_dir) / "verification_report.json",
                    std::ios::binary | std::ios::trunc);
  out << report_text << '\n';
  return reports;
}

void summarize_traces(const std::string& trace_dir, const std::string& out_dir,
                      std::ostream& table_out) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trace_dir)) {
    // Skip our own outputs so summarizing in place stays idempotent.
    if (entry.path().filename() == "regret_table.csv" ||
        entry.path().filename() == "cumulative_regret.csv") {
      continue;
    }
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("summarize: no trace CSVs in " + trace_dir);

  struct RunData {
    std::string learner;
    std::string adversary;
    double final_regret = 0.0;
    std::vector<double> cum_regret;
  };
  std::vector<RunData> runs;

  for (const fs::path& file : files) {
    std::ifstream in(file);
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("summarize: empty trace " + file.string());
    if (header != kTraceHeaderV1) {
      throw ConfigError("summarize: trace schema mismatch in " + file.string() +
                        ": expected v1 header '" + std::string(kTraceHeaderV1) + "', got '" +
                        header + "'");
    }
    RunData run;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> cells = split_csv_line(line);
      if (cells.size() != 11) {
        throw ConfigError("summarize: malformed row in " + file.string());
      }
      run.learner = cells[1];
      run.adversary = cells[2];
      run.cum_regret.push_back(std::stod(cells[9]));
    }
    if (run.cum_regret.empty()) {
      throw ConfigError("summarize: trace has no rounds: " + file.string());
    }
    run.final_regret = run.cum_regret.back();
    runs.push_back(std::move(run));
  }

  const std::size_t horizon = runs.front().cum_regret.size();
  for (const RunData& run : runs) {
    if (run.cum_regret.size() != horizon) {
      throw ConfigError("summarize: traces disagree on horizon");
    }
  }

  std::map<std::pair<std::string, std::string>, std::vector<const RunData*>> grouped;
  for (const RunData& run : runs) grouped[{run.learner, run.adversary}].push_back(&run);

  fs::create_directories(out_dir);
  std::ofstream table_csv(fs::path(out_dir) / "regret_table.csv",
                          std::ios::binary | std::ios::trunc);
  table_csv << "learner,adversary,n,mean_expected_regret,ci95_low,ci95_high\n";
  table_out << "learner adversary n mean_expected_regret ci95\n";
  for (const auto& [key, members] : grouped) {
    const std::size_t n = members.size();
    double mean = 0.0;
    for (const RunData* r : members) mean += r->final_regret;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const RunData* r : members) var += (r->final_regret - mean) * (r->final_regret - mean);
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    const double half = n > 1 ? 1.96 * sd / std::sqrt(static_cast<double>(n)) : 0.0;
    table_csv << key.first << ',' << key.second << ',' << n << ',' << format_double(mean) << ','
              << format_double(mean - half) << ',' << format_double(mean + half) << '\n';
    table_out << key.first << ' ' << key.second << ' ' << n << ' ' << format_double(mean) << " ["
              << format_double(mean - half) << ", " << format_double(mean + half) << "]"
              << (n == 1 ? " (n=1)" : "") << '\n';
  }

  std::ofstream curve_csv(fs::path(out_dir) / "cumulative_regret.csv",
                          std::ios::binary | std::ios::trunc);
  curve_csv << "learner,adversary,t,mean_cum_expected_regret\n";
  for (const auto& [key, members] : grouped) {
    for (std::size_t t = 0; t < horizon; ++t) {
      double mean = 0.0;
      for (const RunData* r : members) mean += r->cum_regret[t];
      mean /= static_cast<double>(members.size());
      curve_csv << key.first << ',' << key.second << ',' << (t + 1) << ','
                << format_double(mean) << '\n';
    }
  }
}

}  // namespace relbandit
