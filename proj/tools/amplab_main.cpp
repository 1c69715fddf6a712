/**
 * Copyright 2026 The amplab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amplab/config.hpp"
#include "amplab/errors.hpp"
#include "amplab/experiments.hpp"
#include "amplab/gradcheck.hpp"
#include "amplab/manifest.hpp"
#include "amplab/sweep.hpp"
#include "amplab/train.hpp"

namespace {

using namespace amplab;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailure = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "runs";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "config file (key = value lines)");
  cmd->add_option("-s,--set", c.overrides, "override a config key, e.g. --set epsilon=0.01");
  cmd->add_option("-o,--out", c.out_dir, "output directory");
}

ExperimentConfig resolve(const Common& c) {
  std::string text;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot read config " + c.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  for (const auto& o : c.overrides) text += "\n" + o;
  return parse_config(text);
}

std::filesystem::path out_file(const Common& c, const std::string& name) {
  return std::filesystem::path(c.out_dir) / name;
}

void print_run(const RunRow& r) {
  std::fprintf(stderr, "  %-9s seed %-4llu test error %.4f (%.1fs)\n", r.arm.c_str(),
               static_cast<unsigned long long>(r.seed), r.test_error, r.wall_seconds);
}

int cmd_train(const Common& c, std::uint64_t seed) {
  const auto config = resolve(c);
  const auto data = prepare_data(config);
  const auto run = train(config, data, seed);
  const auto& rep = run.report;
  std::string steps = "step,objective,loss,loss_prime,mask_rate,mean_abs_grad_lambda\n";
  for (std::size_t k = 0; k < rep.steps.size(); ++k) {
    const auto& s = rep.steps[k];
    std::ostringstream os;
    os.precision(8);
    os << k << ',' << s.objective << ',' << s.mean_loss << ',' << s.mean_loss_prime << ',' << s.mask_rate << ','
       << s.mean_abs_grad_lambda << '\n';
    steps += os.str();
  }
  write_text(out_file(c, "steps.csv"), steps);
  nlohmann::json report = make_manifest(config, data, "train");
  report["seed"] = seed;
  report["policy"] = std::string(to_string(rep.policy));
  report["dev_errors"] = rep.dev_errors;
  report["best_step"] = rep.best_step;
  report["best_dev_error"] = rep.best_dev_error;
  report["test_error"] = rep.test_error;
  report["wall_seconds"] = rep.wall_seconds;
  write_text(out_file(c, "report.json"), report.dump(2) + "\n");
  std::printf("policy=%s seed=%llu test_error=%.6f best_dev_error=%.6f best_step=%zu\n",
              std::string(to_string(rep.policy)).c_str(), static_cast<unsigned long long>(seed), rep.test_error,
              rep.best_dev_error, rep.best_step);
  return kOk;
}

int write_table(const Common& c, const ExperimentConfig& config, const PreparedData& data,
                const ExperimentTable& table, const std::string& command) {
  write_text(out_file(c, "runs.csv"), runs_csv(table));
  write_text(out_file(c, "summary.csv"), summary_csv(table));
  write_text(out_file(c, "manifest.json"), make_manifest(config, data, command).dump(2) + "\n");
  std::cout << summary_csv(table);
  return kOk;
}

int cmd_run(const Common& c) {
  const auto config = resolve(c);
  const auto data = prepare_data(config);
  const auto table = run_arms(config, data, policy_arms(config.policies), print_run);
  return write_table(c, config, data, table, "run");
}

int cmd_ablate(const Common& c) {
  const auto config = resolve(c);
  const auto data = prepare_data(config);
  const auto table = run_arms(config, data, ablation_arms(), print_run);
  return write_table(c, config, data, table, "ablate");
}

int cmd_lowres(const Common& c, const std::vector<double>& ratios) {
  const auto config = resolve(c);
  const auto rows = lowres(config, ratios, print_run);
  write_text(out_file(c, "lowres.csv"), lowres_csv(rows));
  nlohmann::json manifest;
  for (const auto& row : rows) {
    ExperimentConfig rc = config;
    rc.data.subsample_ratio = row.ratio;
    manifest.push_back(make_manifest(rc, prepare_data(rc), "lowres"));
  }
  write_text(out_file(c, "manifest.json"), manifest.dump(2) + "\n");
  std::cout << lowres_csv(rows);
  return kOk;
}

int cmd_sweep(const Common& c, std::uint64_t seed, const std::string& policy_a, const std::string& policy_b,
              const SweepOptions& base, const std::vector<std::size_t>& pair, bool svg) {
  auto config = resolve(c);
  const auto data = prepare_data(config);
  SweepOptions options = base;
  options.max_len = config.data.max_len;
  if (!pair.empty()) {
    if (pair.size() != 2) throw ConfigError("--pair expects two test indices");
    options.single_pair = std::make_pair(pair[0], pair[1]);
  }
  config.mix.policy = parse_policy(policy_a);
  const auto run_a = train(config, data, seed);
  config.mix.policy = parse_policy(policy_b);
  const auto run_b = train(config, data, seed);
  const auto rows = lambda_sweep(run_a.model, run_b.model, data.test, data.vocab, options);
  write_text(out_file(c, "lambda_sweep.csv"), sweep_csv(rows));
  if (svg) write_text(out_file(c, "lambda_sweep.svg"), sweep_svg(rows, policy_a, policy_b));
  write_text(out_file(c, "manifest.json"), make_manifest(config, data, "sweep").dump(2) + "\n");
  std::cout << sweep_csv(rows);
  return kOk;
}

int cmd_gradcheck(const GradcheckOptions& options) {
  bool ok = true;
  for (const auto& e : run_gradcheck(options)) {
    std::printf("%-40s %6zu  max_rel_error %.3e  %s\n", e.name.c_str(), e.coordinates, e.max_rel_error,
                e.passed ? "ok" : "FAIL");
    ok = ok && e.passed;
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixup and adversarial mixing policy experiments on small text classifiers"};
  app.require_subcommand(1);

  Common common;
  std::uint64_t seed = 0;

  auto* train_cmd = app.add_subcommand("train", "train one model and report its test error");
  add_common(train_cmd, common);
  train_cmd->add_option("--seed", seed, "run seed");

  auto* run_cmd = app.add_subcommand("run", "train every configured policy over every seed");
  add_common(run_cmd, common);

  auto* ablate_cmd = app.add_subcommand("ablate", "baseline / +randop / +maxop / amp over every seed");
  add_common(ablate_cmd, common);

  std::vector<double> ratios{0.03, 0.04, 0.05, 0.1};
  auto* lowres_cmd = app.add_subcommand("lowres", "multi-seed comparison on per-class subsamples");
  add_common(lowres_cmd, common);
  lowres_cmd->add_option("--ratios", ratios, "subsample ratios")->delimiter(',');

  SweepOptions sweep_options;
  std::string policy_a = "mixup";
  std::string policy_b = "amp";
  std::vector<std::size_t> pair;
  bool svg = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "test loss of two trained models along lambda");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--seed", seed, "training seed of both models");
  sweep_cmd->add_option("--model-a", policy_a, "policy of the first model");
  sweep_cmd->add_option("--model-b", policy_b, "policy of the second model");
  sweep_cmd->add_option("--layer", sweep_options.layer, "mixing layer: word | sent");
  sweep_cmd->add_option("--grid", sweep_options.grid_points, "number of lambda values");
  sweep_cmd->add_option("--pair-seed", sweep_options.pair_seed, "seed of the test-set pairing");
  sweep_cmd->add_option("--pair", pair, "sweep one pair of test indices i,j")->delimiter(',');
  sweep_cmd->add_flag("--svg", svg, "also write lambda_sweep.svg");

  GradcheckOptions gc;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference check of every op and model");
  gradcheck_cmd->add_option("--seed", gc.seed, "seed of the random inputs");
  gradcheck_cmd->add_option("--inject-sign-flip", gc.inject_sign_flip, "negate the backward rule of an op");

  auto* schema_cmd = app.add_subcommand("config-keys", "list accepted config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(common, seed);
    if (*run_cmd) return cmd_run(common);
    if (*ablate_cmd) return cmd_ablate(common);
    if (*lowres_cmd) return cmd_lowres(common, ratios);
    if (*sweep_cmd) return cmd_sweep(common, seed, policy_a, policy_b, sweep_options, pair, svg);
    if (*gradcheck_cmd) return cmd_gradcheck(gc);
    if (*schema_cmd) {
      for (const auto& [key, description] : config_schema()) std::printf("%-26s %s\n", key.c_str(), description.c_str());
      return kOk;
    }
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
