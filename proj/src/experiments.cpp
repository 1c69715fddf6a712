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
#include "amplab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "amplab/errors.hpp"
#include "amplab/stats.hpp"

namespace amplab {
namespace {

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

std::size_t worker_count(const ExperimentConfig& config, std::size_t jobs) {
  std::size_t n = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace

std::vector<double> ExperimentTable::errors(const std::string& arm) const {
  std::vector<double> out;
  for (const auto& r : runs) {
    if (r.arm == arm) out.push_back(r.test_error);
  }
  return out;
}

std::vector<Arm> policy_arms(const std::vector<Policy>& policies) {
  const bool has_none = std::find(policies.begin(), policies.end(), Policy::kNone) != policies.end();
  const bool has_mixup = std::find(policies.begin(), policies.end(), Policy::kMixup) != policies.end();
  std::vector<Arm> arms;
  for (Policy p : policies) {
    Arm arm{std::string(to_string(p)), p, MaskMode::kCompare, {}};
    if (p == Policy::kMixup && has_none) arm.reference = "none";
    if (p == Policy::kAmp) arm.reference = has_mixup ? "mixup" : (has_none ? "none" : "");
    arms.push_back(arm);
  }
  return arms;
}

std::vector<Arm> ablation_arms() {
  return {
      {"baseline", Policy::kNone, MaskMode::kCompare, ""},
      {"+randop", Policy::kMixup, MaskMode::kCompare, "baseline"},
      {"+maxop", Policy::kAmp, MaskMode::kAlwaysPerturbed, "+randop"},
      {"amp", Policy::kAmp, MaskMode::kCompare, "+randop"},
  };
}

ExperimentTable summarize(const std::vector<RunRow>& runs, const std::vector<Arm>& arms) {
  ExperimentTable table;
  table.runs = runs;
  for (const auto& arm : arms) {
    const auto errs = table.errors(arm.label);
    if (errs.empty()) continue;
    SummaryRow row{arm.label, errs.size(), stats::mean(errs), stats::sample_std(errs), std::nullopt};
    table.summary.push_back(row);
  }
  for (const auto& arm : arms) {
    if (arm.reference.empty()) continue;
    auto find = [&](const std::string& label) {
      return std::find_if(table.summary.begin(), table.summary.end(),
                          [&](const SummaryRow& r) { return r.arm == label; });
    };
    auto self = find(arm.label);
    auto ref = find(arm.reference);
    if (self == table.summary.end() || ref == table.summary.end() || ref->mean == 0.0) continue;
    self->rp_percent = stats::relative_improvement(ref->mean, self->mean);
  }
  return table;
}

ExperimentTable run_arms(const ExperimentConfig& config, const PreparedData& data,
                         const std::vector<Arm>& arms, const RunCallback& on_run) {
  config.validate();
  struct Job {
    const Arm* arm;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& arm : arms) {
    for (auto seed : config.seeds) jobs.push_back({&arm, seed});
  }
  std::vector<RunRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        ExperimentConfig arm_config = config;
        arm_config.mix.policy = jobs[k].arm->policy;
        TrainOptions options;
        options.mask_mode = jobs[k].arm->mask_mode;
        const auto run = train(arm_config, data, jobs[k].seed, options);
        rows[k] = {jobs[k].arm->label, jobs[k].seed, run.report.test_error, run.report.wall_seconds};
        if (on_run) {
          std::lock_guard lock(callback_mutex);
          on_run(rows[k]);
        }
      } catch (...) {
        std::lock_guard lock(callback_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t n_workers = worker_count(config, jobs.size());
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(rows, arms);
}

ExperimentTable run_seeds(const ExperimentConfig& config, const RunCallback& on_run) {
  const PreparedData data = prepare_data(config);
  return run_arms(config, data, policy_arms(config.policies), on_run);
}

ExperimentTable ablate(const ExperimentConfig& config, const RunCallback& on_run) {
  const PreparedData data = prepare_data(config);
  return run_arms(config, data, ablation_arms(), on_run);
}

std::vector<LowResRow> lowres(const ExperimentConfig& config, const std::vector<double>& ratios,
                              const RunCallback& on_run) {
  if (ratios.empty()) throw ConfigError("lowres: no ratios given");
  std::vector<LowResRow> out;
  for (double ratio : ratios) {
    ExperimentConfig c = config;
    c.data.subsample_ratio = ratio;
    c.validate();
    const PreparedData data = prepare_data(c);
    out.push_back({ratio, data.train.size() + data.dev.size(), run_arms(c, data, policy_arms(c.policies), on_run)});
  }
  return out;
}

std::string runs_csv(const ExperimentTable& table) {
  std::string out = "policy,seed,test_error\n";
  for (const auto& r : table.runs) {
    out += r.arm + "," + std::to_string(r.seed) + "," + fmt(r.test_error, 6) + "\n";
  }
  return out;
}

namespace {

std::string summary_line(const SummaryRow& r) {
  return r.arm + "," + fmt(r.mean * 100.0, 2) + "," + fmt(r.std * 100.0, 2) + "," +
         (r.rp_percent ? fmt(stats::round_to(*r.rp_percent, 1), 1) : std::string());
}

}  // namespace

std::string summary_csv(const ExperimentTable& table) {
  std::string out = "policy,mean,std,rp_percent\n";
  for (const auto& r : table.summary) out += summary_line(r) + "\n";
  return out;
}

std::string lowres_csv(const std::vector<LowResRow>& rows) {
  std::string out = "ratio,train_size,policy,mean,std,rp_percent\n";
  for (const auto& row : rows) {
    for (const auto& r : row.table.summary) {
      out += fmt(row.ratio, 4) + "," + std::to_string(row.train_size) + "," + summary_line(r) + "\n";
    }
  }
  return out;
}

}  // namespace amplab
