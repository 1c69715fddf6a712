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
#include "amplab/manifest.hpp"

#include <fstream>

#include "amplab/errors.hpp"

namespace amplab {

nlohmann::json make_manifest(const ExperimentConfig& config, const PreparedData& data,
                             const std::string& command) {
  auto hex = [](std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
  };
  nlohmann::json j;
  j["command"] = command;
  j["config"] = to_text(config);
  j["seeds"] = config.seeds;
  j["subsample_ratio"] = config.data.subsample_ratio;
  j["data_seed"] = config.data.data_seed;
  j["train_hash"] = hex(data.train_hash);
  j["test_hash"] = hex(data.test_hash);
  j["train_size"] = data.train.size();
  j["dev_size"] = data.dev.size();
  j["test_size"] = data.test.size();
  j["vocab_size"] = data.vocab.size();
  j["label_map"] = data.train.label_names;
  j["train_class_counts"] = data.train.class_counts();
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace amplab
