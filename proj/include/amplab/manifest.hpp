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
#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "amplab/config.hpp"
#include "amplab/train.hpp"

namespace amplab {

/// Run description: config, seeds, dataset hashes and sizes, label map.
nlohmann::json make_manifest(const ExperimentConfig& config, const PreparedData& data,
                             const std::string& command);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace amplab
