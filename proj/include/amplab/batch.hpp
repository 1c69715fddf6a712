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

#include <cstddef>
#include <vector>

#include "amplab/tensor.hpp"

namespace amplab {

/// Encoded mini-batch: padded token grid, true lengths and one-hot labels.
struct Batch {
  std::size_t max_len = 0;
  std::vector<int> token_ids;           // n * max_len, row-major
  std::vector<std::size_t> valid_lens;  // n, each >= 1
  Tensor labels;                        // [n x C] one-hot
  std::vector<int> label_ids;           // n

  std::size_t size() const { return valid_lens.size(); }
  std::size_t num_classes() const { return labels.rank() == 2 ? labels.dim(1) : 0; }
};

}  // namespace amplab
