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
#include "amplab/log.hpp"

#include <iostream>
#include <mutex>

namespace amplab::log {
namespace {

thread_local ScopedWarningCapture* current_capture = nullptr;
std::mutex stderr_mutex;

}  // namespace

ScopedWarningCapture::ScopedWarningCapture() : previous_(current_capture) {
  current_capture = this;
}

ScopedWarningCapture::~ScopedWarningCapture() { current_capture = previous_; }

void warn(std::string_view message) {
  if (current_capture) {
    current_capture->record(message);
    return;
  }
  std::lock_guard lock(stderr_mutex);
  std::cerr << "warning: " << message << '\n';
}

}  // namespace amplab::log
