// Copyright 2026 The rcest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rcest {

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A measurement backend could not deliver a record.
class BackendError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The particle cloud assigns zero total likelihood to a measurement.
class EstimationRejected : public std::runtime_error {
  public:
    explicit EstimationRejected(const std::string& what, int iteration = -1)
        : std::runtime_error(what), iteration_(iteration) {}

    /// 1-based iteration of run_estimation, or -1 outside a run.
    int iteration() const noexcept { return iteration_; }

  private:
    int iteration_;
};

}  // namespace rcest
