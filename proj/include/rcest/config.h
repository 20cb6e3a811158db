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

// Run configuration: one JSON document, frequencies in Hz and times in
// seconds. Unknown keys are rejected so that typos surface as errors.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "rcest/backend.h"
#include "rcest/bayes.h"
#include "rcest/detect.h"
#include "rcest/io.h"
#include "rcest/octave.h"
#include "rcest/physics.h"

namespace rcest {

inline constexpr int kSchemaVersion = 1;

struct GridConfig {
    AxisRange f_range;
    AxisRange t_range;
    std::int64_t shots = 786;
};

struct DetectionConfig {
    double buffer = 0.3;
    CouplingPrior prior = CouplingPrior::kOctaveRange;
};

struct EstimationConfig {
    std::size_t n_particles = 40000;
    EstimationOptions options;
};

struct BatchSection {
    int runs = 100;
    ResonanceMode truth;
    InitRecipe recipe;
    SuccessCriterion success;
    int threads = 1;
    int histogram_bins = 40;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 1;
    std::optional<std::string> output_dir;
    Environment environment;
    OctaveConfig octave;
    GridConfig grid;
    HeuristicParams heuristic;
    DetectionConfig detection;
    EstimationConfig estimation;
    std::optional<BatchSection> batch;

    /// Checks every section against its module invariants.
    void validate() const;
};

/// Parses a configuration document. Throws ConfigError; syntax errors
/// report "line L, column C".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// 1-based line and column of a byte offset into text.
struct TextPosition {
    std::size_t line = 1;
    std::size_t column = 1;
};
TextPosition locate(const std::string& text, std::size_t byte_offset);

Json to_json(const ResonanceMode& mode);
Json to_json(const Environment& env);
Environment environment_from_json(const Json& j);

/// Canonical form of the configuration with all defaults filled in.
Json to_json(const RunConfig& config);

}  // namespace rcest
