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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcest/bayes.h"
#include "rcest/config.h"
#include "rcest/detect.h"
#include "rcest/io.h"
#include "rcest/octave.h"

namespace rcest {

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutDirEnv = "RCEST_OUT_DIR";

struct CommandOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<int> runs;
    bool deterministic = false;
};

/// --out, then RCEST_OUT_DIR, then the config's output_dir, then "out".
std::filesystem::path resolve_output_dir(const RunConfig& config, const CommandOptions& options);

struct PeakEstimate {
    Peak peak;
    double subscan_lo = 0.0;
    double subscan_hi = 0.0;
    ParticleDistribution seed;
    EstimationResult result;
    /// Set when the estimator rejected an update; result then holds only
    /// the seed moments.
    std::optional<int> rejected_at;
};

struct PipelineResult {
    OctaveScan scan;
    Threshold threshold;
    std::vector<Peak> peaks;
    std::vector<SubScan> subscans;
    std::vector<PeakEstimate> estimates;
    std::int64_t octave_measurements = 0;
    std::int64_t online_measurements = 0;
    std::int64_t grid_equivalent = 0;
    double scan_seconds = 0.0;
    double estimation_seconds = 0.0;
};

/// Octave scan, detection and one estimation per peak against a simulated
/// backend built from config.environment. No files are written.
PipelineResult run_pipeline(const RunConfig& config, std::uint64_t seed);

/// cmd_pipeline writes every file even when some peak estimates were
/// rejected, then throws EstimationRejected.
///
/// Each command writes its files below the output directory and returns
/// the report that was also written as JSON. The report lists every file
/// relative to the output directory.
Json cmd_grid(const RunConfig& config, const CommandOptions& options);
Json cmd_pipeline(const RunConfig& config, const CommandOptions& options);
Json cmd_batch(const RunConfig& config, const CommandOptions& options);

}  // namespace rcest
