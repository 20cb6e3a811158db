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

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "rcest/backend.h"
#include "rcest/bayes.h"
#include "rcest/detect.h"
#include "rcest/octave.h"

namespace rcest {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

void write_grid_csv(std::ostream& out, const GridScan& scan);

Json to_json(const MeasurementRecord& record);
Json to_json(const OctaveScan& scan);
void write_octave_csv(std::ostream& out, const OctaveScan& scan);

Json to_json(const Threshold& threshold);
Json to_json(const Peak& peak);
Json peaks_to_json(std::span<const Peak> peaks);
Json to_json(const SubScan& subscan);
Json subscans_to_json(std::span<const SubScan> subscans);

Json to_json(const Moments& m);
void write_particles_csv(std::ostream& out, const ParticleDistribution& dist);
void write_trace_csv(std::ostream& out, std::span<const TraceStep> trace);

Json to_json(const Histogram& h);
Json to_json(const BatchStats& stats);
void write_batch_runs_csv(std::ostream& out, const BatchStats& stats);

/// Writes the whole text, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Pretty-printed JSON text with a trailing newline.
std::string dump(const Json& j);

}  // namespace rcest
