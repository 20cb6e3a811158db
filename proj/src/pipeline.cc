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

#include "rcest/pipeline.h"

#include <chrono>
#include <cstdlib>
#include <sstream>

#include "rcest/errors.h"

namespace rcest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t effective_seed(const RunConfig& config, const CommandOptions& options) {
    return options.seed.value_or(config.seed);
}

// Collects output files and writes them relative to one directory.
class OutputDir {
  public:
    explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

    void write(const std::string& name, const std::string& text) {
        write_text_file(root_ / name, text);
        files_.push_back(name);
    }

    template <typename F>
    void write_csv(const std::string& name, F&& fill) {
        std::ostringstream ss;
        fill(ss);
        write(name, ss.str());
    }

    const std::vector<std::string>& files() const { return files_; }
    const std::filesystem::path& root() const { return root_; }

  private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

}  // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config, const CommandOptions& options) {
    if (options.out_dir) return *options.out_dir;
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
    if (config.output_dir) return *config.output_dir;
    return "out";
}

PipelineResult run_pipeline(const RunConfig& config, std::uint64_t seed) {
    config.validate();
    const RunSeeds base = derive_run_seeds(seed, 0);
    SimulatedBackend backend(config.environment, base.backend);

    PipelineResult out;
    OctaveConfig oc = config.octave;
    oc.seed = base.estimator;

    auto start = Clock::now();
    out.scan = run_octave_scan(oc, backend);
    out.scan_seconds = seconds_since(start);
    out.octave_measurements = backend.measurements();

    out.threshold = compute_threshold(out.scan, config.detection.buffer);
    out.peaks = extract_peaks(out.scan, out.threshold);
    out.subscans = split_spectrum(out.scan, out.peaks);
    out.grid_equivalent =
        grid_point_count(oc.span(), config.grid.f_range.step,
                         config.grid.t_range.hi - config.grid.t_range.lo, config.grid.t_range.step);

    start = Clock::now();
    const SeedOptions seeding{config.estimation.n_particles, config.detection.prior};
    for (std::size_t i = 0; i < out.subscans.size(); ++i) {
        const SubScan& sub = out.subscans[i];
        Rng rng(derive_run_seeds(seed, static_cast<int>(i) + 1).estimator);
        PeakEstimate pe;
        pe.peak = sub.peak;
        pe.subscan_lo = sub.f_lo;
        pe.subscan_hi = sub.f_hi;
        pe.seed = seed_particles(sub, out.threshold, seeding, rng);
        try {
            pe.result = run_estimation(pe.seed, backend, config.environment.t1, config.heuristic,
                                       config.estimation.options, rng);
        } catch (const EstimationRejected& e) {
            pe.rejected_at = e.iteration();
            pe.result.initial = moments(pe.seed);
            pe.result.final = pe.result.initial;
            pe.result.estimate = {pe.result.initial.mu_f, pe.result.initial.mu_g};
        }
        out.estimates.push_back(std::move(pe));
    }
    out.estimation_seconds = seconds_since(start);
    out.online_measurements = backend.measurements() - out.octave_measurements;
    return out;
}

Json cmd_grid(const RunConfig& config, const CommandOptions& options) {
    const std::uint64_t seed = effective_seed(config, options);
    OutputDir dir(resolve_output_dir(config, options));
    SimulatedBackend backend(config.environment, derive_run_seeds(seed, 0).backend);

    const auto start = Clock::now();
    const GridScan scan =
        grid_scan(config.grid.f_range, config.grid.t_range, config.grid.shots, backend);
    const double elapsed = seconds_since(start);

    dir.write_csv("grid.csv", [&](std::ostream& os) { write_grid_csv(os, scan); });

    Json report;
    report["command"] = "grid";
    report["seed"] = seed;
    report["config"] = to_json(config);
    report["frequencies"] = scan.frequencies.size();
    report["times"] = scan.times.size();
    report["measurements"] = scan.records.size();
    if (!options.deterministic) report["timings_s"] = Json{{"grid", elapsed}};
    auto files = dir.files();
    files.push_back("grid_report.json");
    report["files"] = files;
    dir.write("grid_report.json", dump(report));
    return report;
}

Json cmd_pipeline(const RunConfig& config, const CommandOptions& options) {
    const std::uint64_t seed = effective_seed(config, options);
    OutputDir dir(resolve_output_dir(config, options));
    const PipelineResult r = run_pipeline(config, seed);

    dir.write("octave_scan.json", dump(to_json(r.scan)));
    dir.write_csv("octave_bins.csv", [&](std::ostream& os) { write_octave_csv(os, r.scan); });
    dir.write("peaks.json", dump(peaks_to_json(r.peaks)));
    dir.write("subscans.json", dump(subscans_to_json(r.subscans)));

    Json estimates = Json::array();
    int rejected = 0;
    for (std::size_t i = 0; i < r.estimates.size(); ++i) {
        const PeakEstimate& pe = r.estimates[i];
        const std::string tag = std::to_string(i + 1);
        const std::string seed_csv = "particles_seed_" + tag + ".csv";
        dir.write_csv(seed_csv, [&](std::ostream& os) { write_particles_csv(os, pe.seed); });
        Json entry{{"peak", to_json(pe.peak)},
                   {"subscan", Json{{"f_lo_hz", pe.subscan_lo}, {"f_hi_hz", pe.subscan_hi}}},
                   {"initial", to_json(pe.result.initial)}};
        if (pe.rejected_at) {
            ++rejected;
            entry["status"] = "rejected";
            entry["rejected_at_iteration"] = *pe.rejected_at;
            entry["files"] = Json{{"seed_particles", seed_csv}};
            estimates.push_back(std::move(entry));
            continue;
        }
        const std::string final_csv = "particles_final_" + tag + ".csv";
        const std::string trace_csv = "trace_" + tag + ".csv";
        dir.write_csv(final_csv,
                      [&](std::ostream& os) { write_particles_csv(os, pe.result.posterior); });
        dir.write_csv(trace_csv, [&](std::ostream& os) { write_trace_csv(os, pe.result.trace); });
        entry["status"] = "ok";
        entry["final"] = to_json(pe.result.final);
        entry["estimate"] =
            Json{{"f_rm_hz", pe.result.estimate.mu_f}, {"g_hz", pe.result.estimate.mu_g}};
        entry["iterations"] = pe.result.trace.size();
        entry["stopped_early"] = pe.result.stopped_early;
        entry["files"] = Json{{"seed_particles", seed_csv},
                              {"final_particles", final_csv},
                              {"trace", trace_csv}};
        estimates.push_back(std::move(entry));
    }

    Json report;
    report["command"] = "pipeline";
    report["seed"] = seed;
    report["config"] = to_json(config);
    report["threshold"] = to_json(r.threshold);
    report["peaks"] = peaks_to_json(r.peaks);
    report["estimates"] = std::move(estimates);
    report["rejected_estimates"] = rejected;
    const double ratio = static_cast<double>(r.grid_equivalent) /
                         static_cast<double>(r.octave_measurements);
    report["measurements"] = Json{{"octave", r.octave_measurements},
                                  {"online", r.online_measurements},
                                  {"total", r.octave_measurements + r.online_measurements},
                                  {"grid_equivalent", r.grid_equivalent},
                                  {"reduction_ratio", ratio}};
    if (!options.deterministic) {
        report["timings_s"] = Json{{"octave_scan", r.scan_seconds},
                                   {"estimation", r.estimation_seconds}};
    }
    auto files = dir.files();
    files.push_back("report.json");
    report["files"] = files;
    dir.write("report.json", dump(report));
    if (rejected > 0) {
        throw EstimationRejected(std::to_string(rejected) + " of " +
                                 std::to_string(r.estimates.size()) +
                                 " peak estimates rejected, see report.json");
    }
    return report;
}

Json cmd_batch(const RunConfig& config, const CommandOptions& options) {
    if (!config.batch) throw ConfigError("config: 'batch' section required for the batch command");
    const BatchSection& b = *config.batch;
    const std::uint64_t seed = effective_seed(config, options);
    OutputDir dir(resolve_output_dir(config, options));

    BatchConfig bc;
    bc.n_runs = options.runs.value_or(b.runs);
    if (bc.n_runs < 1) throw ConfigError("config: --runs must be >= 1");
    bc.n_particles = config.estimation.n_particles;
    bc.t1 = config.environment.t1;
    bc.recipe = b.recipe;
    bc.params = config.heuristic;
    bc.options = config.estimation.options;
    bc.success = b.success;
    bc.seed = seed;
    bc.threads = b.threads;
    bc.histogram_bins = b.histogram_bins;
    bc.keep_traces = true;

    const Environment env = config.environment;
    BackendFactory factory = [env](std::uint64_t s) {
        return std::make_unique<SimulatedBackend>(env, s);
    };

    const auto start = Clock::now();
    const BatchStats stats = batch_evaluate(b.truth, bc, factory);
    const double elapsed = seconds_since(start);

    dir.write_csv("batch_runs.csv", [&](std::ostream& os) { write_batch_runs_csv(os, stats); });
    for (const auto& run : stats.runs) {
        if (run.trace.empty()) continue;
        dir.write_csv("traces/trace_" + std::to_string(run.index + 1) + ".csv",
                      [&](std::ostream& os) { write_trace_csv(os, run.trace); });
    }

    Json report = to_json(stats);
    report["command"] = "batch";
    report["seed"] = seed;
    report["config"] = to_json(config);
    if (!options.deterministic) report["timings_s"] = Json{{"batch", elapsed}};
    auto files = dir.files();
    files.push_back("batch_stats.json");
    report["files"] = files;
    dir.write("batch_stats.json", dump(report));
    return report;
}

}  // namespace rcest
