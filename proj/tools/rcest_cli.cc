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

// rcest: grid baseline, octave-scan pipeline and batch convergence study.
//
// Exit codes: 0 success, 1 usage or internal error, 2 configuration error,
// 3 estimation rejected, 4 backend failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rcest/config.h"
#include "rcest/errors.h"
#include "rcest/pipeline.h"

namespace {

enum ExitCode {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kRejected = 3,
    kBackendFailure = 4,
};

struct Args {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    int runs = 0;
    bool deterministic = false;
};

void add_common(CLI::App* cmd, Args& args) {
    cmd->add_option("--config", args.config, "Run configuration (JSON)")->required();
    cmd->add_option("--seed", args.seed, "Master seed, overrides the config");
    cmd->add_option("--out", args.out, "Output directory, overrides RCEST_OUT_DIR and the config");
    cmd->add_flag("--deterministic", args.deterministic, "Omit wall-clock timings from reports");
}

rcest::CommandOptions to_options(const CLI::App& cmd, const Args& args) {
    rcest::CommandOptions opt;
    if (cmd.count("--seed")) opt.seed = args.seed;
    if (cmd.count("--out")) opt.out_dir = args.out;
    if (cmd.get_option_no_throw("--runs") != nullptr && cmd.count("--runs")) opt.runs = args.runs;
    opt.deterministic = args.deterministic;
    return opt;
}

void summarize(const std::string& name, const rcest::Json& report) {
    std::cout << name << ": wrote " << report["files"].size() << " files";
    if (report.contains("peaks")) std::cout << ", " << report["peaks"].size() << " peaks";
    if (report.contains("success_fraction")) {
        std::cout << ", success fraction " << report["success_fraction"].get<double>();
    }
    std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonant-coupling detection and estimation"};
    app.require_subcommand(1);

    Args args;
    auto* grid = app.add_subcommand("grid", "Linear frequency-time sweep baseline");
    auto* pipeline = app.add_subcommand("pipeline", "Octave scan, detection and estimation");
    auto* batch = app.add_subcommand("batch", "Repeated estimation convergence study");
    add_common(grid, args);
    add_common(pipeline, args);
    add_common(batch, args);
    batch->add_option("--runs", args.runs, "Number of runs, overrides the config")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const rcest::RunConfig config = rcest::load_config(args.config);
        if (grid->parsed()) {
            summarize("grid", rcest::cmd_grid(config, to_options(*grid, args)));
        } else if (pipeline->parsed()) {
            summarize("pipeline", rcest::cmd_pipeline(config, to_options(*pipeline, args)));
        } else {
            summarize("batch", rcest::cmd_batch(config, to_options(*batch, args)));
        }
    } catch (const rcest::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rcest::EstimationRejected& e) {
        std::cerr << "error: " << e.what();
        if (e.iteration() > 0) std::cerr << " (iteration " << e.iteration() << ")";
        std::cerr << '\n';
        return kRejected;
    } catch (const rcest::BackendError& e) {
        std::cerr << "error: backend failure: " << e.what() << '\n';
        return kBackendFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
