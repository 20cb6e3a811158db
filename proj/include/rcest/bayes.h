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

// Sequential Monte Carlo estimation of a single (f_rm, g) pair.
//
// The posterior is carried by an equally weighted particle cloud. Each
// iteration picks a measurement setting from the current moments, measures,
// weights the particles by the binomial likelihood and resamples them with
// a Liu-West kernel.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "rcest/backend.h"
#include "rcest/physics.h"

namespace rcest {

struct Particle {
    double f_rm = 0.0;
    double g = 0.0;
};

struct ParticleDistribution {
    std::vector<Particle> particles;

    std::size_t size() const { return particles.size(); }
    bool empty() const { return particles.empty(); }
};

struct Moments {
    double mu_f = 0.0;
    double sigma_f = 0.0;
    double mu_g = 0.0;
    double sigma_g = 0.0;
};

struct HeuristicParams {
    double tanh_scale = std::numbers::pi / 2.0;
    double c = 5.0;
    int m0 = 25;
    double t_max = 1.5e-6;
    std::int64_t shots = 786;

    void validate() const;
};

/// Population mean and standard deviation per coordinate. Throws on an
/// empty distribution.
Moments moments(const ParticleDistribution& dist);

/// Hold-time scale tanh(a / (sigma_g t_max)) t_max; t_max when sigma_g = 0.
double time_base(double sigma_g, const HeuristicParams& params);

/// Setting for iteration M (1-based) given explicit draws r1 in [-1/2, 1/2]
/// and r2 in (0, 1].
MeasurementSetting propose_setting(const Moments& m, int iteration, const HeuristicParams& params,
                                   double r1, double r2);

/// Draws r1 ~ U(-1/2, 1/2) and r2 ~ U(0, 1] from rng.
MeasurementSetting propose_setting(const Moments& m, int iteration, const HeuristicParams& params,
                                   Rng& rng);

/// Model excitation probability seen by a particle: the single-mode chevron
/// with relaxation, clamped to the visibility window.
double model_probability(double f_p, double t, const Particle& particle, double t1,
                         const Visibility& vis = {});

/// log C(n, k) + k log q + (n - k) log(1 - q).
double log_binomial_pmf(std::int64_t n, std::int64_t k, double q);

double log_likelihood(const MeasurementRecord& record, const Particle& particle, double t1,
                      const Visibility& vis = {});
double likelihood(const MeasurementRecord& record, const Particle& particle, double t1,
                  const Visibility& vis = {});

struct ResampleOutcome {
    ParticleDistribution dist;
    /// True when the particle covariance vanished and the kernel collapsed
    /// onto the shrunk centers.
    bool degenerate = false;
};

/// Liu-West resampling with the unweighted mean and covariance of the
/// input cloud. Output particles with g <= 0 are redrawn.
ResampleOutcome resample(const ParticleDistribution& dist, std::span<const double> weights,
                         Rng& rng, double shrink = 0.98);

/// Normalized weights from per-particle log likelihoods (max-shifted).
/// Throws EstimationRejected when the total likelihood is not representable.
std::vector<double> normalized_weights(std::span<const double> log_likelihoods);

ResampleOutcome bayes_update(const ParticleDistribution& dist, const MeasurementRecord& record,
                             double t1, Rng& rng, double shrink = 0.98);

struct EarlyStop {
    bool enabled = false;
    double sigma_f = 100e3;
    double sigma_g = 50e3;
};

struct TraceStep {
    int iteration = 0;  // 1-based
    MeasurementSetting setting;
    MeasurementRecord record;
    Moments moments;  // after the update
    bool degenerate = false;
};

struct Estimate {
    double mu_f = 0.0;
    double mu_g = 0.0;
};

struct EstimationResult {
    Estimate estimate;
    Moments initial;
    Moments final;
    std::vector<TraceStep> trace;
    ParticleDistribution posterior;
    bool stopped_early = false;
};

struct EstimationOptions {
    int iterations = 35;
    double shrink = 0.98;
    EarlyStop early_stop;
};

/// Runs the propose / measure / update loop. A rejected update is rethrown
/// as EstimationRejected carrying the 1-based iteration.
EstimationResult run_estimation(ParticleDistribution seed_dist, Backend& backend, double t1,
                                const HeuristicParams& params, const EstimationOptions& options,
                                Rng& rng);

/// Initial-distribution recipe of the batch study: each run centers a
/// uniform box of size f_width x g_width at a point drawn uniformly from a
/// f_window x g_window box around the nominal values.
struct InitRecipe {
    double f_window = 10e6;
    double g_window = 1.5e6;
    double f_width = 15e6;
    double g_width = 2.5e6;
};

/// Uniform box seeding. Particles with g <= 0 are redrawn.
ParticleDistribution uniform_box(double f_center, double g_center, double f_width,
                                 double g_width, std::size_t n, Rng& rng);

ParticleDistribution draw_initial(const ResonanceMode& nominal, const InitRecipe& recipe,
                                  std::size_t n, Rng& rng);

struct SuccessCriterion {
    double f_tol = 1e6;
    double g_tol = 0.3e6;

    bool operator()(const Estimate& e, const ResonanceMode& truth) const;
};

using BackendFactory = std::function<std::unique_ptr<Backend>(std::uint64_t seed)>;

struct BatchConfig {
    int n_runs = 100;
    std::size_t n_particles = 40000;
    double t1 = 15e-6;
    InitRecipe recipe;
    HeuristicParams params;
    EstimationOptions options;
    SuccessCriterion success;
    std::uint64_t seed = 1;
    int threads = 1;
    int histogram_bins = 40;
    bool keep_traces = false;
};

struct BatchRun {
    int index = 0;
    Estimate estimate;
    Moments final;
    bool converged = false;
    bool rejected = false;
    /// k >= 2 when g_hat sits near k g_true, 0 otherwise.
    int g_multiple = 0;
    std::vector<TraceStep> trace;
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::int64_t> counts;
};

struct BatchStats {
    ResonanceMode truth;
    int n_runs = 0;
    int successes = 0;
    int rejected = 0;
    double success_fraction = 0.0;
    int g_multiple_outliers = 0;
    std::vector<BatchRun> runs;
    Histogram f_hist;
    Histogram g_hist;
};

/// Seeds of run i, derived from the master seed through std::seed_seq.
struct RunSeeds {
    std::uint64_t backend = 0;
    std::uint64_t estimator = 0;
};
RunSeeds derive_run_seeds(std::uint64_t master, int run_index);

/// Integer k >= 2 with |g_hat - k g_true| within tol, 0 otherwise.
int coupling_multiple(double g_hat, double g_true, double tol);

Histogram make_histogram(std::span<const double> values, int bins);

BatchStats batch_evaluate(const ResonanceMode& truth, const BatchConfig& config,
                          const BackendFactory& factory);

}  // namespace rcest
