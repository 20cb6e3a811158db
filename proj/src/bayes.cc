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

#include "rcest/bayes.h"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "rcest/errors.h"

namespace rcest {

void HeuristicParams::validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw std::invalid_argument("HeuristicParams: t_max must be positive and finite");
    }
    if (m0 < 0) throw std::invalid_argument("HeuristicParams: m0 must be >= 0");
    if (shots < 1) throw std::invalid_argument("HeuristicParams: shots must be >= 1");
    if (!(tanh_scale > 0.0)) throw std::invalid_argument("HeuristicParams: tanh_scale <= 0");
    if (!(c > 0.0)) throw std::invalid_argument("HeuristicParams: c <= 0");
}

Moments moments(const ParticleDistribution& dist) {
    if (dist.empty()) throw std::invalid_argument("moments: empty distribution");
    const double n = static_cast<double>(dist.size());
    double sf = 0.0, sg = 0.0;
    for (const auto& p : dist.particles) {
        sf += p.f_rm;
        sg += p.g;
    }
    Moments m;
    m.mu_f = sf / n;
    m.mu_g = sg / n;
    // Two-pass variance: frequencies carry ~10 significant digits of offset.
    double vf = 0.0, vg = 0.0;
    for (const auto& p : dist.particles) {
        vf += (p.f_rm - m.mu_f) * (p.f_rm - m.mu_f);
        vg += (p.g - m.mu_g) * (p.g - m.mu_g);
    }
    m.sigma_f = std::sqrt(vf / n);
    m.sigma_g = std::sqrt(vg / n);
    return m;
}

double time_base(double sigma_g, const HeuristicParams& params) {
    if (!(sigma_g > 0.0)) return params.t_max;
    return std::tanh(params.tanh_scale / (sigma_g * params.t_max)) * params.t_max;
}

MeasurementSetting propose_setting(const Moments& m, int iteration, const HeuristicParams& params,
                                   double r1, double r2) {
    const double T = time_base(m.sigma_g, params);
    MeasurementSetting s;
    s.shots = params.shots;
    if (iteration <= params.m0) {
        s.f_p = m.mu_f + r1 * m.mu_g;
        s.t = r2 * T;
    } else {
        s.f_p = m.mu_f + params.c * r1 * m.sigma_f;
        s.t = 0.5 * (1.0 + r2) * T;
    }
    return s;
}

MeasurementSetting propose_setting(const Moments& m, int iteration, const HeuristicParams& params,
                                   Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r1 = unit(rng) - 0.5;
    const double r2 = 1.0 - unit(rng);
    return propose_setting(m, iteration, params, r1, r2);
}

double model_probability(double f_p, double t, const Particle& particle, double t1,
                         const Visibility& vis) {
    const double delta = f_p - particle.f_rm;
    const double omega = rabi_frequency(delta, particle.g);
    const double amp = 2.0 * particle.g / omega;
    const double s = std::sin(std::numbers::pi * omega * t);
    return vis.clamp((1.0 - amp * amp * s * s) * decay_envelope(t, t1));
}

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_kernel(std::int64_t n, std::int64_t k, double q) {
    return static_cast<double>(k) * std::log(q) + static_cast<double>(n - k) * std::log1p(-q);
}

void check_record(const MeasurementRecord& record) {
    record.setting.validate();
    if (record.n_e < 0 || record.n_e > record.setting.shots) {
        throw std::invalid_argument("MeasurementRecord: n_e outside [0, shots]");
    }
}

struct Cholesky2 {
    double l11 = 0.0, l21 = 0.0, l22 = 0.0;
    bool zero() const { return l11 == 0.0 && l21 == 0.0 && l22 == 0.0; }
};

Cholesky2 cholesky(double a, double b, double c) {
    Cholesky2 L;
    if (a > 0.0) {
        L.l11 = std::sqrt(a);
        L.l21 = b / L.l11;
        L.l22 = std::sqrt(std::max(c - L.l21 * L.l21, 0.0));
    } else {
        L.l22 = std::sqrt(std::max(c, 0.0));
    }
    return L;
}

}  // namespace

double log_binomial_pmf(std::int64_t n, std::int64_t k, double q) {
    if (n < 0 || k < 0 || k > n) throw std::invalid_argument("log_binomial_pmf: bad counts");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("log_binomial_pmf: q outside (0, 1)");
    return log_choose(n, k) + log_kernel(n, k, q);
}

double log_likelihood(const MeasurementRecord& record, const Particle& particle, double t1,
                      const Visibility& vis) {
    check_record(record);
    const double q = model_probability(record.setting.f_p, record.setting.t, particle, t1, vis);
    return log_binomial_pmf(record.setting.shots, record.n_e, q);
}

double likelihood(const MeasurementRecord& record, const Particle& particle, double t1,
                  const Visibility& vis) {
    return std::exp(log_likelihood(record, particle, t1, vis));
}

ResampleOutcome resample(const ParticleDistribution& dist, std::span<const double> weights,
                         Rng& rng, double shrink) {
    if (dist.empty()) throw std::invalid_argument("resample: empty distribution");
    if (weights.size() != dist.size()) {
        throw std::invalid_argument("resample: weight count differs from particle count");
    }
    if (!(shrink > 0.0 && shrink <= 1.0)) throw std::invalid_argument("resample: shrink in (0, 1]");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("resample: negative or NaN weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("resample: weights must sum to 1");

    const Moments m = moments(dist);
    const double n = static_cast<double>(dist.size());
    double cov_fg = 0.0;
    for (const auto& p : dist.particles) cov_fg += (p.f_rm - m.mu_f) * (p.g - m.mu_g);
    cov_fg /= n;
    const double h2 = 1.0 - shrink * shrink;
    const Cholesky2 L =
        cholesky(h2 * m.sigma_f * m.sigma_f, h2 * cov_fg, h2 * m.sigma_g * m.sigma_g);

    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::normal_distribution<double> normal(0.0, 1.0);

    auto draw = [&]() {
        const Particle& x = dist.particles[pick(rng)];
        const double cf = shrink * x.f_rm + (1.0 - shrink) * m.mu_f;
        const double cg = shrink * x.g + (1.0 - shrink) * m.mu_g;
        if (L.zero()) return Particle{cf, cg};
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        return Particle{cf + L.l11 * z1, cg + L.l21 * z1 + L.l22 * z2};
    };

    ResampleOutcome out;
    out.degenerate = L.zero();
    out.dist.particles.reserve(dist.size());
    constexpr int kMaxRedraws = 10000;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        Particle p = draw();
        for (int r = 0; !(p.g > 0.0) && r < kMaxRedraws; ++r) p = draw();
        if (!(p.g > 0.0)) throw std::runtime_error("resample: cannot draw a particle with g > 0");
        out.dist.particles.push_back(p);
    }
    return out;
}

std::vector<double> normalized_weights(std::span<const double> log_likelihoods) {
    if (log_likelihoods.empty()) throw std::invalid_argument("normalized_weights: empty input");
    const double lmax = *std::max_element(log_likelihoods.begin(), log_likelihoods.end());
    if (!std::isfinite(lmax)) {
        throw EstimationRejected("update rejected, distribution inconsistent with data");
    }
    std::vector<double> w(log_likelihoods.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(log_likelihoods[i] - lmax);
        sum += w[i];
    }
    // The plain-space total would be exp(lmax) * sum; reject exactly when it underflows.
    const double log_total = lmax + std::log(sum);
    if (!std::isfinite(log_total) || log_total < std::log(DBL_MIN)) {
        throw EstimationRejected("update rejected, distribution inconsistent with data");
    }
    for (double& x : w) x /= sum;
    return w;
}

ResampleOutcome bayes_update(const ParticleDistribution& dist, const MeasurementRecord& record,
                             double t1, Rng& rng, double shrink) {
    if (dist.empty()) throw std::invalid_argument("bayes_update: empty distribution");
    check_record(record);
    const auto n = record.setting.shots;
    const auto k = record.n_e;
    const double lc = log_choose(n, k);
    const Visibility vis;
    std::vector<double> ll(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double q =
            model_probability(record.setting.f_p, record.setting.t, dist.particles[i], t1, vis);
        ll[i] = lc + log_kernel(n, k, q);
    }
    const auto w = normalized_weights(ll);
    return resample(dist, w, rng, shrink);
}

EstimationResult run_estimation(ParticleDistribution seed_dist, Backend& backend, double t1,
                                const HeuristicParams& params, const EstimationOptions& options,
                                Rng& rng) {
    params.validate();
    if (options.iterations < 0) throw std::invalid_argument("run_estimation: iterations < 0");
    if (seed_dist.empty()) throw std::invalid_argument("run_estimation: empty seed distribution");

    EstimationResult result;
    result.initial = moments(seed_dist);
    Moments current = result.initial;
    ParticleDistribution dist = std::move(seed_dist);
    result.trace.reserve(static_cast<std::size_t>(options.iterations));

    for (int it = 1; it <= options.iterations; ++it) {
        TraceStep step;
        step.iteration = it;
        step.setting = propose_setting(current, it, params, rng);
        step.record = backend.measure(step.setting);
        try {
            auto updated = bayes_update(dist, step.record, t1, rng, options.shrink);
            dist = std::move(updated.dist);
            step.degenerate = updated.degenerate;
        } catch (const EstimationRejected& e) {
            throw EstimationRejected(e.what(), it);
        }
        current = moments(dist);
        step.moments = current;
        result.trace.push_back(step);
        if (options.early_stop.enabled && current.sigma_f < options.early_stop.sigma_f &&
            current.sigma_g < options.early_stop.sigma_g) {
            result.stopped_early = it < options.iterations;
            break;
        }
    }
    result.final = current;
    result.estimate = Estimate{current.mu_f, current.mu_g};
    result.posterior = std::move(dist);
    return result;
}

ParticleDistribution uniform_box(double f_center, double g_center, double f_width,
                                 double g_width, std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("uniform_box: n == 0");
    if (!(f_width >= 0.0 && g_width >= 0.0)) throw std::invalid_argument("uniform_box: widths");
    if (!(g_center + 0.5 * g_width > 0.0)) {
        throw std::invalid_argument("uniform_box: coupling box lies entirely at g <= 0");
    }
    std::uniform_real_distribution<double> uf(f_center - 0.5 * f_width, f_center + 0.5 * f_width);
    std::uniform_real_distribution<double> ug(g_center - 0.5 * g_width, g_center + 0.5 * g_width);
    ParticleDistribution dist;
    dist.particles.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = uf(rng);
        double g = ug(rng);
        while (!(g > 0.0)) g = ug(rng);
        dist.particles.push_back(Particle{f, g});
    }
    return dist;
}

ParticleDistribution draw_initial(const ResonanceMode& nominal, const InitRecipe& recipe,
                                  std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> df(-0.5 * recipe.f_window, 0.5 * recipe.f_window);
    std::uniform_real_distribution<double> dg(-0.5 * recipe.g_window, 0.5 * recipe.g_window);
    const double fc = nominal.f_rm + df(rng);
    const double gc = nominal.g + dg(rng);
    return uniform_box(fc, gc, recipe.f_width, recipe.g_width, n, rng);
}

bool SuccessCriterion::operator()(const Estimate& e, const ResonanceMode& truth) const {
    return std::abs(e.mu_f - truth.f_rm) <= f_tol && std::abs(e.mu_g - truth.g) <= g_tol;
}

RunSeeds derive_run_seeds(std::uint64_t master, int run_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master & 0xffffffffu),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(run_index)};
    std::uint32_t words[4];
    seq.generate(std::begin(words), std::end(words));
    return RunSeeds{(std::uint64_t{words[0]} << 32) | words[1],
                    (std::uint64_t{words[2]} << 32) | words[3]};
}

int coupling_multiple(double g_hat, double g_true, double tol) {
    if (!(g_true > 0.0)) return 0;
    const double k = std::round(g_hat / g_true);
    if (k < 2.0) return 0;
    return std::abs(g_hat - k * g_true) <= tol ? static_cast<int>(k) : 0;
}

Histogram make_histogram(std::span<const double> values, int bins) {
    if (bins < 1) throw std::invalid_argument("make_histogram: bins < 1");
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    if (values.empty()) return h;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo;
    h.hi = *hi;
    const double width = h.hi - h.lo;
    for (double v : values) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = static_cast<std::size_t>((v - h.lo) / width * bins);
            b = std::min(b, static_cast<std::size_t>(bins - 1));
        }
        ++h.counts[b];
    }
    return h;
}

BatchStats batch_evaluate(const ResonanceMode& truth, const BatchConfig& config,
                          const BackendFactory& factory) {
    truth.validate();
    config.params.validate();
    if (config.n_runs < 1) throw std::invalid_argument("batch_evaluate: n_runs < 1");
    if (config.n_particles < 1) throw std::invalid_argument("batch_evaluate: n_particles < 1");
    if (!factory) throw std::invalid_argument("batch_evaluate: no backend factory");

    BatchStats stats;
    stats.truth = truth;
    stats.n_runs = config.n_runs;
    stats.runs.resize(static_cast<std::size_t>(config.n_runs));

    auto run_one = [&](int i) {
        const RunSeeds seeds = derive_run_seeds(config.seed, i);
        Rng rng(seeds.estimator);
        BatchRun run;
        run.index = i;
        auto backend = factory(seeds.backend);
        auto seed_dist = draw_initial(truth, config.recipe, config.n_particles, rng);
        try {
            auto result =
                run_estimation(std::move(seed_dist), *backend, config.t1, config.params,
                               config.options, rng);
            run.estimate = result.estimate;
            run.final = result.final;
            run.converged = config.success(result.estimate, truth);
            run.g_multiple = coupling_multiple(result.estimate.mu_g, truth.g, config.success.g_tol);
            if (config.keep_traces) run.trace = std::move(result.trace);
        } catch (const EstimationRejected&) {
            run.rejected = true;
        }
        stats.runs[static_cast<std::size_t>(i)] = std::move(run);
    };

    const int threads = std::clamp(config.threads, 1, config.n_runs);
    if (threads == 1) {
        for (int i = 0; i < config.n_runs; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < config.n_runs; i = next++) {
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<double> f_hat, g_hat;
    for (const auto& run : stats.runs) {
        if (run.converged) ++stats.successes;
        if (run.rejected) {
            ++stats.rejected;
            continue;
        }
        if (run.g_multiple >= 2) ++stats.g_multiple_outliers;
        f_hat.push_back(run.estimate.mu_f);
        g_hat.push_back(run.estimate.mu_g);
    }
    stats.success_fraction = static_cast<double>(stats.successes) / stats.n_runs;
    stats.f_hist = make_histogram(f_hat, config.histogram_bins);
    stats.g_hist = make_histogram(g_hat, config.histogram_bins);
    return stats;
}

}  // namespace rcest
