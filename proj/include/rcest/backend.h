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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "rcest/physics.h"

namespace rcest {

/// The one generator type threaded through every stochastic operation.
using Rng = std::mt19937_64;

/// One swap-spectroscopy measurement: hold the probe at f_p (Hz) for t
/// seconds and repeat `shots` times.
struct MeasurementSetting {
    double f_p = 0.0;
    double t = 0.0;
    std::int64_t shots = 1;

    void validate() const;
};

struct MeasurementRecord {
    MeasurementSetting setting;
    std::int64_t n_e = 0;

    /// Excited-state fraction n_e / shots.
    double p_e() const {
        return static_cast<double>(n_e) / static_cast<double>(setting.shots);
    }
};

struct FrequencyBounds {
    double f_min = 0.0;
    double f_max = 0.0;

    bool contains(double lo, double hi) const { return f_min <= lo && hi <= f_max; }
};

/// Source of measurement records. Calls to measure() are sequential: the
/// online estimator chooses each setting from the previous result.
class Backend {
  public:
    virtual ~Backend() = default;

    virtual MeasurementRecord measure(const MeasurementSetting& setting) = 0;
    virtual FrequencyBounds frequency_bounds() const = 0;

    /// True when the result of a measurement does not depend on the order of
    /// the calls (given independent generator streams).
    virtual bool order_independent() const { return false; }
};

/// Draws n_e ~ Binomial(shots, observed_probability(f_p, t, env)).
MeasurementRecord simulated_measure(const MeasurementSetting& setting, const Environment& env,
                                    Rng& rng);

/// Backend backed by the exact simulator and an owned, seeded generator.
class SimulatedBackend : public Backend {
  public:
    /// Optional perturbation of the requested setting before it is simulated.
    /// Disabled by default: frequencies and times are taken as exact.
    using SettingJitter = std::function<MeasurementSetting(const MeasurementSetting&, Rng&)>;

    SimulatedBackend(Environment env, std::uint64_t seed);

    MeasurementRecord measure(const MeasurementSetting& setting) override;
    FrequencyBounds frequency_bounds() const override { return {env_.f_min, env_.f_max}; }
    bool order_independent() const override { return true; }

    void set_jitter(SettingJitter jitter) { jitter_ = std::move(jitter); }
    const Environment& environment() const { return env_; }
    std::int64_t measurements() const { return measurements_; }

  private:
    Environment env_;
    Rng rng_;
    SettingJitter jitter_;
    std::int64_t measurements_ = 0;
};

/// Closed range [lo, hi] sampled with a uniform step.
struct AxisRange {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;
};

/// Number of cells floor((hi - lo) / step), guarded against round-off so
/// that e.g. 250 ns / 2.5 ns counts 100. A degenerate range (hi == lo)
/// counts one point.
std::size_t axis_count(double span, double step);

/// Frequency axis: cell centers lo + (i + 1/2) step, or {lo} for a
/// degenerate range.
std::vector<double> frequency_axis(const AxisRange& range);

/// Time axis: lo + j step, starting at the range start.
std::vector<double> time_axis(const AxisRange& range);

/// Traditional linear sweep. Records are stored row-major over (t, f): the
/// frequency index varies fastest.
struct GridScan {
    std::vector<double> frequencies;
    std::vector<double> times;
    std::vector<MeasurementRecord> records;

    const MeasurementRecord& at(std::size_t time_index, std::size_t freq_index) const {
        return records[time_index * frequencies.size() + freq_index];
    }
};

GridScan grid_scan(const AxisRange& f_range, const AxisRange& t_range, std::int64_t shots,
                   Backend& backend);

/// (span / df_grid) * (t_max / dt_min), each factor floored.
std::int64_t grid_point_count(double span, double df_grid, double t_max, double dt_min);

}  // namespace rcest
