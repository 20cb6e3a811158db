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

#include "rcest/backend.h"

#include <cmath>
#include <stdexcept>

namespace rcest {

void MeasurementSetting::validate() const {
    if (!std::isfinite(f_p)) throw std::invalid_argument("MeasurementSetting: non-finite f_p");
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("MeasurementSetting: hold time must be finite and >= 0");
    }
    if (shots < 1) throw std::invalid_argument("MeasurementSetting: shots must be >= 1");
}

MeasurementRecord simulated_measure(const MeasurementSetting& setting, const Environment& env,
                                    Rng& rng) {
    setting.validate();
    const double p = observed_probability(setting.f_p, setting.t, env);
    std::binomial_distribution<std::int64_t> draw(setting.shots, p);
    return MeasurementRecord{setting, draw(rng)};
}

SimulatedBackend::SimulatedBackend(Environment env, std::uint64_t seed)
    : env_(std::move(env)), rng_(seed) {
    env_.validate();
}

MeasurementRecord SimulatedBackend::measure(const MeasurementSetting& setting) {
    ++measurements_;
    if (!jitter_) return simulated_measure(setting, env_, rng_);
    // The record reports the requested setting; only the physics sees the jitter.
    auto actual = jitter_(setting, rng_);
    auto record = simulated_measure(actual, env_, rng_);
    record.setting = setting;
    return record;
}

std::size_t axis_count(double span, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("axis step must be positive");
    if (span < 0.0) throw std::invalid_argument("axis range is empty");
    if (span == 0.0) return 1;
    const double ratio = span / step;
    const auto n = static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
    return n == 0 ? 1 : n;
}

std::vector<double> frequency_axis(const AxisRange& range) {
    const double span = range.hi - range.lo;
    const std::size_t n = axis_count(span, range.step);
    if (span == 0.0) return {range.lo};
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) {
        axis[i] = range.lo + (static_cast<double>(i) + 0.5) * range.step;
    }
    return axis;
}

std::vector<double> time_axis(const AxisRange& range) {
    const std::size_t n = axis_count(range.hi - range.lo, range.step);
    std::vector<double> axis(n);
    for (std::size_t j = 0; j < n; ++j) axis[j] = range.lo + static_cast<double>(j) * range.step;
    return axis;
}

GridScan grid_scan(const AxisRange& f_range, const AxisRange& t_range, std::int64_t shots,
                   Backend& backend) {
    if (t_range.lo < 0.0) throw std::invalid_argument("grid_scan: negative times");
    GridScan scan;
    scan.frequencies = frequency_axis(f_range);
    scan.times = time_axis(t_range);
    scan.records.reserve(scan.frequencies.size() * scan.times.size());
    for (double t : scan.times) {
        for (double f : scan.frequencies) {
            scan.records.push_back(backend.measure(MeasurementSetting{f, t, shots}));
        }
    }
    return scan;
}

std::int64_t grid_point_count(double span, double df_grid, double t_max, double dt_min) {
    if (!(span > 0.0 && df_grid > 0.0 && t_max > 0.0 && dt_min > 0.0)) {
        throw std::invalid_argument("grid_point_count: arguments must be positive");
    }
    return static_cast<std::int64_t>(axis_count(span, df_grid)) *
           static_cast<std::int64_t>(axis_count(t_max, dt_min));
}

}  // namespace rcest
