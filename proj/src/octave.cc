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

#include "rcest/octave.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rcest/errors.h"

namespace rcest {

void OctaveConfig::validate() const {
    if (!(f_max > f_min)) throw std::invalid_argument("OctaveConfig: f_max must exceed f_min");
    if (final_octave < 0 || final_octave > 30) {
        throw std::invalid_argument("OctaveConfig: final_octave must be in [0, 30]");
    }
    if (samples_per_bin < 1) throw std::invalid_argument("OctaveConfig: samples_per_bin < 1");
    if (shots < 1) throw std::invalid_argument("OctaveConfig: shots < 1");
}

double Bin::mean_excitation() const {
    if (records.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : records) sum += r.p_e();
    return sum / static_cast<double>(records.size());
}

std::span<const Bin> OctaveScan::octave(int o) const {
    if (o < 0 || o > config.final_octave) throw std::out_of_range("octave out of range");
    const auto first = static_cast<std::size_t>((std::int64_t{1} << o) - 1);
    const auto count = static_cast<std::size_t>(std::int64_t{1} << o);
    return std::span<const Bin>(bins).subspan(first, count);
}

std::int64_t OctaveScan::total_records() const {
    return std::accumulate(bins.begin(), bins.end(), std::int64_t{0},
                           [](std::int64_t acc, const Bin& b) {
                               return acc + static_cast<std::int64_t>(b.records.size());
                           });
}

double octave_coupling(double span, int o) { return std::ldexp(span, -(o + 1)); }

std::int64_t octave_bin_count(int final_octave) {
    return (std::int64_t{1} << (final_octave + 1)) - 1;
}

std::vector<Bin> octave_geometry(const OctaveConfig& config, int o) {
    config.validate();
    if (o < 0 || o > config.final_octave) {
        throw std::invalid_argument("octave_geometry: octave " + std::to_string(o) +
                                    " outside [0, " + std::to_string(config.final_octave) + "]");
    }
    const double span = config.span();
    const double g_o = octave_coupling(span, o);
    const double width = 2.0 * g_o;
    const std::int64_t count = std::int64_t{1} << o;

    auto edge = [&](std::int64_t i) {
        return i == count ? config.f_max : config.f_min + static_cast<double>(i) * width;
    };

    std::vector<Bin> bins(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        Bin& b = bins[static_cast<std::size_t>(i)];
        b.octave = o;
        b.k = i + 1;
        b.g_o = g_o;
        b.f_lo = edge(i);
        b.f_hi = edge(i + 1);
        b.t_lo = 1.0 / (4.0 * g_o);
        b.t_hi = 1.0 / (2.0 * g_o);
    }
    return bins;
}

std::vector<MeasurementSetting> sample_settings(const Bin& bin, int n_s, std::int64_t shots,
                                                Rng& rng, BinSampling sampling) {
    if (n_s < 1) throw std::invalid_argument("sample_settings: n_s < 1");
    std::vector<MeasurementSetting> out;
    out.reserve(static_cast<std::size_t>(n_s));

    const double u_lo = 2.0 * bin.g_o;
    const double u_hi = 4.0 * bin.g_o;
    auto hold_time = [&](double u) { return std::clamp(1.0 / u, bin.t_lo, bin.t_hi); };

    if (sampling == BinSampling::kRandom) {
        std::uniform_real_distribution<double> freq(bin.f_lo, bin.f_hi);
        std::uniform_real_distribution<double> rate(u_lo, u_hi);
        for (int i = 0; i < n_s; ++i) {
            const double f = std::clamp(freq(rng), bin.f_lo, bin.f_hi);
            out.push_back(MeasurementSetting{f, hold_time(rate(rng)), shots});
        }
        return out;
    }

    // Frequency rises while inverse time falls, so the points also spread in t.
    for (int i = 0; i < n_s; ++i) {
        const double frac = (static_cast<double>(i) + 0.5) / static_cast<double>(n_s);
        const double f = bin.f_lo + frac * bin.width();
        const double u = u_hi - frac * (u_hi - u_lo);
        out.push_back(MeasurementSetting{f, hold_time(u), shots});
    }
    return out;
}

OctaveScan run_octave_scan(const OctaveConfig& config, Backend& backend) {
    config.validate();
    if (!backend.frequency_bounds().contains(config.f_min, config.f_max)) {
        throw BackendError("run_octave_scan: backend cannot reach the requested frequency range");
    }
    Rng rng(config.seed);
    OctaveScan scan;
    scan.config = config;
    scan.bins.reserve(static_cast<std::size_t>(octave_bin_count(config.final_octave)));
    for (int o = 0; o <= config.final_octave; ++o) {
        for (Bin& bin : octave_geometry(config, o)) {
            for (const auto& setting :
                 sample_settings(bin, config.samples_per_bin, config.shots, rng, config.sampling)) {
                bin.records.push_back(backend.measure(setting));
            }
            bin.p_bar = bin.mean_excitation();
            scan.bins.push_back(std::move(bin));
        }
    }
    return scan;
}

std::int64_t octave_point_count(double span, double df_final, int n_s) {
    if (!(span > 0.0 && df_final > 0.0) || n_s < 1) {
        throw std::invalid_argument("octave_point_count: arguments must be positive");
    }
    const double ratio = span / df_final;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw std::invalid_argument("octave_point_count: span / df_final is not an integer");
    }
    const auto bins_final = static_cast<std::int64_t>(rounded);
    if ((bins_final & (bins_final - 1)) != 0) {
        throw std::invalid_argument("octave_point_count: span / df_final is not a power of two");
    }
    return static_cast<std::int64_t>(n_s) * (2 * bins_final - 1);
}

}  // namespace rcest
