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

// Octave sampling: a dyadic partition of the frequency-time plane in which
// octave o splits [f_min, f_max] into 2^o bins of width 2 g_o = span / 2^o,
// each covering hold times [1/(4 g_o), 1/(2 g_o)]. Octave o is tuned to
// couplings g_o / 2 <= g <= g_o.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcest/backend.h"

namespace rcest {

enum class BinSampling {
    kRandom,   // independent uniform draws in frequency and inverse time
    kRegular,  // stratified: cell midpoints along the bin diagonal
};

struct OctaveConfig {
    double f_min = 0.0;
    double f_max = 0.0;
    int final_octave = 8;
    int samples_per_bin = 5;
    std::int64_t shots = 786;
    std::uint64_t seed = 1;
    BinSampling sampling = BinSampling::kRandom;

    double span() const { return f_max - f_min; }
    void validate() const;
};

struct Bin {
    int octave = 0;
    std::int64_t k = 1;  // 1-based index within the octave
    double g_o = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::vector<MeasurementRecord> records;
    double p_bar = 0.0;

    double width() const { return f_hi - f_lo; }
    double center() const { return 0.5 * (f_lo + f_hi); }
    /// Mean of p_e over the records (0 for an empty bin).
    double mean_excitation() const;
};

struct OctaveScan {
    OctaveConfig config;
    std::vector<Bin> bins;  // ordered by (octave, k)

    /// Bins of one octave, a contiguous slice of `bins`.
    std::span<const Bin> octave(int o) const;
    std::int64_t total_records() const;
};

/// Coupling scale of octave o: span / 2^(o + 1).
double octave_coupling(double span, int o);

/// Bins of octave o, without records. Adjacent bins share their boundary
/// value exactly and the last bin ends at f_max.
std::vector<Bin> octave_geometry(const OctaveConfig& config, int o);

/// n_s settings inside the bin's frequency-time rectangle. Random sampling
/// draws f_p ~ U(f_lo, f_hi) and t = 1/u with u ~ U(2 g_o, 4 g_o).
std::vector<MeasurementSetting> sample_settings(const Bin& bin, int n_s, std::int64_t shots,
                                                Rng& rng,
                                                BinSampling sampling = BinSampling::kRandom);

/// Executes octaves 0..final_octave in increasing order. Throws if the
/// backend cannot reach [f_min, f_max]; a failing backend aborts the scan.
OctaveScan run_octave_scan(const OctaveConfig& config, Backend& backend);

/// n_s (2 span / df_final - 1). Throws unless span / df_final is a power of two.
std::int64_t octave_point_count(double span, double df_final, int n_s);

/// Number of bins over octaves 0..final_octave, 2^(final_octave + 1) - 1.
std::int64_t octave_bin_count(int final_octave);

}  // namespace rcest
