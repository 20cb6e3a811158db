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
#include <span>
#include <vector>

#include "rcest/backend.h"
#include "rcest/bayes.h"
#include "rcest/octave.h"

namespace rcest {

struct Threshold {
    double p_t = 0.0;
    double max_pbar = 0.0;
    double buffer = 0.3;

    bool below(double p_bar) const { return p_bar < p_t; }
};

/// p_t = max_pbar - buffer, rounded to 12 decimals so that values written
/// with few digits (0.976 - 0.3) give the decimal result (0.676).
Threshold make_threshold(double max_pbar, double buffer = 0.3);

/// Threshold from the largest bin mean of the scan.
Threshold compute_threshold(const OctaveScan& scan, double buffer = 0.3);

struct Peak {
    int octave = 0;
    std::int64_t k = 1;
    double f_lo = 0.0;
    double f_hi = 0.0;
    double g_o = 0.0;
    double p_bar = 0.0;

    double center() const { return 0.5 * (f_lo + f_hi); }
    double width() const { return f_hi - f_lo; }
    double g_lo() const { return 0.5 * g_o; }
    double g_hi() const { return g_o; }
};

Peak make_peak(const Bin& bin);

/// Peaks from the deepest octave to the zeroth. Within an octave a run of
/// consecutive below-threshold bins yields its lowest-p_bar bin (lowest
/// frequency on ties); a candidate replaces every recorded peak whose
/// interval it overlaps. Sorted by frequency; empty if nothing is below
/// threshold.
std::vector<Peak> extract_peaks(const OctaveScan& scan, const Threshold& threshold);

/// A bin, or the part of one that falls inside a sub-scan.
struct SlicedBin {
    int octave = 0;
    std::int64_t k = 1;
    double g_o = 0.0;
    double f_lo = 0.0;       // slice bounds
    double f_hi = 0.0;
    double full_width = 0.0; // width of the unsliced bin
    double proportion = 1.0;
    double p_bar = 0.0;
    bool is_peak = false;
};

struct SubScan {
    double f_lo = 0.0;
    double f_hi = 0.0;
    std::vector<SlicedBin> bins;  // ordered by (octave, k)
    Peak peak;
};

/// One sub-scan per peak, cut at the midpoints between adjacent peak
/// centers. Sub-scan i holds peak i. Throws unless peaks are sorted.
std::vector<SubScan> split_spectrum(const OctaveScan& scan, std::span<const Peak> peaks);

/// Proportions of a bin [lo, hi] cut at the given ascending points. They
/// sum to exactly 1 when accumulated in order.
std::vector<double> slice_proportions(double lo, double hi, std::span<const double> cuts);

enum class CouplingPrior {
    kOctaveRange,  // g ~ U(g_o / 2, g_o)
    kBinWidth,     // g ~ U(w, 2 w), w the full bin width
};

struct SeedOptions {
    std::size_t n_particles = 40000;
    CouplingPrior prior = CouplingPrior::kOctaveRange;
};

/// Per-bin selection weights (max_pbar - p_bar) * proportion over the
/// below-threshold bins, normalized to 1. Other bins get weight 0.
std::vector<double> seed_weights(const SubScan& subscan, const Threshold& threshold);

ParticleDistribution seed_particles(const SubScan& subscan, const Threshold& threshold,
                                    const SeedOptions& options, Rng& rng);

}  // namespace rcest
