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

#include "rcest/detect.h"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace rcest {
namespace {

OctaveConfig reference_config(int final_octave = 8) {
    OctaveConfig c;
    c.f_min = 4.146e9;
    c.f_max = 5.170e9;
    c.final_octave = final_octave;
    return c;
}

// Scan with every bin at `level` and no records.
OctaveScan flat_scan(const OctaveConfig& c, double level) {
    OctaveScan scan;
    scan.config = c;
    for (int o = 0; o <= c.final_octave; ++o) {
        for (auto& b : octave_geometry(c, o)) {
            b.p_bar = level;
            scan.bins.push_back(b);
        }
    }
    return scan;
}

Bin& bin_at(OctaveScan& scan, int o, std::int64_t k) {
    return scan.bins[static_cast<std::size_t>((std::int64_t{1} << o) - 1 + (k - 1))];
}

Bin& bin_containing(OctaveScan& scan, int o, double f) {
    for (auto& b : scan.bins) {
        if (b.octave == o && b.f_lo <= f && f < b.f_hi) return b;
    }
    throw std::out_of_range("no bin");
}

TEST(Threshold, ReferenceValueIsExact) {
    auto scan = flat_scan(reference_config(4), 0.9);
    bin_at(scan, 3, 2).p_bar = 0.976;
    const Threshold th = compute_threshold(scan, 0.3);
    EXPECT_EQ(th.max_pbar, 0.976);
    EXPECT_EQ(th.p_t, 0.676);
    EXPECT_EQ(th.buffer, 0.3);
}

TEST(Threshold, SaturatedScan) {
    const auto scan = flat_scan(reference_config(3), 1.0);
    EXPECT_EQ(compute_threshold(scan).p_t, 0.7);
}

TEST(Threshold, RejectsBufferAtOrAboveMaximum) {
    const auto scan = flat_scan(reference_config(3), 0.976);
    EXPECT_THROW(compute_threshold(scan, 1.0), std::invalid_argument);
    EXPECT_THROW(compute_threshold(scan, 0.976), std::invalid_argument);
    EXPECT_THROW(compute_threshold(OctaveScan{}, 0.3), std::invalid_argument);
}

TEST(ExtractPeaks, NothingBelowThreshold) {
    const auto scan = flat_scan(reference_config(), 0.95);
    EXPECT_TRUE(extract_peaks(scan, compute_threshold(scan)).empty());
}

TEST(ExtractPeaks, SingleInjectedResonance) {
    auto scan = flat_scan(reference_config(), 0.95);
    bin_at(scan, 5, 10).p_bar = 0.3;
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].octave, 5);
    EXPECT_EQ(peaks[0].k, 10);
    EXPECT_EQ(peaks[0].p_bar, 0.3);
    EXPECT_DOUBLE_EQ(peaks[0].g_lo(), 0.5 * peaks[0].g_hi());
}

// Reference layout of below-threshold bins: the first
// resonance dips at octaves 6 to 8, the second at 7 and 8, the strong one at
// octaves 3 to 8 around 5.106 GHz.
OctaveScan reference_scan() {
    auto scan = flat_scan(reference_config(), 0.976);
    for (int o : {6, 7, 8}) bin_containing(scan, o, 4.8105e9).p_bar = 0.4 + 0.02 * o;
    for (int o : {7, 8}) bin_containing(scan, o, 4.8300e9).p_bar = 0.5;
    for (int o = 3; o <= 8; ++o) bin_containing(scan, o, 5.0860e9).p_bar = 0.3;
    return scan;
}

TEST(ExtractPeaks, ReproducesReferenceLayout) {
    const auto scan = reference_scan();
    const auto th = compute_threshold(scan);
    EXPECT_EQ(th.p_t, 0.676);
    const auto peaks = extract_peaks(scan, th);
    ASSERT_EQ(peaks.size(), 3u);
    const int octaves[] = {6, 7, 3};
    const double centers[] = {4.810e9, 4.830e9, 5.106e9};
    const double g_hi[] = {8e6, 4e6, 64e6};
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(peaks[i].octave, octaves[i]);
        EXPECT_NEAR(peaks[i].center(), centers[i], 1.0);
        EXPECT_NEAR(peaks[i].g_hi(), g_hi[i], 1e-3);
        EXPECT_NEAR(peaks[i].g_lo(), g_hi[i] / 2.0, 1e-3);
    }
}

TEST(ExtractPeaks, ConsecutiveBinsCollapseToTheirMinimum) {
    auto scan = flat_scan(reference_config(6), 0.95);
    bin_at(scan, 6, 20).p_bar = 0.5;
    bin_at(scan, 6, 21).p_bar = 0.2;
    bin_at(scan, 6, 22).p_bar = 0.4;
    bin_at(scan, 6, 40).p_bar = 0.3;
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    ASSERT_EQ(peaks.size(), 2u);
    EXPECT_EQ(peaks[0].k, 21);
    EXPECT_EQ(peaks[1].k, 40);
}

TEST(ExtractPeaks, TiesKeepTheLowestFrequency) {
    auto scan = flat_scan(reference_config(6), 0.95);
    bin_at(scan, 6, 30).p_bar = 0.3;
    bin_at(scan, 6, 31).p_bar = 0.3;
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].k, 30);
}

TEST(ExtractPeaks, ShallowCandidateReplacesEveryOverlappedPeak) {
    auto scan = flat_scan(reference_config(6), 0.95);
    bin_at(scan, 6, 1).p_bar = 0.3;
    bin_at(scan, 6, 3).p_bar = 0.3;
    bin_at(scan, 4, 1).p_bar = 0.5;  // covers octave-6 bins 1..4
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    ASSERT_EQ(peaks.size(), 1u);
    EXPECT_EQ(peaks[0].octave, 4);
}

TEST(ExtractPeaks, TouchingIntervalsDoNotOverlap) {
    auto scan = flat_scan(reference_config(6), 0.95);
    bin_at(scan, 6, 4).p_bar = 0.3;  // right edge equals the left edge of octave-4 bin 2
    bin_at(scan, 4, 2).p_bar = 0.3;
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    EXPECT_EQ(peaks.size(), 2u);
}

TEST(ExtractPeaks, IsIdempotent) {
    OctaveConfig c = reference_config();
    c.seed = 5;
    Environment env;
    env.f_min = c.f_min;
    env.f_max = c.f_max;
    env.modes = {{4.8114e9, 3.352e6}, {4.8296e9, 1.672e6}, {5.0860e9, 43.295e6}};
    SimulatedBackend backend(env, 5);
    const auto scan = run_octave_scan(c, backend);
    const auto th = compute_threshold(scan);
    const auto a = extract_peaks(scan, th);
    const auto b = extract_peaks(scan, th);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].octave, b[i].octave);
        EXPECT_EQ(a[i].k, b[i].k);
        EXPECT_LT(a[i].p_bar, th.p_t);
        if (i > 0) EXPECT_LE(a[i - 1].f_hi, a[i].f_lo);
    }
}

TEST(SplitSpectrum, NoPeaksNoSubScans) {
    const auto scan = flat_scan(reference_config(3), 0.95);
    EXPECT_TRUE(split_spectrum(scan, {}).empty());
}

TEST(SplitSpectrum, OnePeakCoversTheWholeSpan) {
    auto scan = flat_scan(reference_config(5), 0.95);
    bin_at(scan, 5, 7).p_bar = 0.2;
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    const auto subs = split_spectrum(scan, peaks);
    ASSERT_EQ(subs.size(), 1u);
    EXPECT_EQ(subs[0].f_lo, scan.config.f_min);
    EXPECT_EQ(subs[0].f_hi, scan.config.f_max);
    EXPECT_EQ(subs[0].bins.size(), scan.bins.size());
    for (const auto& b : subs[0].bins) EXPECT_EQ(b.proportion, 1.0);
}

TEST(SplitSpectrum, CutsAtMidpointBetweenPeakCenters) {
    const auto scan = reference_scan();
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    const auto subs = split_spectrum(scan, peaks);
    ASSERT_EQ(subs.size(), 3u);
    EXPECT_NEAR(subs[0].f_hi, 4.820e9, 1.0);
    EXPECT_EQ(subs[1].f_lo, subs[0].f_hi);
    EXPECT_NEAR(subs[1].f_hi, 0.5 * (4.830e9 + 5.106e9), 1.0);
    EXPECT_EQ(subs[2].f_lo, subs[1].f_hi);
    EXPECT_EQ(subs[0].f_lo, scan.config.f_min);
    EXPECT_EQ(subs[2].f_hi, scan.config.f_max);
}

TEST(SplitSpectrum, EachSubScanHoldsExactlyItsPeak) {
    const auto scan = reference_scan();
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    const auto subs = split_spectrum(scan, peaks);
    for (std::size_t i = 0; i < subs.size(); ++i) {
        int marked = 0;
        for (const auto& b : subs[i].bins) {
            if (b.is_peak) {
                ++marked;
                EXPECT_EQ(b.octave, peaks[i].octave);
                EXPECT_EQ(b.k, peaks[i].k);
            }
            EXPECT_GE(b.f_lo, subs[i].f_lo);
            EXPECT_LE(b.f_hi, subs[i].f_hi);
        }
        EXPECT_EQ(marked, 1);
        EXPECT_EQ(subs[i].peak.k, peaks[i].k);
    }
}

TEST(SplitSpectrum, SlicedProportionsSumToOne) {
    const auto scan = reference_scan();
    const auto peaks = extract_peaks(scan, compute_threshold(scan));
    const auto subs = split_spectrum(scan, peaks);
    std::map<std::pair<int, std::int64_t>, double> total;
    std::map<std::pair<int, std::int64_t>, int> pieces;
    for (const auto& s : subs) {
        for (const auto& b : s.bins) {
            total[{b.octave, b.k}] += b.proportion;
            ++pieces[{b.octave, b.k}];
            EXPECT_NEAR(b.proportion, (b.f_hi - b.f_lo) / b.full_width, 1e-12);
        }
    }
    EXPECT_EQ(total.size(), scan.bins.size());
    int sliced = 0;
    for (const auto& [key, sum] : total) {
        EXPECT_EQ(sum, 1.0);
        if (pieces[key] > 1) ++sliced;
    }
    EXPECT_GT(sliced, 0);
}

TEST(SlicePortions, QuarterCut) {
    const std::vector<double> cut{4.0};
    const auto p = slice_proportions(0.0, 16.0, cut);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0], 0.25);
    EXPECT_EQ(p[1], 0.75);
}

TEST(SlicePortions, RandomCutsConserveExactly) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const double lo = 4e9 + 1e9 * u(rng);
        const double w = 1e6 + 500e6 * u(rng);
        std::vector<double> cuts;
        const int n = 1 + trial % 3;
        for (int i = 0; i < n; ++i) cuts.push_back(lo + w * (i + u(rng)) / n);
        const auto p = slice_proportions(lo, lo + w, cuts);
        double sum = 0.0;
        for (double x : p) sum += x;
        ASSERT_EQ(sum, 1.0) << trial;
    }
}

TEST(SplitSpectrum, RejectsUnsortedPeaks) {
    const auto scan = reference_scan();
    auto peaks = extract_peaks(scan, compute_threshold(scan));
    std::swap(peaks[0], peaks[2]);
    EXPECT_THROW(split_spectrum(scan, peaks), std::invalid_argument);
}

TEST(SeedParticles, SingleBinConfinesParticles) {
    auto scan = flat_scan(reference_config(6), 0.95);
    bin_at(scan, 6, 12).p_bar = 0.3;
    const auto th = compute_threshold(scan);
    const auto subs = split_spectrum(scan, extract_peaks(scan, th));
    ASSERT_EQ(subs.size(), 1u);
    const Bin& bin = bin_at(scan, 6, 12);
    Rng rng(1);
    for (auto prior : {CouplingPrior::kOctaveRange, CouplingPrior::kBinWidth}) {
        const auto dist = seed_particles(subs[0], th, {5000, prior}, rng);
        ASSERT_EQ(dist.size(), 5000u);
        const double g_lo = prior == CouplingPrior::kBinWidth ? bin.width() : bin.g_o / 2.0;
        const double g_hi = prior == CouplingPrior::kBinWidth ? 2.0 * bin.width() : bin.g_o;
        for (const auto& p : dist.particles) {
            EXPECT_GE(p.f_rm, bin.f_lo);
            EXPECT_LE(p.f_rm, bin.f_hi);
            EXPECT_GE(p.g, g_lo);
            EXPECT_LE(p.g, g_hi);
        }
    }
}

TEST(SeedParticles, OccupancyFollowsWeights) {
    auto scan = flat_scan(reference_config(6), 0.9);
    bin_at(scan, 6, 10).p_bar = 0.5;  // weight 0.4
    bin_at(scan, 6, 30).p_bar = 0.1;  // weight 0.8
    const auto th = compute_threshold(scan);
    ASSERT_EQ(th.max_pbar, 0.9);
    // One sub-scan holding both bins.
    SubScan sub;
    sub.f_lo = scan.config.f_min;
    sub.f_hi = scan.config.f_max;
    for (const auto& b : scan.bins) {
        sub.bins.push_back(SlicedBin{b.octave, b.k, b.g_o, b.f_lo, b.f_hi, b.width(), 1.0, b.p_bar,
                                     false});
    }
    Rng rng(77);
    const std::size_t n = 40000;
    const auto dist = seed_particles(sub, th, {n, CouplingPrior::kOctaveRange}, rng);
    const Bin& a = bin_at(scan, 6, 10);
    std::size_t in_a = 0;
    for (const auto& p : dist.particles) {
        if (p.f_rm >= a.f_lo && p.f_rm <= a.f_hi) ++in_a;
    }
    const double pa = 1.0 / 3.0;
    EXPECT_NEAR(static_cast<double>(in_a), n * pa, 4.0 * std::sqrt(n * pa * (1 - pa)));
}

TEST(SeedParticles, SliceProportionScalesWeight) {
    SubScan sub;
    sub.f_lo = 0.0;
    sub.f_hi = 100.0;
    sub.bins.push_back(SlicedBin{6, 1, 8.0, 0.0, 4.0, 16.0, 0.25, 0.4, false});
    sub.bins.push_back(SlicedBin{6, 2, 8.0, 16.0, 32.0, 16.0, 1.0, 0.4, true});
    sub.bins.push_back(SlicedBin{6, 3, 8.0, 32.0, 48.0, 16.0, 1.0, 0.95, false});
    const auto w = seed_weights(sub, make_threshold(0.9, 0.3));
    EXPECT_NEAR(w[0], 0.2, 1e-15);
    EXPECT_NEAR(w[1], 0.8, 1e-15);
    EXPECT_EQ(w[2], 0.0);
}

TEST(SeedParticles, RejectsSubScanWithoutDips) {
    const auto scan = flat_scan(reference_config(3), 0.95);
    SubScan sub;
    sub.f_lo = scan.config.f_min;
    sub.f_hi = scan.config.f_max;
    for (const auto& b : scan.bins) {
        sub.bins.push_back(SlicedBin{b.octave, b.k, b.g_o, b.f_lo, b.f_hi, b.width(), 1.0, b.p_bar,
                                     false});
    }
    Rng rng(1);
    EXPECT_THROW(seed_particles(sub, compute_threshold(scan), {}, rng), std::invalid_argument);
}

// Simulated scan split at the reference peak bins (octaves 6, 7 and 3).
struct ReferenceSeeding {
    OctaveScan scan;
    Threshold threshold;
    std::vector<SubScan> subs;
};

ReferenceSeeding reference_seeding() {
    OctaveConfig c = reference_config();
    c.seed = 1;
    Environment env;
    env.f_min = c.f_min;
    env.f_max = c.f_max;
    env.modes = {{4.8114e9, 3.352e6}, {4.8296e9, 1.672e6}, {5.0860e9, 43.295e6}};
    SimulatedBackend backend(env, 101);
    ReferenceSeeding out;
    out.scan = run_octave_scan(c, backend);
    out.threshold = compute_threshold(out.scan);
    std::vector<Peak> peaks;
    peaks.push_back(make_peak(bin_containing(out.scan, 6, 4.810e9)));
    peaks.push_back(make_peak(bin_containing(out.scan, 7, 4.830e9)));
    peaks.push_back(make_peak(bin_containing(out.scan, 3, 5.106e9)));
    out.subs = split_spectrum(out.scan, peaks);
    return out;
}

TEST(SeedParticles, MomentsMatchReferenceSeeding) {
    const auto t = reference_seeding();
    ASSERT_EQ(t.subs.size(), 3u);
    const double mu_f[] = {4.811e9, 4.830e9, 5.088e9};
    Rng rng(1);
    std::vector<Moments> m;
    for (const auto& s : t.subs) {
        const auto dist = seed_particles(s, t.threshold, {40000, CouplingPrior::kOctaveRange}, rng);
        for (const auto& p : dist.particles) {
            EXPECT_GT(p.g, 0.0);
            EXPECT_GE(p.f_rm, s.f_lo);
            EXPECT_LE(p.f_rm, s.f_hi);
        }
        m.push_back(moments(dist));
    }
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(m[i].mu_f, mu_f[i], 10e6) << i;
        EXPECT_GT(m[i].mu_g, 1e6) << i;
        EXPECT_LT(m[i].mu_g, 10e6) << i;
    }
    EXPECT_GT(m[2].sigma_f, 20e6);
    EXPECT_LT(m[2].sigma_f, 60e6);
    EXPECT_LT(m[0].sigma_f, 10e6);
}

TEST(SeedParticles, BinWidthPriorInflatesCouplings) {
    const auto t = reference_seeding();
    Rng a(1), b(1);
    for (const auto& s : t.subs) {
        const auto octave = moments(seed_particles(s, t.threshold, {20000, CouplingPrior::kOctaveRange}, a));
        const auto width = moments(seed_particles(s, t.threshold, {20000, CouplingPrior::kBinWidth}, b));
        EXPECT_NEAR(width.mu_g / octave.mu_g, 4.0, 0.5);
    }
}

int peak_count_fraction(double separation, double g1, double g2, std::size_t expected) {
    OctaveConfig c = reference_config();
    int hits = 0;
    for (int s = 1; s <= 40; ++s) {
        Environment env;
        env.f_min = c.f_min;
        env.f_max = c.f_max;
        env.modes = {{4.6003e9, g1}, {4.6003e9 + separation, g2}};
        c.seed = static_cast<std::uint64_t>(s);
        SimulatedBackend backend(env, 7 * s + 1);
        const auto scan = run_octave_scan(c, backend);
        if (extract_peaks(scan, compute_threshold(scan)).size() == expected) ++hits;
    }
    return hits;
}

TEST(PeakSeparation, WellSeparatedModesGiveTwoPeaks) {
    // 20 MHz exceeds both 4 max(g) = 6 MHz and twice the 4 MHz final bin width.
    EXPECT_GE(peak_count_fraction(20e6, 1.5e6, 1.5e6, 2), 36);
}

TEST(PeakSeparation, ModesInsideOneFinalBinGiveOnePeak) {
    EXPECT_GE(peak_count_fraction(1e6, 3e6, 3e6, 1), 36);
}

}  // namespace
}  // namespace rcest
