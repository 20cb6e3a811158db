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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rcest {

Threshold make_threshold(double max_pbar, double buffer) {
    if (!(max_pbar >= 0.0 && max_pbar <= 1.0)) {
        throw std::invalid_argument("make_threshold: max_pbar outside [0, 1]");
    }
    if (!(buffer >= 0.0)) throw std::invalid_argument("make_threshold: negative buffer");
    if (buffer >= max_pbar) {
        throw std::invalid_argument("make_threshold: buffer must be below the maximum bin mean");
    }
    Threshold th;
    th.max_pbar = max_pbar;
    th.buffer = buffer;
    th.p_t = std::round((max_pbar - buffer) * 1e12) / 1e12;
    if (!(th.p_t > 0.0 && th.p_t < 1.0)) {
        throw std::invalid_argument("make_threshold: threshold outside (0, 1)");
    }
    return th;
}

Threshold compute_threshold(const OctaveScan& scan, double buffer) {
    if (scan.bins.empty()) throw std::invalid_argument("compute_threshold: empty scan");
    double mx = scan.bins.front().p_bar;
    for (const auto& b : scan.bins) mx = std::max(mx, b.p_bar);
    return make_threshold(mx, buffer);
}

Peak make_peak(const Bin& bin) {
    return Peak{bin.octave, bin.k, bin.f_lo, bin.f_hi, bin.g_o, bin.p_bar};
}

namespace {

bool overlaps(double a_lo, double a_hi, double b_lo, double b_hi) {
    return a_lo < b_hi && b_lo < a_hi;
}

}  // namespace

std::vector<Peak> extract_peaks(const OctaveScan& scan, const Threshold& threshold) {
    std::vector<Peak> found;
    for (int o = scan.config.final_octave; o >= 0; --o) {
        const auto bins = scan.octave(o);
        std::vector<Peak> candidates;
        const Bin* best = nullptr;
        for (const Bin& b : bins) {
            if (threshold.below(b.p_bar)) {
                if (best == nullptr || b.p_bar < best->p_bar) best = &b;
            } else if (best != nullptr) {
                candidates.push_back(make_peak(*best));
                best = nullptr;
            }
        }
        if (best != nullptr) candidates.push_back(make_peak(*best));

        for (const Peak& c : candidates) {
            std::erase_if(found, [&](const Peak& p) {
                return overlaps(c.f_lo, c.f_hi, p.f_lo, p.f_hi);
            });
            found.push_back(c);
        }
    }
    std::sort(found.begin(), found.end(),
              [](const Peak& a, const Peak& b) { return a.f_lo < b.f_lo; });
    return found;
}

std::vector<double> slice_proportions(double lo, double hi, std::span<const double> cuts) {
    if (!(hi > lo)) throw std::invalid_argument("slice_proportions: empty bin");
    std::vector<double> out;
    double acc = 0.0;
    double prev = lo;
    for (double c : cuts) {
        if (!(c > prev && c < hi)) throw std::invalid_argument("slice_proportions: bad cut");
        const double p = (c - prev) / (hi - lo);
        out.push_back(p);
        acc += p;
        prev = c;
    }
    out.push_back(1.0 - acc);
    return out;
}

std::vector<SubScan> split_spectrum(const OctaveScan& scan, std::span<const Peak> peaks) {
    if (peaks.empty()) return {};
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        if (!(peaks[i - 1].center() < peaks[i].center())) {
            throw std::invalid_argument("split_spectrum: peaks must be sorted by frequency");
        }
    }

    const double f_min = scan.config.f_min;
    const double f_max = scan.config.f_max;
    std::vector<double> cuts;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        cuts.push_back(0.5 * (peaks[i - 1].center() + peaks[i].center()));
    }

    std::vector<SubScan> out(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        out[i].f_lo = i == 0 ? f_min : cuts[i - 1];
        out[i].f_hi = i + 1 == peaks.size() ? f_max : cuts[i];
        out[i].peak = peaks[i];
    }

    for (const Bin& b : scan.bins) {
        // Cuts strictly inside the bin split it; a cut on an edge does not.
        std::vector<double> inner;
        std::size_t first = 0;  // sub-scan holding the bin's left edge
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            if (cuts[c] <= b.f_lo) first = c + 1;
            if (cuts[c] > b.f_lo && cuts[c] < b.f_hi) inner.push_back(cuts[c]);
        }
        const auto props = slice_proportions(b.f_lo, b.f_hi, inner);
        for (std::size_t s = 0; s < props.size(); ++s) {
            const std::size_t idx = first + s;
            SlicedBin sb;
            sb.octave = b.octave;
            sb.k = b.k;
            sb.g_o = b.g_o;
            sb.f_lo = s == 0 ? b.f_lo : inner[s - 1];
            sb.f_hi = s == inner.size() ? b.f_hi : inner[s];
            sb.full_width = b.width();
            sb.proportion = props[s];
            sb.p_bar = b.p_bar;
            sb.is_peak = b.octave == peaks[idx].octave && b.k == peaks[idx].k;
            out[idx].bins.push_back(sb);
        }
    }
    return out;
}

std::vector<double> seed_weights(const SubScan& subscan, const Threshold& threshold) {
    std::vector<double> w(subscan.bins.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const SlicedBin& b = subscan.bins[i];
        if (!threshold.below(b.p_bar)) continue;
        w[i] = (threshold.max_pbar - b.p_bar) * b.proportion;
        total += w[i];
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("seed_weights: sub-scan has no below-threshold bin");
    }
    for (double& x : w) x /= total;
    return w;
}

ParticleDistribution seed_particles(const SubScan& subscan, const Threshold& threshold,
                                    const SeedOptions& options, Rng& rng) {
    if (options.n_particles == 0) throw std::invalid_argument("seed_particles: n_particles == 0");
    const auto w = seed_weights(subscan, threshold);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ParticleDistribution dist;
    dist.particles.reserve(options.n_particles);
    for (std::size_t i = 0; i < options.n_particles; ++i) {
        const SlicedBin& b = subscan.bins[pick(rng)];
        const double f = b.f_lo + unit(rng) * (b.f_hi - b.f_lo);
        double g_lo = 0.5 * b.g_o;
        double g_hi = b.g_o;
        if (options.prior == CouplingPrior::kBinWidth) {
            g_lo = b.full_width;
            g_hi = 2.0 * b.full_width;
        }
        // 1 - U[0, 1) keeps g strictly above the lower edge, hence positive.
        const double g = g_lo + (1.0 - unit(rng)) * (g_hi - g_lo);
        dist.particles.push_back(Particle{std::clamp(f, b.f_lo, b.f_hi), g});
    }
    return dist;
}

}  // namespace rcest
