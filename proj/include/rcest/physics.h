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

#include <span>
#include <vector>

namespace rcest {

/// A two-level-equivalent system exchanging a single excitation with the
/// probe qubit. Frequencies and couplings are in Hz (not rad/s).
struct ResonanceMode {
    double f_rm = 0.0;
    double g = 0.0;

    /// Throws std::invalid_argument unless f_rm > 0 and g > 0.
    void validate() const;
};

/// Ground truth for the simulated backend.
///
/// t1 may be +infinity (no relaxation). Mode frequencies are allowed to lie
/// outside [f_min, f_max].
struct Environment {
    std::vector<ResonanceMode> modes;
    double t1 = 15e-6;
    double vis_floor = 0.05;
    double vis_ceiling = 0.95;
    double f_min = 0.0;
    double f_max = 1.0;

    void validate() const;
};

/// Visibility window applied to model probabilities.
struct Visibility {
    double floor = 0.05;
    double ceiling = 0.95;

    double clamp(double p) const;
};

/// Generalized Rabi frequency sqrt(delta_f^2 + 4 g^2) in Hz.
double rabi_frequency(double delta_f, double g);

/// Excitation survival of the probe after holding it at f_p for t seconds
/// next to a single mode: 1 - (2g/Omega)^2 sin^2(pi Omega t).
double chevron_probability(double f_p, double t, const ResonanceMode& mode);

/// Populations of the single-excitation manifold (probe first, then one
/// entry per mode) after evolving |probe> for time t under the RWA
/// Hamiltonian with probe-mode couplings only. Throws on t < 0.
std::vector<double> manifold_populations(double f_p, double t,
                                         std::span<const ResonanceMode> modes);

/// Probe survival probability from exact evolution of the manifold. Equals
/// chevron_probability for a single mode; 1 for an empty mode list.
double unitary_oracle(double f_p, double t, std::span<const ResonanceMode> modes);

/// What a measurement of the probe sees: the multimode survival probability,
/// multiplied by the relaxation envelope exp(-t/t1), clamped to the
/// environment's visibility window.
double observed_probability(double f_p, double t, const Environment& env);

/// Relaxation envelope exp(-t/t1); returns 1 for infinite t1.
double decay_envelope(double t, double t1);

}  // namespace rcest
