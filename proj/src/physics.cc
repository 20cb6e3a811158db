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

#include "rcest/physics.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rcest {

void ResonanceMode::validate() const {
    if (!(f_rm > 0.0) || !std::isfinite(f_rm)) {
        throw std::invalid_argument("ResonanceMode: f_rm must be positive, got " +
                                    std::to_string(f_rm));
    }
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw std::invalid_argument("ResonanceMode: g must be positive, got " +
                                    std::to_string(g));
    }
}

void Environment::validate() const {
    for (const auto& m : modes) m.validate();
    if (!(t1 > 0.0)) throw std::invalid_argument("Environment: t1 must be positive");
    if (!(vis_floor >= 0.0 && vis_floor < vis_ceiling && vis_ceiling <= 1.0)) {
        throw std::invalid_argument(
            "Environment: visibility bounds must satisfy 0 <= floor < ceiling <= 1");
    }
    if (!(f_min < f_max)) throw std::invalid_argument("Environment: f_min must be below f_max");
}

double Visibility::clamp(double p) const { return std::clamp(p, floor, ceiling); }

double rabi_frequency(double delta_f, double g) {
    return std::sqrt(delta_f * delta_f + 4.0 * g * g);
}

double chevron_probability(double f_p, double t, const ResonanceMode& mode) {
    const double omega = rabi_frequency(f_p - mode.f_rm, mode.g);
    const double amp = 2.0 * mode.g / omega;
    const double s = std::sin(std::numbers::pi * omega * t);
    return 1.0 - amp * amp * s * s;
}

std::vector<double> manifold_populations(double f_p, double t,
                                         std::span<const ResonanceMode> modes) {
    if (t < 0.0) throw std::invalid_argument("unitary_oracle: negative hold time");
    const auto n = static_cast<Eigen::Index>(modes.size()) + 1;
    if (n == 1) return {1.0};

    // Energies relative to the probe keep the diagonal small, which keeps the
    // accumulated phase error of the eigendecomposition well below 1e-10.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        const auto& m = modes[static_cast<std::size_t>(i - 1)];
        h(i, i) = m.f_rm - f_p;
        h(0, i) = m.g;
        h(i, 0) = m.g;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("unitary_oracle: eigendecomposition failed");
    }
    const Eigen::VectorXd& energies = solver.eigenvalues();
    const Eigen::MatrixXd& basis = solver.eigenvectors();

    // psi(t) = V exp(-i 2 pi E t) V^T e_0
    Eigen::VectorXcd phased(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double phase = -2.0 * std::numbers::pi * energies(k) * t;
        phased(k) = basis(0, k) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    const Eigen::VectorXcd psi = basis.cast<std::complex<double>>() * phased;

    std::vector<double> pops(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) pops[static_cast<std::size_t>(j)] = std::norm(psi(j));
    return pops;
}

double unitary_oracle(double f_p, double t, std::span<const ResonanceMode> modes) {
    return manifold_populations(f_p, t, modes).front();
}

double decay_envelope(double t, double t1) {
    if (std::isinf(t1)) return 1.0;
    return std::exp(-t / t1);
}

double observed_probability(double f_p, double t, const Environment& env) {
    const double ideal = unitary_oracle(f_p, t, env.modes);
    return std::clamp(ideal * decay_envelope(t, env.t1), env.vis_floor, env.vis_ceiling);
}

}  // namespace rcest
