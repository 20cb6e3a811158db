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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace rcest {
namespace {

constexpr double kPi = std::numbers::pi;
const ResonanceMode kMode{4.83e9, 1.672e6};

Environment empty_env() {
    Environment env;
    env.f_min = 4e9;
    env.f_max = 5e9;
    return env;
}

TEST(Chevron, FullSwapAtQuarterPeriodOnResonance) {
    EXPECT_NEAR(chevron_probability(kMode.f_rm, 1.0 / (4.0 * kMode.g), kMode), 0.0, 1e-12);
}

TEST(Chevron, NoEvolutionAtZeroTime) {
    for (double df : {-20e6, -1e6, 0.0, 3e6}) {
        EXPECT_EQ(chevron_probability(kMode.f_rm + df, 0.0, kMode), 1.0);
    }
}

TEST(Chevron, DetunedByTwoCouplingsMatchesManifoldEvolution) {
    const double t = 1.0 / (4.0 * kMode.g);
    const double f_p = kMode.f_rm + 2.0 * kMode.g;
    const double s = std::sin(kPi * std::sqrt(2.0) / 2.0);
    const double expected = 1.0 - 0.5 * s * s;
    const std::vector<ResonanceMode> modes{kMode};
    EXPECT_NEAR(unitary_oracle(f_p, t, modes), expected, 1e-9);
    EXPECT_NEAR(chevron_probability(f_p, t, kMode), expected, 1e-12);
    EXPECT_NEAR(expected, 0.6835, 1e-4);
}

TEST(Chevron, PeriodicInTimeWithRabiPeriod) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const ResonanceMode m{4.5e9 + 1e9 * u(rng), 0.5e6 + 50e6 * u(rng)};
        const double df = (u(rng) - 0.5) * 20.0 * m.g;
        const double omega = rabi_frequency(df, m.g);
        const double t = 5.0 * u(rng) / m.g;
        EXPECT_NEAR(chevron_probability(m.f_rm + df, t, m),
                    chevron_probability(m.f_rm + df, t + 1.0 / omega, m), 1e-12);
    }
}

TEST(Chevron, MinimumOverTimeIsOneMinusAmplitude) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double df = u(rng) * kMode.g;
        const double omega = std::sqrt(df * df + 4.0 * kMode.g * kMode.g);
        const double amp = (2.0 * kMode.g / omega) * (2.0 * kMode.g / omega);
        double lo = 1.0;
        for (int j = 0; j <= 2000; ++j) {
            lo = std::min(lo, chevron_probability(kMode.f_rm + df, j / (2000.0 * omega), kMode));
        }
        lo = std::min(lo, chevron_probability(kMode.f_rm + df, 0.5 / omega, kMode));
        EXPECT_NEAR(lo, 1.0 - amp, 1e-12);
    }
}

TEST(Chevron, SymmetricInDetuning) {
    for (double df : {0.3e6, 2e6, 17e6}) {
        for (double t : {10e-9, 123e-9, 1e-6}) {
            EXPECT_NEAR(chevron_probability(kMode.f_rm + df, t, kMode),
                        chevron_probability(kMode.f_rm - df, t, kMode), 1e-12);
        }
    }
}

TEST(Chevron, RabiFrequencyNeverBelowTwoCouplings) {
    EXPECT_DOUBLE_EQ(rabi_frequency(0.0, 3e6), 6e6);
    EXPECT_GT(rabi_frequency(1e3, 3e6), 6e6);
}

TEST(UnitaryOracle, EmptyManifoldNeverEvolves) {
    for (double t : {0.0, 1e-9, 1e-3}) EXPECT_EQ(unitary_oracle(5e9, t, {}), 1.0);
}

TEST(UnitaryOracle, MatchesChevronForOneMode) {
    const std::vector<ResonanceMode> modes{kMode};
    for (int i = 0; i <= 40; ++i) {
        const double df = (-10.0 + 0.5 * i) * kMode.g;
        for (int j = 0; j <= 100; ++j) {
            const double t = 0.05 * j / kMode.g;
            EXPECT_NEAR(unitary_oracle(kMode.f_rm + df, t, modes),
                        chevron_probability(kMode.f_rm + df, t, kMode), 1e-9);
        }
    }
}

TEST(UnitaryOracle, TwoIdenticalModesActAsOneWithRootTwoCoupling) {
    const std::vector<ResonanceMode> modes{kMode, kMode};
    const ResonanceMode bright{kMode.f_rm, kMode.g * std::sqrt(2.0)};
    for (double df : {-5e6, 0.0, 1e6, 8e6}) {
        for (double t : {0.0, 50e-9, 200e-9, 1e-6}) {
            EXPECT_NEAR(unitary_oracle(kMode.f_rm + df, t, modes),
                        chevron_probability(kMode.f_rm + df, t, bright), 1e-9);
        }
    }
}

TEST(UnitaryOracle, ConservesProbability) {
    const std::vector<ResonanceMode> modes{{4.8114e9, 3.352e6}, {4.8296e9, 1.672e6},
                                           {5.0860e9, 43.295e6}};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> f(4.7e9, 5.2e9), t(0.0, 2e-6);
    for (int i = 0; i < 200; ++i) {
        const auto pops = manifold_populations(f(rng), t(rng), modes);
        ASSERT_EQ(pops.size(), 4u);
        double sum = 0.0;
        for (double p : pops) {
            EXPECT_GE(p, -1e-12);
            sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(UnitaryOracle, RejectsNegativeTime) {
    const std::vector<ResonanceMode> modes{kMode};
    EXPECT_THROW(unitary_oracle(kMode.f_rm, -1e-9, modes), std::invalid_argument);
}

TEST(ObservedProbability, EmptyEnvironmentAtZeroTimeSitsAtCeiling) {
    EXPECT_DOUBLE_EQ(observed_probability(4.5e9, 0.0, empty_env()), 0.95);
}

TEST(ObservedProbability, LongHoldDecaysToFloor) {
    const Environment env = empty_env();
    EXPECT_DOUBLE_EQ(observed_probability(4.5e9, 100.0 * env.t1, env), 0.05);
}

TEST(ObservedProbability, OnResonanceSwapIsClampedToFloor) {
    Environment env = empty_env();
    env.modes = {kMode};
    env.t1 = std::numeric_limits<double>::infinity();
    EXPECT_DOUBLE_EQ(observed_probability(kMode.f_rm, 1.0 / (4.0 * kMode.g), env), 0.05);
}

TEST(ObservedProbability, AppliesExponentialEnvelopeBeforeClamp) {
    Environment env = empty_env();
    env.vis_floor = 0.0;
    env.vis_ceiling = 1.0;
    const double t = 3e-6;
    EXPECT_NEAR(observed_probability(4.5e9, t, env), std::exp(-t / env.t1), 1e-15);
}

TEST(ObservedProbability, AlwaysInsideVisibilityWindow) {
    Environment env = empty_env();
    env.modes = {{4.8114e9, 3.352e6}, {4.8296e9, 1.672e6}};
    env.vis_floor = 0.1;
    env.vis_ceiling = 0.8;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> f(4.78e9, 4.86e9), t(0.0, 5e-6);
    for (int i = 0; i < 2000; ++i) {
        const double p = observed_probability(f(rng), t(rng), env);
        EXPECT_GE(p, 0.1);
        EXPECT_LE(p, 0.8);
    }
}

TEST(DecayEnvelope, InfiniteT1MeansNoDecay) {
    EXPECT_EQ(decay_envelope(1.0, std::numeric_limits<double>::infinity()), 1.0);
    EXPECT_NEAR(decay_envelope(15e-6, 15e-6), std::exp(-1.0), 1e-15);
}

TEST(Validation, ResonanceModeRequiresPositiveValues) {
    EXPECT_NO_THROW(kMode.validate());
    EXPECT_THROW((ResonanceMode{4e9, 0.0}).validate(), std::invalid_argument);
    EXPECT_THROW((ResonanceMode{4e9, -1.0}).validate(), std::invalid_argument);
    EXPECT_THROW((ResonanceMode{0.0, 1e6}).validate(), std::invalid_argument);
}

TEST(Validation, EnvironmentInvariants) {
    EXPECT_NO_THROW(empty_env().validate());
    Environment env = empty_env();
    env.vis_floor = 0.95;
    EXPECT_THROW(env.validate(), std::invalid_argument);
    env = empty_env();
    env.vis_ceiling = 1.2;
    EXPECT_THROW(env.validate(), std::invalid_argument);
    env = empty_env();
    env.t1 = 0.0;
    EXPECT_THROW(env.validate(), std::invalid_argument);
    env = empty_env();
    env.f_max = env.f_min;
    EXPECT_THROW(env.validate(), std::invalid_argument);
    env = empty_env();
    env.modes = {{6e9, 1e6}};  // outside the range is allowed
    EXPECT_NO_THROW(env.validate());
}

}  // namespace
}  // namespace rcest
