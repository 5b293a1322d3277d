/*
 * Copyright 2026 The rfdiag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rfdiag/impairments.hpp"
#include "oracles.hpp"
#include "rfdiag/random.hpp"

namespace rfdiag {
namespace {

using oracle::kPi;
using oracle::passband_projection;

ComplexFrame random_frame(Rng& rng, std::size_t n) {
    ComplexFrame f;
    for (std::size_t i = 0; i < n; ++i) f.samples.emplace_back(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    return f;
}

ImpairmentParams random_params(Rng& rng) {
    return {1.0 + rng.uniform(), rng.uniform(0.5, 1.5), rng.uniform(-90, 90), rng.uniform(0, 90),
            rng.uniform(0, 100), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
}

double max_abs_diff(const ComplexFrame& a, const ComplexFrame& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.samples[i] - b.samples[i]));
    return d;
}

const ImpairmentParams kFigureParams{0.65, 0.42, 60.0, 68.0, 42.0, -0.32, 0.45};

TEST(GainImbalanceQo, IdentityParametersExact) {
    Rng rng(1);
    const auto f = random_frame(rng, 100);
    EXPECT_EQ(apply_gain_imbalance_qo(f, 1.0, 1.0, 0.0).samples, f.samples);
}

TEST(GainImbalanceQo, NinetyDegreesFoldsQOntoI) {
    const ComplexFrame f{{{0.0, 1.0}}, 2000.0};
    const auto out = apply_gain_imbalance_qo(f, 1.0, 1.0, 90.0);
    EXPECT_NEAR(out.samples[0].real(), 1.0, 1e-12);
    EXPECT_NEAR(out.samples[0].imag(), 0.0, 1e-12);
}

TEST(GainImbalanceQo, FigureParameterValue) {
    const ComplexFrame f{{{0.7071, 0.7071}}, 2000.0};
    const auto out = apply_gain_imbalance_qo(f, 0.65, 0.42, 60.0);
    const auto oracle = passband_projection(f.samples[0], 0.65, 0.42, 60.0);
    EXPECT_NEAR(oracle.real(), 0.7168, 1e-3);
    EXPECT_NEAR(oracle.imag(), 0.1485, 1e-3);
    EXPECT_NEAR(out.samples[0].real(), 0.7168, 1e-3);
    EXPECT_NEAR(out.samples[0].imag(), 0.1485, 1e-3);
}

TEST(GainImbalanceQo, MatchesPassbandProjection) {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexSample x(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const double ig = rng.uniform(0.1, 2.0), qg = rng.uniform(0.1, 2.0), psi = rng.uniform(-90, 90);
        const auto got = apply_gain_imbalance_qo(ComplexFrame{{x}, 2000.0}, ig, qg, psi).samples[0];
        EXPECT_NEAR(std::abs(got - passband_projection(x, ig, qg, psi)), 0.0, 1e-12);
    }
}

TEST(GainImbalanceQo, NonPositiveGainRejected) {
    const ComplexFrame f{{{1.0, 1.0}}, 2000.0};
    EXPECT_THROW(apply_gain_imbalance_qo(f, 0.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(apply_gain_imbalance_qo(f, 1.0, -1.0, 0.0), std::invalid_argument);
}

TEST(PhaseNoise, Rotations) {
    Rng rng(3);
    const auto f = random_frame(rng, 50);
    EXPECT_EQ(apply_phase_noise(f, 0.0).samples, f.samples);

    const ComplexFrame one{{{1.0, 0.0}}, 2000.0};
    const auto q = apply_phase_noise(one, 90.0).samples[0];
    EXPECT_NEAR(q.real(), 0.0, 1e-12);
    EXPECT_NEAR(q.imag(), 1.0, 1e-12);

    const auto r = apply_phase_noise(one, 68.0).samples[0];
    EXPECT_NEAR(r.real(), 0.3746, 1e-4);
    EXPECT_NEAR(r.imag(), 0.9272, 1e-4);
}

TEST(FrequencyOffset, GrowsWithSampleIndex) {
    const ComplexFrame ones{std::vector<ComplexSample>(1000, {1.0, 0.0}), 2000.0};
    EXPECT_EQ(apply_frequency_offset(ones, 0.0).samples, ones.samples);

    const auto out = apply_frequency_offset(ones, 42.0);
    EXPECT_EQ(out.samples[0], ComplexSample(1.0, 0.0));
    // 42 Hz * 500 / 2000 Hz = 10.5 turns.
    EXPECT_NEAR(out.samples[500].real(), -1.0, 1e-9);
    EXPECT_NEAR(out.samples[500].imag(), 0.0, 1e-9);

    ComplexFrame bad = ones;
    bad.sample_rate_hz = 0.0;
    EXPECT_THROW(apply_frequency_offset(bad, 1.0), std::invalid_argument);
}

TEST(IqOffset, Shift) {
    const ComplexFrame zero{{{0.0, 0.0}}, 2000.0};
    const auto s = apply_iq_offset(zero, -0.32, 0.45).samples[0];
    EXPECT_EQ(s, ComplexSample(-0.32, 0.45));

    Rng rng(4);
    const auto f = random_frame(rng, 2000);
    EXPECT_EQ(apply_iq_offset(f, 0.0, 0.0).samples, f.samples);
    const auto g = apply_iq_offset(f, -0.32, 0.45);
    ComplexSample mean_in{}, mean_out{};
    for (std::size_t i = 0; i < f.size(); ++i) {
        mean_in += f.samples[i];
        mean_out += g.samples[i];
    }
    const auto shift = (mean_out - mean_in) / static_cast<double>(f.size());
    EXPECT_NEAR(shift.real(), -0.32, 1e-12);
    EXPECT_NEAR(shift.imag(), 0.45, 1e-12);
}

TEST(IqOffset, PreservesPairwiseDifferences) {
    Rng rng(5);
    const auto f = random_frame(rng, 64);
    const auto g = apply_iq_offset(f, 0.25, -0.375);
    for (std::size_t i = 1; i < f.size(); ++i)
        EXPECT_LT(std::abs((g.samples[i] - g.samples[i - 1]) - (f.samples[i] - f.samples[i - 1])), 1e-15);
}

TEST(Rotations, PreserveMagnitude) {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_frame(rng, 500);
        const auto a = apply_phase_noise(f, rng.uniform(0, 360));
        const auto b = apply_frequency_offset(f, rng.uniform(0, 100));
        for (std::size_t i = 0; i < f.size(); ++i) {
            EXPECT_NEAR(std::abs(a.samples[i]), std::abs(f.samples[i]), 1e-12);
            EXPECT_NEAR(std::abs(b.samples[i]), std::abs(f.samples[i]), 1e-12);
        }
    }
}

TEST(Chain, IdentityExact) {
    const auto f = canonical_frame(WaveformConfig{});
    EXPECT_EQ(apply_chain(f, ImpairmentParams{}).samples, f.samples);
}

TEST(Chain, SingleActiveStageEqualsStage) {
    Rng rng(7);
    const auto f = random_frame(rng, 300);
    ImpairmentParams p;
    p.i_offset = -0.32;
    p.q_offset = 0.45;
    EXPECT_EQ(apply_chain(f, p).samples, apply_iq_offset(f, -0.32, 0.45).samples);

    ImpairmentParams pn;
    pn.phase_noise_deg = 33.0;
    EXPECT_EQ(apply_chain(f, pn).samples, apply_phase_noise(f, 33.0).samples);

    ImpairmentParams fo;
    fo.freq_offset_hz = 17.5;
    EXPECT_EQ(apply_chain(f, fo).samples, apply_frequency_offset(f, 17.5).samples);

    ImpairmentParams gi;
    gi.i_gain = 1.3;
    gi.quad_offset_deg = -25.0;
    EXPECT_EQ(apply_chain(f, gi).samples, apply_gain_imbalance_qo(f, 1.3, 1.0, -25.0).samples);
}

TEST(Chain, FigureParametersMatchSequentialOracle) {
    const auto f = canonical_frame(WaveformConfig{});
    EXPECT_LT(max_abs_diff(apply_chain(f, kFigureParams), oracle::sequential_chain(f, kFigureParams)), 1e-12);
}

TEST(Chain, RandomParametersMatchStageComposition) {
    Rng rng(8);
    const auto f = canonical_frame(WaveformConfig{});
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_params(rng);
        auto staged = apply_gain_imbalance_qo(f, p.i_gain, p.q_gain, p.quad_offset_deg);
        staged = apply_phase_noise(staged, p.phase_noise_deg);
        staged = apply_frequency_offset(staged, p.freq_offset_hz);
        staged = apply_iq_offset(staged, p.i_offset, p.q_offset);
        const auto chained = apply_chain(f, p);
        EXPECT_LT(max_abs_diff(chained, staged), 1e-12);
        EXPECT_LT(max_abs_diff(chained, oracle::sequential_chain(f, p)), 1e-12);
    }
}

TEST(Chain, RejectsInvalidParams) {
    const auto f = canonical_frame(WaveformConfig{});
    ImpairmentParams p;
    p.q_gain = 0.0;
    EXPECT_THROW(apply_chain(f, p), std::invalid_argument);
    p = {};
    p.freq_offset_hz = std::nan("");
    EXPECT_THROW(apply_chain(f, p), std::invalid_argument);
}

TEST(Params, QuadOffsetRealism) {
    ImpairmentParams p;
    p.quad_offset_deg = 89.9;
    EXPECT_TRUE(p.quad_offset_realistic());
    p.quad_offset_deg = -90.0;
    EXPECT_FALSE(p.quad_offset_realistic());
    EXPECT_NO_THROW(p.validate());
}

TEST(GainImbalancePercent, Values) {
    EXPECT_DOUBLE_EQ(gain_imbalance_percent(1.0, 1.0), 0.0);
    EXPECT_NEAR(gain_imbalance_percent(0.65, 0.42), (0.65 / 0.42 - 1.0) * 100.0, 1e-12);
    EXPECT_NEAR(gain_imbalance_percent(0.65, 0.42), 54.76, 0.01);
    EXPECT_DOUBLE_EQ(gain_imbalance_percent(2.0, 1.0), 100.0);
    EXPECT_THROW(gain_imbalance_percent(1.0, 0.0), std::domain_error);
}

}  // namespace
}  // namespace rfdiag
