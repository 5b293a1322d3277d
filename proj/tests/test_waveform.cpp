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

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "rfdiag/random.hpp"
#include "rfdiag/waveform.hpp"

namespace rfdiag {
namespace {

TEST(GenerateSymbols, UnitEnergy) {
    for (const auto& s : generate_symbols(4, 42)) EXPECT_NEAR(std::norm(s), 1.0, 1e-12);
}

TEST(GenerateSymbols, DeterministicForSeed) {
    const auto a = generate_symbols(1000, 7);
    const auto b = generate_symbols(1000, 7);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i].real()), std::bit_cast<std::uint64_t>(b[i].real()));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i].imag()), std::bit_cast<std::uint64_t>(b[i].imag()));
    }
    EXPECT_NE(generate_symbols(1000, 8), a);
}

TEST(GenerateSymbols, OnlyGrayQpskPoints) {
    const double a = std::sqrt(0.5);
    for (const auto& s : generate_symbols(512, 3)) {
        EXPECT_NEAR(std::abs(s.real()), a, 1e-15);
        EXPECT_NEAR(std::abs(s.imag()), a, 1e-15);
    }
}

TEST(GenerateSymbols, UniformOverConstellation) {
    const std::size_t n = 4096;
    const auto symbols = generate_symbols(n, 7);
    std::array<double, 4> counts{};
    for (const auto& s : symbols) counts[(s.real() < 0 ? 1 : 0) + (s.imag() < 0 ? 2 : 0)] += 1;

    double chi2 = 0.0;
    for (double c : counts) {
        EXPECT_NEAR(c / n, 0.25, 0.03);
        chi2 += (c - n / 4.0) * (c - n / 4.0) / (n / 4.0);
    }
    // 3 degrees of freedom, p = 0.001 critical value.
    EXPECT_LT(chi2, 16.27);
}

TEST(GenerateSymbols, ZeroCountRejected) {
    EXPECT_THROW(generate_symbols(0, 1), std::invalid_argument);
}

TEST(Oversample, RepeatsEachSymbol) {
    const std::vector<ComplexSample> one{{1.0, 0.0}};
    const auto f = oversample(one, 4);
    ASSERT_EQ(f.size(), 4U);
    for (const auto& s : f.samples) EXPECT_EQ(s, ComplexSample(1.0, 0.0));
}

TEST(Oversample, FactorOneIsIdentity) {
    const auto s = generate_symbols(37, 5);
    EXPECT_EQ(oversample(s, 1).samples, s);
}

TEST(Oversample, Lengths) {
    const auto s = generate_symbols(500, 1);
    EXPECT_EQ(oversample(s, 4).size(), 2000U);
    EXPECT_THROW(oversample(std::vector<ComplexSample>{}, 4), std::invalid_argument);
    EXPECT_THROW(oversample(s, 0), std::invalid_argument);
}

TEST(FrameToFeatures, Interleaves) {
    const ComplexFrame f{{{1.0, 0.0}, {0.0, 1.0}}, 2000.0};
    EXPECT_EQ(frame_to_features(f), (std::vector<double>{1, 0, 0, 1}));
    EXPECT_THROW(frame_to_features(ComplexFrame{}), std::invalid_argument);
}

TEST(FrameToFeatures, CanonicalFrameFillsInputLayer) {
    const WaveformConfig cfg;
    const auto frame = canonical_frame(cfg);
    EXPECT_EQ(frame.size(), 2000U);
    EXPECT_EQ(frame_to_features(frame).size(), 4000U);
    EXPECT_EQ(cfg.feature_width(), 4000U);
    for (const auto& s : frame.samples) EXPECT_NEAR(std::abs(s), 1.0, 1e-12);
}

TEST(FrameToFeatures, RoundTripProperty) {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(300);
        ComplexFrame f;
        for (std::size_t i = 0; i < n; ++i) f.samples.emplace_back(rng.uniform(-3, 3), rng.uniform(-3, 3));
        const auto features = frame_to_features(f);
        ASSERT_EQ(features.size(), 2 * n);
        EXPECT_EQ(features_to_frame(features).samples, f.samples);
        EXPECT_EQ(frame_to_features(features_to_frame(features)), features);
    }
    EXPECT_THROW(features_to_frame(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(CanonicalFrame, ByteIdenticalAcrossCalls) {
    const WaveformConfig cfg;
    const auto a = frame_to_features(canonical_frame(cfg));
    const auto b = frame_to_features(canonical_frame(cfg));
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(0, std::memcmp(a.data(), b.data(), a.size() * sizeof(double)));
}

TEST(WaveformConfig, Validation) {
    EXPECT_THROW((WaveformConfig{0, 4, 1, 2000.0}.validate()), std::invalid_argument);
    EXPECT_THROW((WaveformConfig{10, 0, 1, 2000.0}.validate()), std::invalid_argument);
    EXPECT_THROW((WaveformConfig{10, 4, 1, 0.0}.validate()), std::invalid_argument);
}

}  // namespace
}  // namespace rfdiag
