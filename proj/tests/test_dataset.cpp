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
#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rfdiag/binary_io.hpp"
#include "rfdiag/dataset.hpp"

namespace rfdiag {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("rfdiag_test_" + name);
}

DatasetConfig small_config(QualityTier tier = QualityTier::High) {
    DatasetConfig c;
    c.tier = tier;
    c.total_samples = 40;
    c.split = {20, 10, 10};
    c.master_seed = 11;
    c.waveform = {25, 4, 3, 2000.0};
    return c;
}

TEST(Tier, ParseAndThresholds) {
    EXPECT_EQ(parse_tier("HIGH"), QualityTier::High);
    EXPECT_EQ(parse_tier("middle"), QualityTier::Middle);
    EXPECT_EQ(parse_tier("low"), QualityTier::Low);
    EXPECT_THROW(parse_tier("medium"), std::invalid_argument);

    const auto h = thresholds_for(QualityTier::High);
    EXPECT_EQ(h.gi, 0.2);
    EXPECT_EQ(h.qo_deg, 20.0);
    EXPECT_EQ(h.iq_offset, 0.1);
    const auto l = thresholds_for(QualityTier::Low);
    EXPECT_EQ(l.gi, 0.6);
    EXPECT_EQ(l.fo_hz, 60.0);
    EXPECT_EQ(l.iq_offset, 0.3);
}

TEST(DrawParams, Deterministic) {
    EXPECT_EQ(draw_params(17, 42), draw_params(17, 42));
    EXPECT_NE(draw_params(17, 42), draw_params(18, 42));
    EXPECT_NE(draw_params(17, 42), draw_params(17, 43));
}

TEST(DrawParams, RangesAndMeans) {
    double fo_sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto p = draw_params(static_cast<std::uint64_t>(i), 42);
        EXPECT_EQ(p.q_gain, 1.0);
        EXPECT_GE(p.i_gain, 1.0);
        EXPECT_LT(p.i_gain, 2.0);
        EXPECT_GE(p.quad_offset_deg, -90.0);
        EXPECT_LE(p.quad_offset_deg, 90.0);
        EXPECT_GE(p.phase_noise_deg, 0.0);
        EXPECT_LE(p.phase_noise_deg, 90.0);
        EXPECT_GE(p.freq_offset_hz, 0.0);
        EXPECT_LE(p.freq_offset_hz, 100.0);
        EXPECT_LE(std::abs(p.i_offset), 0.5);
        EXPECT_LE(std::abs(p.q_offset), 0.5);
        fo_sum += p.freq_offset_hz;
    }
    EXPECT_NEAR(fo_sum / n, 50.0, 2.0);
}

TEST(Label, Examples) {
    for (auto tier : {QualityTier::High, QualityTier::Middle, QualityTier::Low})
        EXPECT_EQ(label(ImpairmentParams{}, tier), LabelVector(false, false, false, false));

    ImpairmentParams p;
    p.i_gain = 1.25;  // g = 0.25
    p.freq_offset_hz = 50.0;
    EXPECT_EQ(label(p, QualityTier::High), LabelVector(true, false, true, false));
    EXPECT_EQ(label(p, QualityTier::Low), LabelVector(false, false, false, false));
}

TEST(Label, ThresholdsAreStrict) {
    ImpairmentParams p;
    p.quad_offset_deg = -20.0;
    p.i_offset = 0.1;
    EXPECT_EQ(label(p, QualityTier::High), LabelVector(false, false, false, false));
    p.quad_offset_deg = -20.5;
    p.q_offset = -0.11;
    EXPECT_EQ(label(p, QualityTier::High), LabelVector(false, true, false, true));
}

TEST(Label, MatchesOracleAndIsMonotoneAcrossTiers) {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const auto p = draw_params(i, 5);
        const auto hi = label(p, QualityTier::High);
        const auto mid = label(p, QualityTier::Middle);
        const auto lo = label(p, QualityTier::Low);
        ASSERT_EQ(hi, oracle::label(p, QualityTier::High));
        ASSERT_EQ(mid, oracle::label(p, QualityTier::Middle));
        ASSERT_EQ(lo, oracle::label(p, QualityTier::Low));
        for (std::size_t k = 0; k < kComponentCount; ++k) {
            EXPECT_LE(lo.bits[k], mid.bits[k]);
            EXPECT_LE(mid.bits[k], hi.bits[k]);
        }
    }
}

TEST(Label, PrevalenceMatchesUniformDraws) {
    const int n = 10000;
    double filter = 0.0, lo = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto v = label(draw_params(static_cast<std::uint64_t>(i), 42), QualityTier::High);
        filter += v[Component::Filter];
        lo += v[Component::Lo];
    }
    EXPECT_NEAR(filter / n, 0.8, 0.02);
    EXPECT_NEAR(lo / n, 1.0 - (20.0 / 90.0) * (20.0 / 100.0), 0.01);
}

TEST(DatasetConfig, Validation) {
    auto c = small_config();
    EXPECT_NO_THROW(c.validate());
    c.split = {20, 10, 11};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.split = {30, 10, 0};
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(GenerateDataset, SplitsAndSharedFrame) {
    const auto cfg = small_config();
    const auto ds = generate_dataset(cfg);
    ASSERT_EQ(ds.size(), 40U);
    EXPECT_EQ(ds.feature_width, 200U);
    EXPECT_EQ(ds.view(Split::Train).size(), 20U);
    EXPECT_EQ(ds.view(Split::Validation).size(), 10U);
    EXPECT_EQ(ds.view(Split::Test).size(), 10U);
    EXPECT_EQ(ds.view(Split::Test).labels.data(), ds.labels.data() + 30);

    // Every sample is the chain applied to the one clean frame.
    const auto clean = canonical_frame(cfg.waveform);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_EQ(ds.params[i], draw_params(i, cfg.master_seed));
        EXPECT_EQ(ds.labels[i], oracle::label(ds.params[i], cfg.tier));
        const auto expected = frame_to_features(apply_chain(clean, ds.params[i]));
        const auto row = ds.all().row(i);
        for (std::size_t k = 0; k < expected.size(); ++k)
            ASSERT_EQ(row[k], static_cast<float>(expected[k]));
    }
}

TEST(GenerateDataset, IndependentOfThreadCount) {
    const auto cfg = small_config(QualityTier::Middle);
    EXPECT_EQ(generate_dataset(cfg, 1), generate_dataset(cfg, 3));
    EXPECT_EQ(generate_dataset(cfg, 1), generate_dataset(cfg, 1));
}

TEST(DatasetFile, RoundTrip) {
    const auto ds = generate_dataset(small_config(QualityTier::Low));
    const auto path = temp_file("roundtrip.rfd");
    write_dataset(ds, path);
    EXPECT_TRUE(fs::exists(sidecar_path(path)));
    const auto back = read_dataset(path);
    EXPECT_EQ(back.config, ds.config);
    EXPECT_EQ(back.labels, ds.labels);
    EXPECT_EQ(back.params, ds.params);
    ASSERT_EQ(back.features.size(), ds.features.size());
    EXPECT_EQ(0, std::memcmp(back.features.data(), ds.features.data(), ds.features.size() * 4));
    fs::remove(path);
    fs::remove(sidecar_path(path));
}

TEST(DatasetFile, HeaderDeclaresWidths) {
    auto cfg = small_config();
    cfg.waveform = WaveformConfig{};
    cfg.total_samples = 3;
    cfg.split = {1, 1, 1};
    const auto path = temp_file("header.rfd");
    write_dataset(generate_dataset(cfg), path);

    std::ifstream is(path, std::ios::binary);
    LeReader r(is);
    char magic[4];
    r.bytes(magic, 4);
    EXPECT_EQ(std::string(magic, 4), "RFD1");
    EXPECT_EQ(r.u32(), kDatasetFormatVersion);
    EXPECT_EQ(r.u64(), 3U);
    r.u64();
    r.u64();
    r.u64();
    EXPECT_EQ(r.u32(), 4000U);  // feature_width
    EXPECT_EQ(r.u32(), 4U);     // label_width
    fs::remove(path);
    fs::remove(sidecar_path(path));
}

TEST(DatasetFile, TruncatedFileIsFormatError) {
    const auto path = temp_file("trunc.rfd");
    write_dataset(generate_dataset(small_config()), path);
    const auto size = fs::file_size(path);
    fs::resize_file(path, size - 7);
    try {
        read_dataset(path);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), size - 7);
    }
    fs::remove(path);
    fs::remove(sidecar_path(path));
}

TEST(DatasetFile, BadMagicAndVersion) {
    const auto path = temp_file("magic.rfd");
    write_dataset(generate_dataset(small_config()), path);
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    EXPECT_THROW(read_dataset(path), FormatError);
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(0);
        f.write("RFD1", 4);
        const char v9[4] = {9, 0, 0, 0};
        f.write(v9, 4);
    }
    try {
        read_dataset(path);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 4U);
    }
    fs::remove(path);
    fs::remove(sidecar_path(path));
}

}  // namespace
}  // namespace rfdiag
