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

#include "rfdiag/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "rfdiag/binary_io.hpp"
#include "rfdiag/random.hpp"

namespace rfdiag {
namespace {

constexpr char kMagic[4] = {'R', 'F', 'D', '1'};
constexpr std::uint64_t kHeaderBytes = 88;
constexpr std::uint64_t kParamFields = 7;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::uint64_t record_bytes(std::size_t feature_width) {
    return kParamFields * 8 + kLabelWidth + 4 * static_cast<std::uint64_t>(feature_width);
}

nlohmann::json config_json(const DatasetConfig& c, std::size_t feature_width) {
    return {
        {"format", "RFD1"},
        {"version", kDatasetFormatVersion},
        {"tier", std::string(to_string(c.tier))},
        {"total_samples", c.total_samples},
        {"split", {{"train", c.split.train}, {"validation", c.split.validation}, {"test", c.split.test}}},
        {"master_seed", c.master_seed},
        {"feature_width", feature_width},
        {"label_width", kLabelWidth},
        {"label_order", {"filter", "ps", "lo", "mixer"}},
        {"waveform",
         {{"symbol_count", c.waveform.symbol_count},
          {"oversample_factor", c.waveform.oversample_factor},
          {"seed", c.waveform.seed},
          {"sample_rate_hz", c.waveform.sample_rate_hz}}},
    };
}

}  // namespace

std::string_view to_string(QualityTier tier) {
    switch (tier) {
        case QualityTier::High: return "high";
        case QualityTier::Middle: return "middle";
        case QualityTier::Low: return "low";
    }
    return "unknown";
}

QualityTier parse_tier(std::string_view name) {
    const auto s = lower(name);
    if (s == "high") return QualityTier::High;
    if (s == "middle") return QualityTier::Middle;
    if (s == "low") return QualityTier::Low;
    throw std::invalid_argument("unknown quality tier '" + std::string(name) +
                                "' (expected high, middle or low)");
}

Thresholds thresholds_for(QualityTier tier) {
    switch (tier) {
        case QualityTier::High: return {0.2, 20.0, 20.0, 20.0, 0.1};
        case QualityTier::Middle: return {0.4, 40.0, 40.0, 40.0, 0.2};
        case QualityTier::Low: return {0.6, 60.0, 60.0, 60.0, 0.3};
    }
    throw std::invalid_argument("invalid quality tier");
}

std::string_view to_string(Component c) {
    switch (c) {
        case Component::Filter: return "filter";
        case Component::Ps: return "ps";
        case Component::Lo: return "lo";
        case Component::Mixer: return "mixer";
    }
    return "unknown";
}

std::string_view to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "unknown";
}

Split parse_split(std::string_view name) {
    const auto s = lower(name);
    if (s == "train") return Split::Train;
    if (s == "validation" || s == "val") return Split::Validation;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

ImpairmentParams draw_params(std::uint64_t index, std::uint64_t master_seed) {
    Rng rng(master_seed, index);
    ImpairmentParams p;
    const double g = rng.uniform();
    p.i_gain = 1.0 + g;
    p.q_gain = 1.0;
    p.quad_offset_deg = rng.uniform(-90.0, 90.0);
    p.phase_noise_deg = rng.uniform(0.0, 90.0);
    p.freq_offset_hz = rng.uniform(0.0, 100.0);
    p.i_offset = rng.uniform(-0.5, 0.5);
    p.q_offset = rng.uniform(-0.5, 0.5);
    return p;
}

LabelVector label(const ImpairmentParams& p, QualityTier tier) {
    const Thresholds t = thresholds_for(tier);
    const double g = p.i_gain / p.q_gain - 1.0;
    return LabelVector(g > t.gi, std::abs(p.quad_offset_deg) > t.qo_deg,
                       p.phase_noise_deg > t.pn_deg || p.freq_offset_hz > t.fo_hz,
                       std::abs(p.i_offset) > t.iq_offset || std::abs(p.q_offset) > t.iq_offset);
}

void DatasetConfig::validate() const {
    waveform.validate();
    if (total_samples == 0) throw std::invalid_argument("dataset: total_samples must be positive");
    if (split.train == 0 || split.validation == 0 || split.test == 0)
        throw std::invalid_argument("dataset: every split must be positive");
    if (split.total() != total_samples)
        throw std::invalid_argument("dataset: split " + std::to_string(split.train) + "," +
                                    std::to_string(split.validation) + "," +
                                    std::to_string(split.test) + " sums to " +
                                    std::to_string(split.total()) + ", not total_samples " +
                                    std::to_string(total_samples));
    (void)thresholds_for(tier);
}

SampleView Dataset::all() const {
    return {feature_width, std::span<const float>(features), std::span<const LabelVector>(labels)};
}

SampleView Dataset::view(Split split) const {
    std::size_t begin = 0;
    std::size_t count = 0;
    switch (split) {
        case Split::Train: count = config.split.train; break;
        case Split::Validation:
            begin = config.split.train;
            count = config.split.validation;
            break;
        case Split::Test:
            begin = config.split.train + config.split.validation;
            count = config.split.test;
            break;
    }
    const auto v = all();
    return {feature_width, v.features.subspan(begin * feature_width, count * feature_width),
            v.labels.subspan(begin, count)};
}

Dataset generate_dataset(const DatasetConfig& config, unsigned threads) {
    config.validate();

    // One clean frame for every sample.
    const ComplexFrame clean = canonical_frame(config.waveform);

    Dataset ds;
    ds.config = config;
    ds.feature_width = config.waveform.feature_width();
    const std::size_t n = config.total_samples;
    ds.features.resize(n * ds.feature_width);
    ds.labels.resize(n);
    ds.params.resize(n);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const ImpairmentParams p = draw_params(i, config.master_seed);
            const ComplexFrame distorted = apply_chain(clean, p);
            float* row = ds.features.data() + i * ds.feature_width;
            for (std::size_t k = 0; k < distorted.size(); ++k) {
                row[2 * k] = static_cast<float>(distorted.samples[k].real());
                row[2 * k + 1] = static_cast<float>(distorted.samples[k].imag());
            }
            ds.params[i] = p;
            ds.labels[i] = label(p, config.tier);
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
    }
    return ds;
}

std::filesystem::path sidecar_path(const std::filesystem::path& dataset_path) {
    auto p = dataset_path;
    p += ".json";
    return p;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    if (ds.labels.size() != ds.config.total_samples || ds.params.size() != ds.labels.size() ||
        ds.features.size() != ds.labels.size() * ds.feature_width)
        throw std::invalid_argument("write_dataset: inconsistent dataset sizes");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    LeWriter w(os);

    const auto& c = ds.config;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kDatasetFormatVersion);
    w.u64(c.total_samples);
    w.u64(c.split.train);
    w.u64(c.split.validation);
    w.u64(c.split.test);
    w.u32(static_cast<std::uint32_t>(ds.feature_width));
    w.u32(kLabelWidth);
    w.u32(static_cast<std::uint32_t>(c.tier));
    w.u64(c.master_seed);
    w.u64(c.waveform.symbol_count);
    w.u32(static_cast<std::uint32_t>(c.waveform.oversample_factor));
    w.u64(c.waveform.seed);
    w.f64(c.waveform.sample_rate_hz);

    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& p = ds.params[i];
        for (double v : {p.i_gain, p.q_gain, p.quad_offset_deg, p.phase_noise_deg,
                         p.freq_offset_hz, p.i_offset, p.q_offset})
            w.f64(v);
        w.bytes(ds.labels[i].bits.data(), kLabelWidth);
        w.f32_array(ds.all().row(i));
    }
    os.close();
    if (!os) throw std::runtime_error("failed to finish writing '" + path.string() + "'");

    std::ofstream js(sidecar_path(path), std::ios::trunc);
    if (!js) throw std::runtime_error("cannot write sidecar for '" + path.string() + "'");
    js << config_json(c, ds.feature_width).dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
    is.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0, std::ios::beg);

    LeReader r(is);
    char magic[4];
    r.bytes(magic, sizeof magic);
    if (!std::equal(magic, magic + 4, kMagic)) throw FormatError("bad dataset magic", 0);
    if (const auto version = r.u32(); version != kDatasetFormatVersion)
        throw FormatError("unsupported dataset version " + std::to_string(version), 4);

    Dataset ds;
    auto& c = ds.config;
    c.total_samples = r.u64();
    c.split.train = r.u64();
    c.split.validation = r.u64();
    c.split.test = r.u64();
    if (c.split.total() != c.total_samples)
        throw FormatError("split sizes do not sum to the sample count", 8);
    ds.feature_width = r.u32();
    if (const auto lw = r.u32(); lw != kLabelWidth)
        throw FormatError("label_width " + std::to_string(lw) + ", expected " +
                              std::to_string(kLabelWidth),
                          r.offset() - 4);
    const auto tier = r.u32();
    if (tier > static_cast<std::uint32_t>(QualityTier::Low))
        throw FormatError("invalid tier code " + std::to_string(tier), r.offset() - 4);
    c.tier = static_cast<QualityTier>(tier);
    c.master_seed = r.u64();
    c.waveform.symbol_count = r.u64();
    c.waveform.oversample_factor = r.u32();
    c.waveform.seed = r.u64();
    c.waveform.sample_rate_hz = r.f64();
    if (ds.feature_width != c.waveform.feature_width() || ds.feature_width == 0)
        throw FormatError("feature_width " + std::to_string(ds.feature_width) +
                              " disagrees with the waveform header",
                          48);

    const std::uint64_t expected = kHeaderBytes + c.total_samples * record_bytes(ds.feature_width);
    if (file_size < expected)
        throw FormatError("truncated dataset: expected " + std::to_string(expected) +
                              " bytes, found " + std::to_string(file_size),
                          file_size);
    if (file_size > expected)
        throw FormatError("trailing bytes after last record", expected);

    const std::size_t n = c.total_samples;
    ds.features.resize(n * ds.feature_width);
    ds.labels.resize(n);
    ds.params.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = ds.params[i];
        for (double* f : {&p.i_gain, &p.q_gain, &p.quad_offset_deg, &p.phase_noise_deg,
                          &p.freq_offset_hz, &p.i_offset, &p.q_offset})
            *f = r.f64();
        const auto label_at = r.offset();
        r.bytes(ds.labels[i].bits.data(), kLabelWidth);
        for (auto b : ds.labels[i].bits)
            if (b > 1) throw FormatError("label byte is not 0 or 1", label_at);
        r.f32_array(std::span<float>(ds.features).subspan(i * ds.feature_width, ds.feature_width));
    }
    return ds;
}

}  // namespace rfdiag
