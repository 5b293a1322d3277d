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

#include "rfdiag/binary_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <vector>

namespace rfdiag {
namespace {

constexpr bool kLittle = std::endian::native == std::endian::little;

template <typename U>
void store_le(U v, unsigned char* out) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

template <typename U>
U load_le(const unsigned char* in) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(in[i]) << (8 * i);
    return v;
}

// Arrays are moved in chunks; on little-endian hosts the chunk is the raw
// memory, elsewhere each element is byte-swapped through its bit pattern.
constexpr std::size_t kChunk = 1 << 14;

template <typename T, typename U>
void write_array(LeWriter& w, std::span<const T> values) {
    if constexpr (kLittle) {
        w.bytes(values.data(), values.size_bytes());
    } else {
        std::vector<unsigned char> buf(kChunk * sizeof(T));
        for (std::size_t i = 0; i < values.size(); i += kChunk) {
            const std::size_t n = std::min(kChunk, values.size() - i);
            for (std::size_t k = 0; k < n; ++k)
                store_le(std::bit_cast<U>(values[i + k]), buf.data() + k * sizeof(T));
            w.bytes(buf.data(), n * sizeof(T));
        }
    }
}

template <typename T, typename U>
void read_array(LeReader& r, std::span<T> out) {
    if constexpr (kLittle) {
        r.bytes(out.data(), out.size_bytes());
    } else {
        std::vector<unsigned char> buf(kChunk * sizeof(T));
        for (std::size_t i = 0; i < out.size(); i += kChunk) {
            const std::size_t n = std::min(kChunk, out.size() - i);
            r.bytes(buf.data(), n * sizeof(T));
            for (std::size_t k = 0; k < n; ++k)
                out[i + k] = std::bit_cast<T>(load_le<U>(buf.data() + k * sizeof(T)));
        }
    }
}

}  // namespace

FormatError::FormatError(const std::string& what, std::uint64_t offset)
    : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

void LeWriter::bytes(const void* data, std::size_t n) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!os_) throw std::runtime_error("write failed");
}

void LeWriter::u32(std::uint32_t v) {
    std::array<unsigned char, 4> b{};
    store_le(v, b.data());
    bytes(b.data(), b.size());
}

void LeWriter::u64(std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    store_le(v, b.data());
    bytes(b.data(), b.size());
}

void LeWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void LeWriter::f32_array(std::span<const float> values) {
    write_array<float, std::uint32_t>(*this, values);
}

void LeWriter::f64_array(std::span<const double> values) {
    write_array<double, std::uint64_t>(*this, values);
}

void LeReader::bytes(void* data, std::size_t n) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    const auto got = static_cast<std::uint64_t>(is_.gcount());
    if (got != n) throw FormatError("unexpected end of file", offset_ + got);
    offset_ += n;
}

std::uint8_t LeReader::u8() {
    std::uint8_t v = 0;
    bytes(&v, 1);
    return v;
}

std::uint32_t LeReader::u32() {
    std::array<unsigned char, 4> b{};
    bytes(b.data(), b.size());
    return load_le<std::uint32_t>(b.data());
}

std::uint64_t LeReader::u64() {
    std::array<unsigned char, 8> b{};
    bytes(b.data(), b.size());
    return load_le<std::uint64_t>(b.data());
}

double LeReader::f64() { return std::bit_cast<double>(u64()); }

void LeReader::f32_array(std::span<float> out) { read_array<float, std::uint32_t>(*this, out); }

void LeReader::f64_array(std::span<double> out) { read_array<double, std::uint64_t>(*this, out); }

}  // namespace rfdiag
