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

#ifndef RFDIAG_BINARY_IO_HPP
#define RFDIAG_BINARY_IO_HPP

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>

namespace rfdiag {

/// Malformed or truncated binary file. `offset()` is the byte position at
/// which the problem was detected.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset);
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Little-endian encoder over an ostream.
class LeWriter {
public:
    explicit LeWriter(std::ostream& os) : os_(os) {}

    void bytes(const void* data, std::size_t n);
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void f32_array(std::span<const float> values);
    void f64_array(std::span<const double> values);

private:
    std::ostream& os_;
};

/// Little-endian decoder that tracks the byte offset and throws FormatError
/// on short reads.
class LeReader {
public:
    explicit LeReader(std::istream& is) : is_(is) {}

    void bytes(void* data, std::size_t n);
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    void f32_array(std::span<float> out);
    void f64_array(std::span<double> out);

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::istream& is_;
    std::uint64_t offset_ = 0;
};

}  // namespace rfdiag

#endif  // RFDIAG_BINARY_IO_HPP
