/*
 * Copyright 2026 The FRAG Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Little-endian byte buffer helpers shared by every binary format.

#ifndef FRAG_COMMON_BYTES_HPP_
#define FRAG_COMMON_BYTES_HPP_

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frag/common/error.hpp"

namespace frag {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes* out) : out_(out) {}

  void PutU8(std::uint8_t v) { out_->push_back(v); }
  void PutU16(std::uint16_t v) { PutLe(v, 2); }
  void PutU32(std::uint32_t v) { PutLe(v, 4); }
  void PutU64(std::uint64_t v) { PutLe(v, 8); }
  void PutF64(double v) { PutU64(std::bit_cast<std::uint64_t>(v)); }
  void PutU32Be(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
      out_->push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }
  void PutBytes(ByteSpan bytes) {
    if (bytes.empty()) return;
    const std::size_t at = out_->size();
    out_->resize(at + bytes.size());
    std::memcpy(out_->data() + at, bytes.data(), bytes.size());
  }
  void PutString(std::string_view s) {
    out_->insert(out_->end(), s.begin(), s.end());
  }
  // Bulk little-endian u64 array; the hot path for polynomial payloads.
  void PutU64Array(std::span<const std::uint64_t> values);

  std::size_t size() const { return out_->size(); }

 private:
  void PutLe(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      out_->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  Bytes own_;
  Bytes* out_ = &own_;
};

// Bounds-checked reader; every short read throws `Error(error_code, ...)`.
class ByteReader {
 public:
  ByteReader(ByteSpan data, ErrorCode error_code)
      : data_(data), error_code_(error_code) {}

  std::uint8_t GetU8() { return static_cast<std::uint8_t>(GetLe(1)); }
  std::uint16_t GetU16() { return static_cast<std::uint16_t>(GetLe(2)); }
  std::uint32_t GetU32() { return static_cast<std::uint32_t>(GetLe(4)); }
  std::uint64_t GetU64() { return GetLe(8); }
  double GetF64() { return std::bit_cast<double>(GetU64()); }
  std::uint32_t GetU32Be() {
    Require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += 4;
    return v;
  }
  ByteSpan GetBytes(std::size_t n) {
    Require(n);
    ByteSpan out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  // Next n bytes without consuming them.
  ByteSpan Peek(std::size_t n) const {
    Require(n);
    return data_.subspan(pos_, n);
  }
  template <std::size_t N>
  std::array<std::uint8_t, N> GetArray() {
    std::array<std::uint8_t, N> out{};
    ByteSpan raw = GetBytes(N);
    std::memcpy(out.data(), raw.data(), N);
    return out;
  }
  void GetU64Array(std::span<std::uint64_t> out);

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  ErrorCode error_code() const { return error_code_; }

  void Require(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(error_code_, "truncated buffer: need " + std::to_string(n) +
                                   " bytes at offset " + std::to_string(pos_));
    }
  }
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(error_code_, what + " at offset " + std::to_string(pos_));
  }

 private:
  std::uint64_t GetLe(int width) {
    Require(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  ByteSpan data_;
  std::size_t pos_ = 0;
  ErrorCode error_code_;
};

// Whole-file helpers. Both raise IO_ERROR.
Bytes ReadFile(const std::string& path);
void WriteFile(const std::string& path, ByteSpan bytes);

}  // namespace frag

#endif  // FRAG_COMMON_BYTES_HPP_
