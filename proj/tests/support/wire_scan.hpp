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

// Looks for plaintext encodings inside captured frames: the 8-byte
// little-endian fixed-point residue round(v * 2^(30 e)) mod q and the raw
// IEEE-754 bytes of v.

#ifndef FRAG_TESTS_SUPPORT_WIRE_SCAN_HPP_
#define FRAG_TESTS_SUPPORT_WIRE_SCAN_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "frag/common/bytes.hpp"

namespace frag::wire_scan {

class Needles {
 public:
  Needles(std::uint64_t modulus, int scale_bits) : q_(modulus), scale_bits_(scale_bits) {}

  void Add(double v, int scale_exp) {
    if (v == 0) return;  // eight zero bytes also occur as padding
    const long double scaled = std::ldexp(static_cast<long double>(v), scale_bits_ * scale_exp);
    const auto r = static_cast<std::int64_t>(std::llround(scaled));
    const std::uint64_t residue =
        r >= 0 ? static_cast<std::uint64_t>(r) : q_ - static_cast<std::uint64_t>(-r);
    Bytes le(8);
    for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(residue >> (8 * i));
    needles_.push_back(le);
    Bytes raw(8);
    std::memcpy(raw.data(), &v, 8);
    needles_.push_back(raw);
  }

  // Number of (frame, needle) hits.
  std::size_t Count(const std::vector<Bytes>& frames) const {
    std::size_t hits = 0;
    for (const Bytes& f : frames) {
      for (const Bytes& n : needles_) {
        if (std::search(f.begin(), f.end(), n.begin(), n.end()) != f.end()) ++hits;
      }
    }
    return hits;
  }
  std::size_t size() const { return needles_.size(); }

 private:
  std::uint64_t q_;
  int scale_bits_;
  std::vector<Bytes> needles_;
};

}  // namespace frag::wire_scan

#endif  // FRAG_TESTS_SUPPORT_WIRE_SCAN_HPP_
