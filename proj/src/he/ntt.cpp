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

#include "frag/he/ntt.hpp"

#include <bit>
#include <stdexcept>

namespace frag::he {

namespace {

std::size_t BitReverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

NttTables::NttTables(const Modulus& modulus, std::size_t degree)
    : modulus_(&modulus), degree_(degree) {
  const std::uint64_t q = modulus.value();
  if (!std::has_single_bit(degree) || (q - 1) % (2 * degree) != 0) {
    throw std::invalid_argument("NTT requires q = 1 mod 2N and power-of-two N");
  }
  // Smallest generator-derived primitive 2N-th root, so tables are canonical.
  root_ = 0;
  for (std::uint64_t g = 2; g < q; ++g) {
    const std::uint64_t candidate = modulus.Pow(g, (q - 1) / (2 * degree));
    if (modulus.Pow(candidate, degree) == q - 1) {
      root_ = candidate;
      break;
    }
  }
  if (root_ == 0) throw std::invalid_argument("no primitive 2N-th root of unity");

  const int log_n = std::countr_zero(degree);
  const std::uint64_t inv_root = modulus.Inverse(root_);
  root_powers_.resize(degree);
  inv_root_powers_.resize(degree);
  root_shoup_.resize(degree);
  inv_root_shoup_.resize(degree);
  std::uint64_t power = 1;
  std::uint64_t inv_power = 1;
  for (std::size_t i = 0; i < degree; ++i) {
    const std::size_t slot = BitReverse(i, log_n);
    root_powers_[slot] = power;
    root_shoup_[slot] = modulus.ShoupFactor(power);
    inv_root_powers_[slot] = inv_power;
    inv_root_shoup_[slot] = modulus.ShoupFactor(inv_power);
    power = modulus.Mul(power, root_);
    inv_power = modulus.Mul(inv_power, inv_root);
  }
  inv_degree_ = modulus.Inverse(degree % q);
  inv_degree_shoup_ = modulus.ShoupFactor(inv_degree_);
}

void NttTables::Forward(std::span<std::uint64_t> a) const {
  const Modulus& mod = *modulus_;
  const std::uint64_t q = mod.value();
  std::size_t t = degree_;
  for (std::size_t m = 1; m < degree_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t w = root_powers_[m + i];
      const std::uint64_t ws = root_shoup_[m + i];
      std::uint64_t* lo = a.data() + 2 * i * t;
      std::uint64_t* hi = lo + t;
      for (std::size_t j = 0; j < t; ++j) {
        std::uint64_t x = lo[j];
        x = x >= q ? x - q : x;
        const std::uint64_t v = mod.MulShoup(hi[j], w, ws);
        lo[j] = x + v;
        hi[j] = x - v + q;
      }
    }
  }
  for (std::uint64_t& x : a) x = x >= q ? x - q : x;
}

void NttTables::Inverse(std::span<std::uint64_t> a) const {
  const Modulus& mod = *modulus_;
  const std::uint64_t q = mod.value();
  std::size_t t = 1;
  for (std::size_t m = degree_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    for (std::size_t i = 0; i < h; ++i) {
      const std::uint64_t w = inv_root_powers_[h + i];
      const std::uint64_t ws = inv_root_shoup_[h + i];
      std::uint64_t* lo = a.data() + 2 * i * t;
      std::uint64_t* hi = lo + t;
      for (std::size_t j = 0; j < t; ++j) {
        std::uint64_t x = lo[j];
        std::uint64_t y = hi[j];
        x = x >= q ? x - q : x;
        y = y >= q ? y - q : y;
        lo[j] = x + y;
        hi[j] = mod.MulShoupLazy(x - y + q, w, ws);
      }
    }
    t <<= 1;
  }
  for (std::uint64_t& x : a) x = mod.MulShoup(x, inv_degree_, inv_degree_shoup_);
}

}  // namespace frag::he
