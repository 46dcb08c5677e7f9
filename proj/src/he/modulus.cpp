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

#include "frag/he/modulus.hpp"

#include <stdexcept>

namespace frag::he {

Modulus::Modulus(std::uint64_t q) : q_(q) {
  if (q < 3 || (q & 1) == 0 || q >= (std::uint64_t{1} << 63)) {
    throw std::invalid_argument("modulus must be odd and in [3, 2^63)");
  }
  std::uint64_t inv = q;  // correct to 3 bits for odd q
  for (int i = 0; i < 5; ++i) inv *= 2 - q * inv;
  neg_q_inv_ = 0 - inv;
  const std::uint64_t r = static_cast<std::uint64_t>((static_cast<u128>(1) << 64) % q);
  r2_ = static_cast<std::uint64_t>(static_cast<u128>(r) * r % q);
}

std::uint64_t Modulus::Pow(std::uint64_t base, std::uint64_t exp) const {
  std::uint64_t result = ToMont(1);
  std::uint64_t b = ToMont(base % q_);
  while (exp > 0) {
    if (exp & 1) result = MulMont(result, b);
    b = MulMont(b, b);
    exp >>= 1;
  }
  return FromMont(result);
}

namespace {

std::uint64_t MulMod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t PowMod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e > 0) {
    if (e & 1) r = MulMod(r, b, m);
    b = MulMod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool IsPrime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = MulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace frag::he
