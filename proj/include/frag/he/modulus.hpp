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

#ifndef FRAG_HE_MODULUS_HPP_
#define FRAG_HE_MODULUS_HPP_

#include <cstdint>

namespace frag::he {

using u128 = unsigned __int128;

// Arithmetic modulo an odd q < 2^63 with Montgomery multiplication (R = 2^64).
//
// A value "in Montgomery form" is x*R mod q. MulMont(a, b_mont) returns the
// ordinary product a*b mod q, so callers keep one operand of each hot product
// (twiddles, prepared ciphertexts, scalars) in Montgomery form.
class Modulus {
 public:
  explicit Modulus(std::uint64_t q);

  std::uint64_t value() const { return q_; }

  std::uint64_t Add(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  std::uint64_t Sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + q_ - b;
  }
  std::uint64_t Neg(std::uint64_t a) const { return a == 0 ? 0 : q_ - a; }

  // t < q * 2^64. Returns t * R^-1 mod q, fully reduced.
  std::uint64_t Reduce(u128 t) const {
    const std::uint64_t m = static_cast<std::uint64_t>(t) * neg_q_inv_;
    const std::uint64_t r =
        static_cast<std::uint64_t>((t + static_cast<u128>(m) * q_) >> 64);
    return r >= q_ ? r - q_ : r;
  }
  std::uint64_t MulMont(std::uint64_t a, std::uint64_t b_mont) const {
    return Reduce(static_cast<u128>(a) * b_mont);
  }
  std::uint64_t ToMont(std::uint64_t a) const {
    return Reduce(static_cast<u128>(a) * r2_);
  }
  std::uint64_t FromMont(std::uint64_t a) const { return Reduce(a); }
  std::uint64_t Mul(std::uint64_t a, std::uint64_t b) const {
    return MulMont(a, ToMont(b));
  }

  // Shoup multiplication by a fixed w < q: ShoupFactor(w) = floor(w * 2^64 / q).
  std::uint64_t ShoupFactor(std::uint64_t w) const {
    return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / q_);
  }
  // x * w mod q in [0, 2q), for any 64-bit x.
  std::uint64_t MulShoupLazy(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup) const {
    const auto hi = static_cast<std::uint64_t>((static_cast<u128>(x) * w_shoup) >> 64);
    return x * w - hi * q_;
  }
  std::uint64_t MulShoup(std::uint64_t x, std::uint64_t w, std::uint64_t w_shoup) const {
    const std::uint64_t r = MulShoupLazy(x, w, w_shoup);
    return r >= q_ ? r - q_ : r;
  }

  std::uint64_t Pow(std::uint64_t base, std::uint64_t exp) const;
  // q must be prime.
  std::uint64_t Inverse(std::uint64_t a) const { return Pow(a, q_ - 2); }

  std::uint64_t FromSigned(std::int64_t v) const {
    if (v >= 0) return static_cast<std::uint64_t>(v) % q_;
    const std::uint64_t mag = (0 - static_cast<std::uint64_t>(v)) % q_;
    return mag == 0 ? 0 : q_ - mag;
  }
  // Representative in (-q/2, q/2].
  std::int64_t Centered(std::uint64_t a) const {
    return a > q_ / 2 ? -static_cast<std::int64_t>(q_ - a)
                      : static_cast<std::int64_t>(a);
  }

 private:
  std::uint64_t q_;
  std::uint64_t neg_q_inv_;  // -q^-1 mod 2^64
  std::uint64_t r2_;         // R^2 mod q
};

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool IsPrime(std::uint64_t n);

}  // namespace frag::he

#endif  // FRAG_HE_MODULUS_HPP_
