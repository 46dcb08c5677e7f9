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

#ifndef FRAG_HE_POLYNOMIAL_HPP_
#define FRAG_HE_POLYNOMIAL_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "frag/he/modulus.hpp"

namespace frag::he {

// Coefficients of an element of Z_q[X]/(X^N + 1), each in [0, q).
struct Polynomial {
  std::vector<std::uint64_t> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::size_t degree) : coeffs(degree, 0) {}
  explicit Polynomial(std::vector<std::uint64_t> c) : coeffs(std::move(c)) {}

  std::size_t size() const { return coeffs.size(); }
  bool operator==(const Polynomial&) const = default;
};

void AddInPlace(const Modulus& q, Polynomial& acc, const Polynomial& x);
void SubInPlace(const Modulus& q, Polynomial& acc, const Polynomial& x);
void NegateInPlace(const Modulus& q, Polynomial& p);
// in * w for a scalar w < q.
Polynomial MulScalar(const Modulus& q, const Polynomial& in, std::uint64_t w);
// acc += X^shift * x (negacyclic), shift in [0, 2N).
void AddRotated(const Modulus& q, Polynomial& acc, const Polynomial& x,
                std::size_t shift, bool negate);

// Constant coefficient of a * b in the negacyclic ring, in O(N).
std::uint64_t ConstantTermOfProduct(const Modulus& q, const Polynomial& a,
                                    const Polynomial& b);

}  // namespace frag::he

#endif  // FRAG_HE_POLYNOMIAL_HPP_
