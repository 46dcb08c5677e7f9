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

#ifndef FRAG_HE_NTT_HPP_
#define FRAG_HE_NTT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "frag/he/modulus.hpp"

namespace frag::he {

// Negacyclic number-theoretic transform over Z_q[X]/(X^N + 1).
//
// Butterflies use Shoup multiplication with values kept in [0, 2q), so any
// q < 2^63 works. Forward output is in bit-reversed order; only pointwise
// products are taken in that domain, so the order never leaks out. Results are bit-identical to
// schoolbook negacyclic convolution.
class NttTables {
 public:
  NttTables(const Modulus& modulus, std::size_t degree);

  void Forward(std::span<std::uint64_t> values) const;
  void Inverse(std::span<std::uint64_t> values) const;

  std::size_t degree() const { return degree_; }
  // The primitive 2N-th root of unity in use.
  std::uint64_t root() const { return root_; }

 private:
  const Modulus* modulus_;
  std::size_t degree_;
  std::uint64_t root_;
  // Bit-reversed twiddles with their Shoup factors.
  std::vector<std::uint64_t> root_powers_, root_shoup_;
  std::vector<std::uint64_t> inv_root_powers_, inv_root_shoup_;
  std::uint64_t inv_degree_, inv_degree_shoup_;
};

}  // namespace frag::he

#endif  // FRAG_HE_NTT_HPP_
