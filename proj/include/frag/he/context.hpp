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

#ifndef FRAG_HE_CONTEXT_HPP_
#define FRAG_HE_CONTEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>

#include "frag/common/digest.hpp"
#include "frag/common/rng.hpp"
#include "frag/he/modulus.hpp"
#include "frag/he/ntt.hpp"

namespace frag::he {

// Largest prime below 2^63 with q = 1 (mod 2048). Supports N up to 1024 and
// leaves room for degree-2 values |v| < 4 at the default 2^30 scale.
inline constexpr std::uint64_t kDefaultModulus = 9223372036854675457ULL;

using ParamsId = Digest;

struct CipherParams {
  std::uint32_t ring_degree = 1024;
  std::uint64_t modulus = kDefaultModulus;
  double noise_stddev = 3.2;
  std::uint32_t scale_bits = 30;
  // Seed for reproducible runs; not part of the scheme identity.
  std::uint64_t rng_seed = 1;

  // Throws INVALID_PARAMS naming the first violated invariant.
  void Validate() const;

  // Digest over (N, q, sigma, scale_bits).
  ParamsId Id() const;
};

// Immutable per-parameter-set state shared by keys and ciphertexts.
class Context {
 public:
  static std::shared_ptr<const Context> Create(const CipherParams& params);

  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  const CipherParams& params() const { return params_; }
  const ParamsId& id() const { return id_; }
  const Modulus& modulus() const { return modulus_; }
  const NttTables& ntt() const { return ntt_; }
  std::size_t degree() const { return params_.ring_degree; }
  const GaussianSampler& gaussian() const { return gaussian_; }

  // Delta = 2^scale_bits.
  double scale() const { return scale_; }
  // Largest |x| accepted by encode-for-encryption and plaintext multiplies.
  double max_plain() const { return max_plain_; }
  // Largest scale_exp whose decoded values keep |v| < 2 below q/2.
  int max_scale_exp() const { return max_scale_exp_; }
  // Hamming weight of the ternary encryption randomness.
  std::size_t encryption_weight() const { return encryption_weight_; }

 private:
  explicit Context(const CipherParams& params);

  CipherParams params_;
  ParamsId id_;
  Modulus modulus_;
  NttTables ntt_;
  GaussianSampler gaussian_;
  double scale_;
  double max_plain_;
  int max_scale_exp_;
  std::size_t encryption_weight_;
};

using ContextPtr = std::shared_ptr<const Context>;

}  // namespace frag::he

#endif  // FRAG_HE_CONTEXT_HPP_
