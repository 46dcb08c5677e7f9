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

#ifndef FRAG_HE_TENSOR_HPP_
#define FRAG_HE_TENSOR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "frag/he/ciphertext.hpp"

namespace frag::he {

// A degree-1 ciphertext held in the NTT domain (Montgomery form), prepared
// once and multiplied against many operands.
class PreparedCiphertext {
 public:
  // DEPTH_EXCEEDED unless `ct` is degree 1.
  explicit PreparedCiphertext(const Ciphertext& ct);

  const ContextPtr& context() const { return ctx_; }
  int scale_exp() const { return scale_exp_; }
  const std::vector<std::uint64_t>& c0() const { return c0_; }
  const std::vector<std::uint64_t>& c1() const { return c1_; }

 private:
  ContextPtr ctx_;
  int scale_exp_;
  std::vector<std::uint64_t> c0_;
  std::vector<std::uint64_t> c1_;
};

// A degree-1 polynomial pair (a ciphertext or a share) held in the NTT domain
// as plain residues. Stored operands are transformed once and reused for every
// query.
class TransformedPair {
 public:
  TransformedPair(const ContextPtr& ctx, std::span<const Polynomial> polys);
  // DEPTH_EXCEEDED unless `ct` is degree 1.
  explicit TransformedPair(const Ciphertext& ct);

  const std::vector<std::uint64_t>& c0() const { return c0_; }
  const std::vector<std::uint64_t>& c1() const { return c1_; }

 private:
  std::vector<std::uint64_t> c0_;
  std::vector<std::uint64_t> c1_;
};

// Accumulates sum_i tensor(a_i, b_i) in the NTT domain and transforms back
// once. The result is coefficient-identical to folding EvalMulCipher with
// EvalAdd, since every step is exact modular arithmetic.
class TensorAccumulator {
 public:
  explicit TensorAccumulator(ContextPtr ctx);

  // `a` is a degree-1 polynomial pair in coefficient form.
  void Add(std::span<const Polynomial> a, const PreparedCiphertext& b);
  void Add(const Ciphertext& a, const PreparedCiphertext& b);
  void Add(const TransformedPair& a, const PreparedCiphertext& b);

  // Degree-2 ciphertext; resets the accumulator.
  Ciphertext Finish(int scale_exp);

  std::size_t terms() const { return terms_; }

 private:
  void AddTransformed(const std::uint64_t* a0, const std::uint64_t* a1,
                      const PreparedCiphertext& b);

  ContextPtr ctx_;
  std::vector<std::uint64_t> d0_, d1_, d2_;
  std::vector<std::uint64_t> scratch0_, scratch1_;
  std::size_t terms_ = 0;
};

}  // namespace frag::he

#endif  // FRAG_HE_TENSOR_HPP_
