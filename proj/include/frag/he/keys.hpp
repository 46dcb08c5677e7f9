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

#ifndef FRAG_HE_KEYS_HPP_
#define FRAG_HE_KEYS_HPP_

#include <cstdint>
#include <vector>

#include "frag/he/context.hpp"
#include "frag/he/polynomial.hpp"

namespace frag::he {

class SecretKey {
 public:
  SecretKey() = default;
  // `s` must have ternary coefficients represented mod q.
  SecretKey(ContextPtr ctx, Polynomial s);

  const ContextPtr& context() const { return ctx_; }
  const Polynomial& s() const { return s_; }
  // s^2 in coefficient form, used to decrypt degree-2 ciphertexts.
  const Polynomial& s_squared() const { return s_squared_; }

  bool operator==(const SecretKey& o) const { return s_ == o.s_ && ctx_->id() == o.ctx_->id(); }

 private:
  ContextPtr ctx_;
  Polynomial s_;
  Polynomial s_squared_;
};

// (b, a) with b = -(a*s) + e.
class PublicKey {
 public:
  PublicKey() = default;
  PublicKey(ContextPtr ctx, Polynomial b, Polynomial a);

  const ContextPtr& context() const { return ctx_; }
  const Polynomial& b() const { return b_; }
  const Polynomial& a() const { return a_; }
  // NTT-domain components in Montgomery form for encryption.
  const std::vector<std::uint64_t>& b_ntt_mont() const { return b_ntt_mont_; }
  const std::vector<std::uint64_t>& a_ntt_mont() const { return a_ntt_mont_; }

  bool operator==(const PublicKey& o) const {
    return b_ == o.b_ && a_ == o.a_ && ctx_->id() == o.ctx_->id();
  }

 private:
  ContextPtr ctx_;
  Polynomial b_;
  Polynomial a_;
  std::vector<std::uint64_t> b_ntt_mont_;
  std::vector<std::uint64_t> a_ntt_mont_;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

// Deterministic in (params, seed). INVALID_PARAMS on bad parameters.
KeyPair KeyGen(const ContextPtr& ctx, std::uint64_t seed);
KeyPair KeyGen(const CipherParams& params, std::uint64_t seed);

}  // namespace frag::he

#endif  // FRAG_HE_KEYS_HPP_
