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

#include "frag/he/keys.hpp"

#include <utility>

#include "frag/common/rng.hpp"

namespace frag::he {

namespace {

std::vector<std::uint64_t> ToNttMont(const Context& ctx, const Polynomial& p) {
  std::vector<std::uint64_t> out = p.coeffs;
  ctx.ntt().Forward(out);
  for (std::uint64_t& x : out) x = ctx.modulus().ToMont(x);
  return out;
}

Polynomial MultiplyViaNtt(const Context& ctx, const Polynomial& a, const Polynomial& b) {
  const std::vector<std::uint64_t> b_mont = ToNttMont(ctx, b);
  std::vector<std::uint64_t> out = a.coeffs;
  ctx.ntt().Forward(out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ctx.modulus().MulMont(out[i], b_mont[i]);
  ctx.ntt().Inverse(out);
  return Polynomial(std::move(out));
}

}  // namespace

SecretKey::SecretKey(ContextPtr ctx, Polynomial s)
    : ctx_(std::move(ctx)), s_(std::move(s)) {
  s_squared_ = MultiplyViaNtt(*ctx_, s_, s_);
}

PublicKey::PublicKey(ContextPtr ctx, Polynomial b, Polynomial a)
    : ctx_(std::move(ctx)), b_(std::move(b)), a_(std::move(a)) {
  b_ntt_mont_ = ToNttMont(*ctx_, b_);
  a_ntt_mont_ = ToNttMont(*ctx_, a_);
}

KeyPair KeyGen(const ContextPtr& ctx, std::uint64_t seed) {
  const Modulus& q = ctx->modulus();
  const std::size_t n = ctx->degree();
  Rng rng(seed);

  Polynomial s(n);
  for (std::uint64_t& c : s.coeffs) c = q.FromSigned(rng.Ternary());
  Polynomial a(n);
  for (std::uint64_t& c : a.coeffs) c = rng.UniformBelow(q.value());
  Polynomial e(n);
  for (std::uint64_t& c : e.coeffs) c = q.FromSigned(ctx->gaussian().Sample(rng));

  Polynomial b = MultiplyViaNtt(*ctx, a, s);
  NegateInPlace(q, b);
  AddInPlace(q, b, e);

  KeyPair kp{PublicKey(ctx, std::move(b), std::move(a)), SecretKey(ctx, std::move(s))};
  return kp;
}

KeyPair KeyGen(const CipherParams& params, std::uint64_t seed) {
  return KeyGen(Context::Create(params), seed);
}

}  // namespace frag::he
