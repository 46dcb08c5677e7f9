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

#include "frag/he/cipher.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "frag/common/error.hpp"

namespace frag::he {

Plaintext Encode(double x, const Context& ctx) {
  if (!std::isfinite(x) || std::fabs(x) > ctx.max_plain()) {
    throw Error(ErrorCode::kPlaintextOutOfRange,
                "|" + std::to_string(x) + "| exceeds " + std::to_string(ctx.max_plain()));
  }
  return Plaintext{std::llround(std::ldexp(x, static_cast<int>(ctx.params().scale_bits))), 1};
}

double Decode(const Plaintext& pt, const Context& ctx) {
  return std::ldexp(static_cast<double>(pt.value),
                    -static_cast<int>(ctx.params().scale_bits) * pt.scale_exp);
}

bool Ciphertext::operator==(const Ciphertext& other) const {
  if (!valid() || !other.valid()) return valid() == other.valid();
  return ctx_->id() == other.ctx_->id() && scale_exp_ == other.scale_exp_ &&
         polys_ == other.polys_;
}

void RequireSameParams(const ParamsId& a, const ParamsId& b) {
  if (a != b) throw Error(ErrorCode::kParamsMismatch, "parameter digests differ");
}

namespace {

void RequireValid(const Ciphertext& ct) {
  if (!ct.valid()) throw Error(ErrorCode::kMalformedFrame, "empty ciphertext");
}

void RequireScaleBudget(const Context& ctx, int scale_exp) {
  if (scale_exp > ctx.max_scale_exp()) {
    throw Error(ErrorCode::kScaleOverflow,
                "scale_exp " + std::to_string(scale_exp) + " exceeds modulus budget " +
                    std::to_string(ctx.max_scale_exp()));
  }
}

void SampleSparseTernary(const Context& ctx, Rng& rng, std::vector<std::uint64_t>& out) {
  const std::size_t n = ctx.degree();
  const Modulus& q = ctx.modulus();
  out.assign(n, 0);
  // Partial Fisher-Yates over positions.
  std::vector<std::uint32_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<std::uint32_t>(i);
  const std::size_t weight = ctx.encryption_weight();
  for (std::size_t i = 0; i < weight; ++i) {
    const std::size_t j = i + rng.UniformBelow(n - i);
    std::swap(positions[i], positions[j]);
    out[positions[i]] = (rng.NextU64() & 1) ? 1 : q.value() - 1;
  }
}

}  // namespace

Ciphertext Encrypt(double x, const PublicKey& pk, Rng& rng) {
  const Context& ctx = *pk.context();
  const Modulus& q = ctx.modulus();
  const std::size_t n = ctx.degree();
  const Plaintext pt = Encode(x, ctx);

  std::vector<std::uint64_t> u;
  SampleSparseTernary(ctx, rng, u);
  ctx.ntt().Forward(u);

  Polynomial c0(n);
  Polynomial c1(n);
  const auto& b = pk.b_ntt_mont();
  const auto& a = pk.a_ntt_mont();
  for (std::size_t i = 0; i < n; ++i) {
    c0.coeffs[i] = q.MulMont(u[i], b[i]);
    c1.coeffs[i] = q.MulMont(u[i], a[i]);
  }
  ctx.ntt().Inverse(c0.coeffs);
  ctx.ntt().Inverse(c1.coeffs);

  const GaussianSampler& gauss = ctx.gaussian();
  for (std::uint64_t& c : c0.coeffs) c = q.Add(c, q.FromSigned(gauss.Sample(rng)));
  for (std::uint64_t& c : c1.coeffs) c = q.Add(c, q.FromSigned(gauss.Sample(rng)));
  c0.coeffs[0] = q.Add(c0.coeffs[0], q.FromSigned(pt.value));

  std::vector<Polynomial> polys;
  polys.reserve(2);
  polys.push_back(std::move(c0));
  polys.push_back(std::move(c1));
  return Ciphertext(pk.context(), std::move(polys), 1);
}

Ciphertext Encrypt(double x, const PublicKey& pk) {
  thread_local Rng rng = Rng::FromEntropy();
  return Encrypt(x, pk, rng);
}

double Decrypt(const Ciphertext& ct, const SecretKey& sk) {
  RequireValid(ct);
  RequireSameParams(ct.params_id(), sk.context()->id());
  if (ct.degree() < 1 || ct.degree() > 2) {
    throw Error(ErrorCode::kDegreeUnsupported,
                "cannot decrypt degree " + std::to_string(ct.degree()));
  }
  const Context& ctx = *sk.context();
  const Modulus& q = ctx.modulus();
  const auto& polys = ct.polys();
  std::uint64_t acc = polys[0].coeffs[0];
  acc = q.Add(acc, ConstantTermOfProduct(q, polys[1], sk.s()));
  if (ct.degree() == 2) acc = q.Add(acc, ConstantTermOfProduct(q, polys[2], sk.s_squared()));
  return Decode(Plaintext{q.Centered(acc), ct.scale_exp()}, ctx);
}

void EvalAddInPlace(Ciphertext& acc, const Ciphertext& b) {
  RequireValid(acc);
  RequireValid(b);
  RequireSameParams(acc.params_id(), b.params_id());
  if (acc.scale_exp() != b.scale_exp()) {
    throw Error(ErrorCode::kScaleMismatch, "scale_exp " + std::to_string(acc.scale_exp()) +
                                               " vs " + std::to_string(b.scale_exp()));
  }
  if (acc.degree() != b.degree()) {
    throw Error(ErrorCode::kDegreeMismatch, "degree " + std::to_string(acc.degree()) + " vs " +
                                                std::to_string(b.degree()));
  }
  const Modulus& q = acc.context()->modulus();
  for (std::size_t i = 0; i < b.polys().size(); ++i) {
    AddInPlace(q, acc.mutable_polys()[i], b.polys()[i]);
  }
}

Ciphertext EvalAdd(const Ciphertext& a, const Ciphertext& b) {
  Ciphertext out = a;
  EvalAddInPlace(out, b);
  return out;
}

std::array<Polynomial, 3> TensorPolys(const Context& ctx, std::span<const Polynomial> a,
                                      std::span<const Polynomial> b) {
  const Modulus& q = ctx.modulus();
  const std::size_t n = ctx.degree();
  std::vector<std::uint64_t> a0 = a[0].coeffs, a1 = a[1].coeffs;
  std::vector<std::uint64_t> b0 = b[0].coeffs, b1 = b[1].coeffs;
  for (auto* v : {&a0, &a1, &b0, &b1}) ctx.ntt().Forward(*v);
  std::array<Polynomial, 3> out{Polynomial(n), Polynomial(n), Polynomial(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t b0m = q.ToMont(b0[i]);
    const std::uint64_t b1m = q.ToMont(b1[i]);
    out[0].coeffs[i] = q.MulMont(a0[i], b0m);
    out[1].coeffs[i] = q.Reduce(static_cast<u128>(a0[i]) * b1m + static_cast<u128>(a1[i]) * b0m);
    out[2].coeffs[i] = q.MulMont(a1[i], b1m);
  }
  for (Polynomial& p : out) ctx.ntt().Inverse(p.coeffs);
  return out;
}

Ciphertext EvalMulCipher(const Ciphertext& a, const Ciphertext& b) {
  RequireValid(a);
  RequireValid(b);
  RequireSameParams(a.params_id(), b.params_id());
  if (a.degree() >= 2 || b.degree() >= 2) {
    throw Error(ErrorCode::kDepthExceeded, "ciphertext multiply needs degree-1 inputs");
  }
  if (a.degree() < 1 || b.degree() < 1) {
    throw Error(ErrorCode::kDegreeUnsupported, "degree below 1");
  }
  const Context& ctx = *a.context();
  const int scale_exp = a.scale_exp() + b.scale_exp();
  RequireScaleBudget(ctx, scale_exp);
  auto polys = TensorPolys(ctx, a.polys(), b.polys());
  std::vector<Polynomial> out(std::make_move_iterator(polys.begin()),
                              std::make_move_iterator(polys.end()));
  return Ciphertext(a.context(), std::move(out), scale_exp);
}

Ciphertext EvalMulPlain(const Ciphertext& ct, double p) {
  RequireValid(ct);
  const Context& ctx = *ct.context();
  const Plaintext pt = Encode(p, ctx);
  if (ct.degree() < 1 || ct.degree() > 2) {
    throw Error(ErrorCode::kDegreeUnsupported,
                "plaintext multiply on degree " + std::to_string(ct.degree()));
  }
  RequireScaleBudget(ctx, ct.scale_exp() + 1);
  const Modulus& q = ctx.modulus();
  const std::uint64_t w = q.FromSigned(pt.value);
  std::vector<Polynomial> polys;
  polys.reserve(ct.polys().size());
  for (const Polynomial& poly : ct.polys()) polys.push_back(MulScalar(q, poly, w));
  return Ciphertext(ct.context(), std::move(polys), ct.scale_exp() + 1);
}

}  // namespace frag::he
