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

#include "frag/he/serialize.hpp"

#include <string>
#include <utility>

#include "frag/common/error.hpp"

namespace frag::he {

std::size_t CiphertextBodySize(std::size_t degree, int ct_degree) {
  return 32 + 1 + 1 + 4 + static_cast<std::size_t>(ct_degree + 1) * degree * 8;
}

std::size_t CiphertextFrameSize(std::size_t degree, int ct_degree) {
  return 8 + CiphertextBodySize(degree, ct_degree);
}

void WriteCiphertextBody(ByteWriter& w, const Ciphertext& ct) {
  if (!ct.valid()) throw Error(ErrorCode::kMalformedFrame, "cannot serialize empty ciphertext");
  w.PutBytes(ct.params_id());
  w.PutU8(static_cast<std::uint8_t>(ct.degree()));
  w.PutU8(static_cast<std::uint8_t>(ct.scale_exp()));
  w.PutU32(static_cast<std::uint32_t>(ct.context()->degree()));
  for (const Polynomial& p : ct.polys()) w.PutU64Array(p.coeffs);
}

void WriteCiphertextFrame(ByteWriter& w, const Ciphertext& ct) {
  w.PutBytes(kCiphertextMagic);
  WriteCiphertextBody(w, ct);
}

Bytes SerializeCiphertext(const Ciphertext& ct) {
  Bytes out;
  out.reserve(CiphertextFrameSize(ct.context()->degree(), ct.degree()));
  ByteWriter w(&out);
  WriteCiphertextFrame(w, ct);
  return out;
}

void ExpectMagic(ByteReader& r, const Magic& magic, std::string_view what) {
  const auto got = r.GetArray<8>();
  if (got != magic) r.Fail("bad magic for " + std::string(what));
}

namespace {

void ReadPolynomial(ByteReader& r, const Modulus& q, std::size_t n, Polynomial& p) {
  p.coeffs.resize(n);
  r.GetU64Array(p.coeffs);
  for (std::uint64_t c : p.coeffs) {
    if (c >= q.value()) r.Fail("coefficient not reduced mod q");
  }
}

}  // namespace

Ciphertext ReadCiphertextBody(ByteReader& r, const ContextPtr& ctx) {
  const auto id = r.GetArray<32>();
  const int degree = r.GetU8();
  const int scale_exp = r.GetU8();
  const std::uint32_t n = r.GetU32();
  if (degree < 1 || degree > 2) r.Fail("ciphertext degree " + std::to_string(degree));
  if (scale_exp < 1) r.Fail("scale_exp " + std::to_string(scale_exp));
  if (id != ctx->id()) throw Error(ErrorCode::kParamsMismatch, "ciphertext parameter digest differs");
  if (n != ctx->degree()) r.Fail("ring degree " + std::to_string(n));
  std::vector<Polynomial> polys(static_cast<std::size_t>(degree) + 1);
  for (Polynomial& p : polys) ReadPolynomial(r, ctx->modulus(), n, p);
  return Ciphertext(ctx, std::move(polys), scale_exp);
}

Ciphertext ReadCiphertextFrame(ByteReader& r, const ContextPtr& ctx) {
  ExpectMagic(r, kCiphertextMagic, "ciphertext");
  return ReadCiphertextBody(r, ctx);
}

Ciphertext DeserializeCiphertext(ByteSpan bytes, const ContextPtr& ctx) {
  ByteReader r(bytes, ErrorCode::kMalformedFrame);
  Ciphertext ct = ReadCiphertextFrame(r, ctx);
  if (!r.done()) r.Fail("trailing bytes after ciphertext");
  return ct;
}

void WriteParamsBlock(ByteWriter& w, const CipherParams& params) {
  w.PutBytes(params.Id());
  w.PutU32(params.ring_degree);
  w.PutU64(params.modulus);
  w.PutF64(params.noise_stddev);
  w.PutU32(params.scale_bits);
}

CipherParams ReadParamsBlock(ByteReader& r) {
  const auto id = r.GetArray<32>();
  CipherParams params;
  params.ring_degree = r.GetU32();
  params.modulus = r.GetU64();
  params.noise_stddev = r.GetF64();
  params.scale_bits = r.GetU32();
  params.Validate();
  if (params.Id() != id) r.Fail("parameter digest does not match parameter block");
  return params;
}

namespace {

ContextPtr BindContext(ByteReader& r, const ContextPtr& ctx) {
  const CipherParams params = ReadParamsBlock(r);
  if (ctx == nullptr) return Context::Create(params);
  if (params.Id() != ctx->id()) throw Error(ErrorCode::kParamsMismatch, "key uses other parameters");
  return ctx;
}

PublicKey ReadPublicKey(ByteSpan bytes, const ContextPtr& bind) {
  ByteReader r(bytes, ErrorCode::kMalformedFile);
  ExpectMagic(r, kPublicKeyMagic, "public key");
  ContextPtr ctx = BindContext(r, bind);
  Polynomial b, a;
  ReadPolynomial(r, ctx->modulus(), ctx->degree(), b);
  ReadPolynomial(r, ctx->modulus(), ctx->degree(), a);
  if (!r.done()) r.Fail("trailing bytes after public key");
  return PublicKey(ctx, std::move(b), std::move(a));
}

SecretKey ReadSecretKey(ByteSpan bytes, const ContextPtr& bind) {
  ByteReader r(bytes, ErrorCode::kMalformedFile);
  ExpectMagic(r, kSecretKeyMagic, "secret key");
  ContextPtr ctx = BindContext(r, bind);
  Polynomial s;
  ReadPolynomial(r, ctx->modulus(), ctx->degree(), s);
  if (!r.done()) r.Fail("trailing bytes after secret key");
  return SecretKey(ctx, std::move(s));
}

}  // namespace

Bytes SerializePublicKey(const PublicKey& pk) {
  Bytes out;
  ByteWriter w(&out);
  w.PutBytes(kPublicKeyMagic);
  WriteParamsBlock(w, pk.context()->params());
  w.PutU64Array(pk.b().coeffs);
  w.PutU64Array(pk.a().coeffs);
  return out;
}

Bytes SerializeSecretKey(const SecretKey& sk) {
  Bytes out;
  ByteWriter w(&out);
  w.PutBytes(kSecretKeyMagic);
  WriteParamsBlock(w, sk.context()->params());
  w.PutU64Array(sk.s().coeffs);
  return out;
}

PublicKey DeserializePublicKey(ByteSpan bytes) { return ReadPublicKey(bytes, nullptr); }
SecretKey DeserializeSecretKey(ByteSpan bytes) { return ReadSecretKey(bytes, nullptr); }
PublicKey DeserializePublicKey(ByteSpan bytes, const ContextPtr& ctx) {
  return ReadPublicKey(bytes, ctx);
}
SecretKey DeserializeSecretKey(ByteSpan bytes, const ContextPtr& ctx) {
  return ReadSecretKey(bytes, ctx);
}

}  // namespace frag::he
