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

// Binary layouts (all integers little-endian):
//
//   ciphertext frame  "FRAGCT1\0" | body
//   body              params_id[32] | degree u8 | scale_exp u8 | N u32 |
//                     (degree + 1) * N coefficients u64
//   key file          "FRAGPK1\0" / "FRAGSK1\0" | params_id[32] | N u32 |
//                     q u64 | sigma f64 | scale_bits u32 | polynomials

#ifndef FRAG_HE_SERIALIZE_HPP_
#define FRAG_HE_SERIALIZE_HPP_

#include <array>
#include <cstddef>
#include <string_view>

#include "frag/common/bytes.hpp"
#include "frag/he/ciphertext.hpp"
#include "frag/he/keys.hpp"

namespace frag::he {

using Magic = std::array<std::uint8_t, 8>;

constexpr Magic MakeMagic(std::string_view s) {
  Magic m{};
  for (std::size_t i = 0; i < 8 && i < s.size(); ++i) m[i] = static_cast<std::uint8_t>(s[i]);
  return m;
}

inline constexpr Magic kCiphertextMagic = MakeMagic("FRAGCT1");
inline constexpr Magic kPublicKeyMagic = MakeMagic("FRAGPK1");
inline constexpr Magic kSecretKeyMagic = MakeMagic("FRAGSK1");

// Size in bytes of a full frame (with magic) / body for the given shape.
std::size_t CiphertextBodySize(std::size_t degree, int ct_degree);
std::size_t CiphertextFrameSize(std::size_t degree, int ct_degree);

void WriteCiphertextBody(ByteWriter& w, const Ciphertext& ct);
void WriteCiphertextFrame(ByteWriter& w, const Ciphertext& ct);
Bytes SerializeCiphertext(const Ciphertext& ct);

// Readers check magic, shape and coefficient range (MALFORMED_FRAME) and the
// parameter digest against `ctx` (PARAMS_MISMATCH).
Ciphertext ReadCiphertextBody(ByteReader& r, const ContextPtr& ctx);
Ciphertext ReadCiphertextFrame(ByteReader& r, const ContextPtr& ctx);
// Whole buffer must be exactly one frame.
Ciphertext DeserializeCiphertext(ByteSpan bytes, const ContextPtr& ctx);

// Throws `error` unless the next eight bytes equal `magic`.
void ExpectMagic(ByteReader& r, const Magic& magic, std::string_view what);

void WriteParamsBlock(ByteWriter& w, const CipherParams& params);
CipherParams ReadParamsBlock(ByteReader& r);

Bytes SerializePublicKey(const PublicKey& pk);
Bytes SerializeSecretKey(const SecretKey& sk);
// Rebuild the context from the embedded parameter block.
PublicKey DeserializePublicKey(ByteSpan bytes);
SecretKey DeserializeSecretKey(ByteSpan bytes);
// Variants that bind to an existing context (PARAMS_MISMATCH otherwise).
PublicKey DeserializePublicKey(ByteSpan bytes, const ContextPtr& ctx);
SecretKey DeserializeSecretKey(ByteSpan bytes, const ContextPtr& ctx);

}  // namespace frag::he

#endif  // FRAG_HE_SERIALIZE_HPP_
