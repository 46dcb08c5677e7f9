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

// Additive n-way sharing of ciphertexts and share-level evaluation.
//
// Shares live in the ciphertext coefficient space: shares 1..n-1 are uniform
// polynomials and share n is the residual, so the coefficient-wise sum of all
// shares is the original ciphertext. Because the tensor product is bilinear,
// the partial products of all shares with a query ciphertext sum to the
// product of the whole ciphertext with that query.
//
// Share frame:  "FRAGSH1\0" | commitment[32] | n u16 | j u16 | ciphertext body

#ifndef FRAG_SHARING_SHARING_HPP_
#define FRAG_SHARING_SHARING_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "frag/common/bytes.hpp"
#include "frag/common/digest.hpp"
#include "frag/common/rng.hpp"
#include "frag/he/ciphertext.hpp"
#include "frag/he/serialize.hpp"
#include "frag/he/tensor.hpp"

namespace frag::sharing {

inline constexpr he::Magic kShareMagic = he::MakeMagic("FRAGSH1");

struct CipherShare {
  std::uint16_t party = 0;        // j in [1, n]
  std::uint16_t share_count = 0;  // n
  // Share polynomials with the source ciphertext's context and scale_exp.
  he::Ciphertext body;
  Digest commitment{};

  int scale_exp() const { return body.scale_exp(); }
  bool operator==(const CipherShare&) const = default;
};

struct PartialResult {
  std::uint16_t party = 0;
  std::uint16_t share_count = 0;
  std::uint64_t record_id = 0;
  he::Ciphertext value;  // degree 2
  Digest commitment{};
};

// SHA-256 of the canonical ciphertext frame.
Digest Commit(const he::Ciphertext& ct);

// INVALID_SHARE_COUNT unless 1 <= n <= 65535; DEPTH_EXCEEDED unless degree 1.
std::vector<CipherShare> Split(const he::Ciphertext& ct, int n, Rng& rng);

// SHARE_SET_INCOMPLETE if parties are missing, duplicated or disagree on n;
// COMMITMENT_MISMATCH if commitments disagree or the merged ciphertext does
// not hash to the commitment.
he::Ciphertext Merge(std::span<const CipherShare> shares);

// Commitment equality plus structural checks. Never throws.
bool Verify(const CipherShare& share, const Digest& expected);
bool Verify(const PartialResult& partial, const Digest& expected);

// Tensor of the share's polynomials with a degree-1 query ciphertext.
// DEPTH_EXCEEDED unless both are degree 1.
PartialResult ShareHomOp(const CipherShare& share, const he::Ciphertext& query,
                         std::uint64_t record_id = 0);

// Party-local inner product: sum_i ShareHomOp(shares[i], query[i]) evaluated
// in one NTT-domain accumulation. The result carries `commitment`.
PartialResult ShareDot(std::span<const CipherShare> shares,
                       std::span<const he::PreparedCiphertext> query,
                       std::uint64_t record_id, const Digest& commitment);

// Sums all partials. Partials are grouped by commitment; every group must
// hold parties 1..n exactly once (SHARE_SET_INCOMPLETE), and all values must
// agree on scale_exp (SCALE_MISMATCH).
he::Ciphertext AggregatePartials(std::span<const PartialResult> partials);

// Commitment of a multi-element record: SHA-256 over the element commitments.
Digest RecordCommitment(std::span<const Digest> element_commitments);

// Runs `compute` until Verify accepts its result, retrying at most
// `max_retries` times, then throws COMMITMENT_MISMATCH.
inline constexpr int kMaxRecomputeRetries = 3;
CipherShare RecomputeUntilValid(const std::function<CipherShare()>& compute,
                                const Digest& expected,
                                int max_retries = kMaxRecomputeRetries);
PartialResult RecomputeUntilValid(const std::function<PartialResult()>& compute,
                                  const Digest& expected,
                                  int max_retries = kMaxRecomputeRetries);

void WriteShareFrame(ByteWriter& w, const CipherShare& share);
Bytes SerializeShare(const CipherShare& share);
// MALFORMED_FRAME / PARAMS_MISMATCH as for ciphertext frames.
CipherShare ReadShareFrame(ByteReader& r, const he::ContextPtr& ctx);
CipherShare DeserializeShare(ByteSpan bytes, const he::ContextPtr& ctx);

}  // namespace frag::sharing

#endif  // FRAG_SHARING_SHARING_HPP_
