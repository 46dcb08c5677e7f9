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

#include "frag/sharing/sharing.hpp"

#include <map>
#include <string>
#include <utility>

#include "frag/common/error.hpp"
#include "frag/he/cipher.hpp"

namespace frag::sharing {

namespace {

bool WellFormedPolys(const he::Ciphertext& ct, int degree) {
  if (!ct.valid() || ct.degree() != degree || ct.scale_exp() < 1) return false;
  const std::size_t n = ct.context()->degree();
  const std::uint64_t q = ct.context()->modulus().value();
  for (const he::Polynomial& p : ct.polys()) {
    if (p.size() != n) return false;
    for (std::uint64_t c : p.coeffs) {
      if (c >= q) return false;
    }
  }
  return true;
}

}  // namespace

Digest Commit(const he::Ciphertext& ct) { return Sha256(he::SerializeCiphertext(ct)); }

Digest RecordCommitment(std::span<const Digest> element_commitments) {
  Bytes buf;
  buf.reserve(element_commitments.size() * 32);
  for (const Digest& d : element_commitments) buf.insert(buf.end(), d.begin(), d.end());
  return Sha256(buf);
}

std::vector<CipherShare> Split(const he::Ciphertext& ct, int n, Rng& rng) {
  if (n < 1 || n > 65535) {
    throw Error(ErrorCode::kInvalidShareCount, "share count " + std::to_string(n));
  }
  if (!ct.valid() || ct.degree() != 1) {
    throw Error(ErrorCode::kDepthExceeded, "only degree-1 ciphertexts are split");
  }
  const he::Context& ctx = *ct.context();
  const he::Modulus& q = ctx.modulus();
  const Digest commitment = Commit(ct);

  std::vector<CipherShare> shares;
  shares.reserve(n);
  std::vector<he::Polynomial> residual = ct.polys();
  for (int j = 1; j < n; ++j) {
    std::vector<he::Polynomial> polys(residual.size(), he::Polynomial(ctx.degree()));
    for (std::size_t k = 0; k < polys.size(); ++k) {
      for (std::uint64_t& c : polys[k].coeffs) c = rng.UniformBelow(q.value());
      he::SubInPlace(q, residual[k], polys[k]);
    }
    shares.push_back(CipherShare{static_cast<std::uint16_t>(j), static_cast<std::uint16_t>(n),
                                 he::Ciphertext(ct.context(), std::move(polys), ct.scale_exp()),
                                 commitment});
  }
  shares.push_back(CipherShare{static_cast<std::uint16_t>(n), static_cast<std::uint16_t>(n),
                               he::Ciphertext(ct.context(), std::move(residual), ct.scale_exp()),
                               commitment});
  return shares;
}

he::Ciphertext Merge(std::span<const CipherShare> shares) {
  if (shares.empty()) throw Error(ErrorCode::kShareSetIncomplete, "no shares");
  const CipherShare& first = shares.front();
  const std::size_t n = first.share_count;
  if (n == 0 || shares.size() != n) {
    throw Error(ErrorCode::kShareSetIncomplete,
                "have " + std::to_string(shares.size()) + " of " + std::to_string(n) + " shares");
  }
  std::vector<bool> present(n + 1, false);
  for (const CipherShare& s : shares) {
    if (s.commitment != first.commitment) {
      throw Error(ErrorCode::kCommitmentMismatch, "shares commit to different ciphertexts");
    }
    if (s.share_count != n || s.party < 1 || s.party > n || present[s.party]) {
      throw Error(ErrorCode::kShareSetIncomplete, "party set is not 1.." + std::to_string(n));
    }
    if (!WellFormedPolys(s.body, first.body.degree()) || s.body.scale_exp() != first.scale_exp()) {
      throw Error(ErrorCode::kCommitmentMismatch, "share shape differs from committed ciphertext");
    }
    he::RequireSameParams(s.body.params_id(), first.body.params_id());
    present[s.party] = true;
  }
  const he::Modulus& q = first.body.context()->modulus();
  std::vector<he::Polynomial> sum = first.body.polys();
  for (std::size_t i = 1; i < shares.size(); ++i) {
    for (std::size_t k = 0; k < sum.size(); ++k) he::AddInPlace(q, sum[k], shares[i].body.polys()[k]);
  }
  he::Ciphertext merged(first.body.context(), std::move(sum), first.scale_exp());
  if (Commit(merged) != first.commitment) {
    throw Error(ErrorCode::kCommitmentMismatch, "merged ciphertext does not match commitment");
  }
  return merged;
}

bool Verify(const CipherShare& share, const Digest& expected) {
  return share.commitment == expected && share.share_count >= 1 && share.party >= 1 &&
         share.party <= share.share_count && WellFormedPolys(share.body, 1);
}

bool Verify(const PartialResult& partial, const Digest& expected) {
  return partial.commitment == expected && partial.share_count >= 1 && partial.party >= 1 &&
         partial.party <= partial.share_count && WellFormedPolys(partial.value, 2);
}

PartialResult ShareHomOp(const CipherShare& share, const he::Ciphertext& query,
                         std::uint64_t record_id) {
  if (!share.body.valid() || share.body.degree() != 1 || !query.valid() || query.degree() != 1) {
    throw Error(ErrorCode::kDepthExceeded, "share evaluation needs degree-1 operands");
  }
  he::RequireSameParams(share.body.params_id(), query.params_id());
  const he::Context& ctx = *query.context();
  const int scale_exp = share.scale_exp() + query.scale_exp();
  if (scale_exp > ctx.max_scale_exp()) {
    throw Error(ErrorCode::kScaleOverflow, "scale_exp " + std::to_string(scale_exp));
  }
  auto polys = he::TensorPolys(ctx, share.body.polys(), query.polys());
  std::vector<he::Polynomial> out(std::make_move_iterator(polys.begin()),
                                  std::make_move_iterator(polys.end()));
  return PartialResult{share.party, share.share_count, record_id,
                       he::Ciphertext(query.context(), std::move(out), scale_exp),
                       share.commitment};
}

PartialResult ShareDot(std::span<const CipherShare> shares,
                       std::span<const he::PreparedCiphertext> query, std::uint64_t record_id,
                       const Digest& commitment) {
  if (shares.empty() || shares.size() != query.size()) {
    throw Error(ErrorCode::kDimMismatch, std::to_string(shares.size()) + " shares against " +
                                             std::to_string(query.size()) + " query elements");
  }
  const CipherShare& first = shares.front();
  he::TensorAccumulator acc(first.body.context());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const CipherShare& s = shares[i];
    if (s.party != first.party || s.share_count != first.share_count ||
        s.scale_exp() != first.scale_exp() || query[i].scale_exp() != query[0].scale_exp()) {
      throw Error(ErrorCode::kScaleMismatch, "record shares disagree on party or scale");
    }
    acc.Add(s.body, query[i]);
  }
  const int scale_exp = first.scale_exp() + query[0].scale_exp();
  if (scale_exp > first.body.context()->max_scale_exp()) {
    throw Error(ErrorCode::kScaleOverflow, "scale_exp " + std::to_string(scale_exp));
  }
  return PartialResult{first.party, first.share_count, record_id, acc.Finish(scale_exp),
                       commitment};
}

he::Ciphertext AggregatePartials(std::span<const PartialResult> partials) {
  if (partials.empty()) throw Error(ErrorCode::kShareSetIncomplete, "no partial results");
  std::map<Digest, std::vector<const PartialResult*>> groups;
  for (const PartialResult& p : partials) groups[p.commitment].push_back(&p);
  for (const auto& [commitment, members] : groups) {
    const std::size_t n = members.front()->share_count;
    std::vector<bool> present(n + 1, false);
    for (const PartialResult* p : members) {
      if (p->share_count != n || p->party < 1 || p->party > n || present[p->party]) {
        throw Error(ErrorCode::kShareSetIncomplete, "inconsistent party set");
      }
      present[p->party] = true;
    }
    if (members.size() != n) {
      throw Error(ErrorCode::kShareSetIncomplete,
                  std::to_string(members.size()) + " of " + std::to_string(n) + " partials");
    }
  }
  he::Ciphertext acc = partials.front().value;
  for (std::size_t i = 1; i < partials.size(); ++i) he::EvalAddInPlace(acc, partials[i].value);
  return acc;
}

namespace {

template <typename T>
T Recompute(const std::function<T()>& compute, const Digest& expected, int max_retries) {
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    T result = compute();
    if (Verify(result, expected)) return result;
  }
  throw Error(ErrorCode::kCommitmentMismatch,
              "verification failed after " + std::to_string(max_retries) + " retries");
}

}  // namespace

CipherShare RecomputeUntilValid(const std::function<CipherShare()>& compute,
                                const Digest& expected, int max_retries) {
  return Recompute(compute, expected, max_retries);
}

PartialResult RecomputeUntilValid(const std::function<PartialResult()>& compute,
                                  const Digest& expected, int max_retries) {
  return Recompute(compute, expected, max_retries);
}

void WriteShareFrame(ByteWriter& w, const CipherShare& share) {
  w.PutBytes(kShareMagic);
  w.PutBytes(share.commitment);
  w.PutU16(share.share_count);
  w.PutU16(share.party);
  he::WriteCiphertextBody(w, share.body);
}

Bytes SerializeShare(const CipherShare& share) {
  Bytes out;
  ByteWriter w(&out);
  WriteShareFrame(w, share);
  return out;
}

CipherShare ReadShareFrame(ByteReader& r, const he::ContextPtr& ctx) {
  he::ExpectMagic(r, kShareMagic, "share");
  CipherShare s;
  s.commitment = r.GetArray<32>();
  s.share_count = r.GetU16();
  s.party = r.GetU16();
  s.body = he::ReadCiphertextBody(r, ctx);
  return s;
}

CipherShare DeserializeShare(ByteSpan bytes, const he::ContextPtr& ctx) {
  ByteReader r(bytes, ErrorCode::kMalformedFrame);
  CipherShare s = ReadShareFrame(r, ctx);
  if (!r.done()) r.Fail("trailing bytes after share");
  return s;
}

}  // namespace frag::sharing
