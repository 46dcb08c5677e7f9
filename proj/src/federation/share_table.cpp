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

#include "frag/federation/share_table.hpp"

#include <string>
#include <utility>

#include "frag/common/error.hpp"
#include "frag/he/serialize.hpp"
#include "frag/mc/pivot_cache.hpp"

namespace frag::fed {

bool ShareTable::operator==(const ShareTable& o) const {
  return ctx->id() == o.ctx->id() && dim == o.dim && share_count == o.share_count &&
         party == o.party && records == o.records;
}

std::vector<ShareTable> SplitStore(const vecdb::VectorStore& store, int n, Rng& rng) {
  if (n < 1 || n > 65535) {
    throw Error(ErrorCode::kInvalidShareCount, "share count " + std::to_string(n));
  }
  std::vector<ShareTable> tables(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    tables[j] = ShareTable{store.context(), store.dim(), static_cast<std::uint16_t>(n),
                           static_cast<std::uint16_t>(j + 1), {}};
    tables[j].records.reserve(store.size());
  }
  for (const vecdb::VectorRecord& record : store.records()) {
    std::vector<ShareRecord> per_party(static_cast<std::size_t>(n));
    std::vector<Digest> commitments;
    commitments.reserve(record.dim());
    for (const he::Ciphertext& elem : record.elems) {
      const he::Ciphertext ct = record.delta == 1.0 ? elem : mc::Normalize(elem, record.delta);
      std::vector<sharing::CipherShare> shares = sharing::Split(ct, n, rng);
      commitments.push_back(shares.front().commitment);
      for (int j = 0; j < n; ++j) per_party[j].elems.push_back(std::move(shares[j]));
    }
    const Digest rc = sharing::RecordCommitment(commitments);
    for (int j = 0; j < n; ++j) {
      per_party[j].id = record.id;
      per_party[j].commitment = rc;
      tables[j].records.push_back(std::move(per_party[j]));
    }
  }
  return tables;
}

std::vector<sharing::PartialResult> ShareScan(const ShareTable& table,
                                              std::span<const he::PreparedCiphertext> query) {
  if (query.size() != table.dim) {
    throw Error(ErrorCode::kDimMismatch, "query has " + std::to_string(query.size()) +
                                             " elements, share table dimension is " +
                                             std::to_string(table.dim));
  }
  std::vector<sharing::PartialResult> out;
  out.reserve(table.records.size());
  for (const ShareRecord& record : table.records) {
    out.push_back(sharing::ShareDot(record.elems, query, record.id, record.commitment));
  }
  return out;
}

PreparedShareTable::PreparedShareTable(ShareTable table)
    : ctx_(table.ctx), dim_(table.dim), party_(table.party), share_count_(table.share_count) {
  records_.reserve(table.records.size());
  bool first = true;
  for (ShareRecord& record : table.records) {
    Record& p = records_.emplace_back();
    p.id = record.id;
    p.commitment = record.commitment;
    p.elems.reserve(record.elems.size());
    for (const sharing::CipherShare& s : record.elems) {
      if (first) {
        party_ = s.party;
        share_count_ = s.share_count;
        scale_exp_ = s.scale_exp();
        first = false;
      } else if (s.party != party_ || s.share_count != share_count_ || s.scale_exp() != scale_exp_) {
        throw Error(ErrorCode::kScaleMismatch, "record " + std::to_string(record.id) +
                                                   ": shares disagree on party or scale");
      }
      p.elems.emplace_back(s.body);
    }
    std::vector<sharing::CipherShare>().swap(record.elems);
  }
}

std::vector<sharing::PartialResult> ShareScan(const PreparedShareTable& table,
                                              std::span<const he::PreparedCiphertext> query) {
  if (query.size() != table.dim()) {
    throw Error(ErrorCode::kDimMismatch, "query has " + std::to_string(query.size()) +
                                             " elements, share table dimension is " +
                                             std::to_string(table.dim()));
  }
  std::vector<sharing::PartialResult> out;
  if (table.records().empty()) return out;
  if (query.empty()) throw Error(ErrorCode::kDimMismatch, "empty query");
  for (const he::PreparedCiphertext& q : query) {
    if (q.scale_exp() != query.front().scale_exp()) {
      throw Error(ErrorCode::kScaleMismatch, "record shares disagree on party or scale");
    }
  }
  const int scale_exp = table.scale_exp() + query.front().scale_exp();
  if (scale_exp > table.context()->max_scale_exp()) {
    throw Error(ErrorCode::kScaleOverflow, "scale_exp " + std::to_string(scale_exp));
  }
  out.reserve(table.records().size());
  he::TensorAccumulator acc(table.context());
  for (const auto& record : table.records()) {
    for (std::size_t i = 0; i < record.elems.size(); ++i) acc.Add(record.elems[i], query[i]);
    out.push_back(sharing::PartialResult{table.party(), table.share_count(), record.id,
                                         acc.Finish(scale_exp), record.commitment});
  }
  return out;
}

Bytes SerializeShareTable(const ShareTable& table) {
  Bytes out;
  ByteWriter w(&out);
  w.PutBytes(kShareTableMagic);
  w.PutU16(kShareTableVersion);
  w.PutBytes(table.ctx->id());
  w.PutU32(table.dim);
  w.PutU16(table.share_count);
  w.PutU16(table.party);
  w.PutU64(table.records.size());
  for (const ShareRecord& record : table.records) {
    w.PutU64(record.id);
    w.PutBytes(record.commitment);
    for (const sharing::CipherShare& s : record.elems) sharing::WriteShareFrame(w, s);
  }
  return out;
}

ShareTable DeserializeShareTable(ByteSpan bytes, const he::ContextPtr& ctx) {
  ByteReader r(bytes, ErrorCode::kMalformedFile);
  he::ExpectMagic(r, kShareTableMagic, "share table");
  const std::uint16_t version = r.GetU16();
  if (version != kShareTableVersion) {
    throw Error(ErrorCode::kMalformedFile, "unsupported share table version " +
                                               std::to_string(version));
  }
  if (r.GetArray<32>() != ctx->id()) {
    throw Error(ErrorCode::kParamsMismatch, "share table was written under other parameters");
  }
  ShareTable table;
  table.ctx = ctx;
  table.dim = r.GetU32();
  table.share_count = r.GetU16();
  table.party = r.GetU16();
  if (table.party < 1 || table.party > table.share_count) {
    r.Fail("party " + std::to_string(table.party) + " of " + std::to_string(table.share_count));
  }
  const std::uint64_t count = r.GetU64();
  const std::size_t per_record = 40 + table.dim * (44 + he::CiphertextBodySize(ctx->degree(), 1));
  if (count != 0 && r.remaining() / count < per_record) r.Fail("record count exceeds file size");
  table.records.reserve(count);
  try {
    for (std::uint64_t i = 0; i < count; ++i) {
      ShareRecord record;
      record.id = r.GetU64();
      record.commitment = r.GetArray<32>();
      for (std::uint32_t e = 0; e < table.dim; ++e) {
        sharing::CipherShare s = sharing::ReadShareFrame(r, ctx);
        if (s.party != table.party || s.share_count != table.share_count || s.body.degree() != 1) {
          r.Fail("share does not belong to this table");
        }
        record.elems.push_back(std::move(s));
      }
      table.records.push_back(std::move(record));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParamsMismatch) throw;
    throw Error(ErrorCode::kMalformedFile, e.message());
  }
  if (!r.done()) r.Fail("trailing bytes after share table");
  return table;
}

void SaveShareTable(const ShareTable& table, const std::string& path) {
  WriteFile(path, SerializeShareTable(table));
}

ShareTable LoadShareTable(const std::string& path, const he::ContextPtr& ctx) {
  return DeserializeShareTable(ReadFile(path), ctx);
}

}  // namespace frag::fed
