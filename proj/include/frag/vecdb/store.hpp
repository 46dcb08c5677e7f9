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

// Per-node encrypted vector store with exhaustive inner-product scoring.
//
// Store file (little-endian):
//   "FRAGVDB1" | version u16 | params_id[32] | dim u32 | count u64 |
//   records: id u64 | delta f64 | dim ciphertext frames

#ifndef FRAG_VECDB_STORE_HPP_
#define FRAG_VECDB_STORE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "frag/common/bytes.hpp"
#include "frag/common/rng.hpp"
#include "frag/he/cipher.hpp"
#include "frag/he/serialize.hpp"
#include "frag/he/tensor.hpp"
#include "frag/mc/pivot_cache.hpp"

namespace frag::vecdb {

inline constexpr he::Magic kStoreMagic = he::MakeMagic("FRAGVDB1");
inline constexpr std::uint16_t kStoreVersion = 1;

// Plaintext input row. Elements are stored as encryptions of value * delta.
struct PlainVector {
  std::uint64_t id = 0;
  std::vector<double> values;
  double delta = 1.0;
};

struct VectorRecord {
  std::uint64_t id = 0;
  double delta = 1.0;
  std::vector<he::Ciphertext> elems;

  std::size_t dim() const { return elems.size(); }
  bool operator==(const VectorRecord&) const = default;
};

struct EncryptedScore {
  std::uint64_t record_id = 0;
  he::Ciphertext score;  // degree 2

  int scale_exp() const { return score.scale_exp(); }
};

class VectorStore {
 public:
  VectorStore(he::ContextPtr ctx, std::uint32_t dim);

  const he::ContextPtr& context() const { return ctx_; }
  std::uint32_t dim() const { return dim_; }
  const std::vector<VectorRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool contains(std::uint64_t id) const { return ids_.contains(id); }

  // DUPLICATE_ID, DIM_MISMATCH, PARAMS_MISMATCH; DEPTH_EXCEEDED for an
  // element that is not degree 1, SCALE_MISMATCH across elements.
  void Append(VectorRecord record);

  bool operator==(const VectorStore& o) const;

 private:
  he::ContextPtr ctx_;
  std::uint32_t dim_;
  std::vector<VectorRecord> records_;
  std::unordered_set<std::uint64_t> ids_;
};

// Encrypts every element with cache->Enc when a cache is given, otherwise
// with a fresh encryption drawing from `rng` (thread-local entropy if null).
// Errors name the offending row (0-based): DIM_MISMATCH, DUPLICATE_ID,
// PLAINTEXT_OUT_OF_RANGE for values outside [-1, 1], and the cache's
// REPRESENTATION_OVERFLOW.
VectorStore Ingest(std::span<const PlainVector> rows, const he::PublicKey& pk,
                   mc::PivotCache* cache = nullptr, Rng* rng = nullptr);
// Empty input needs the dimension explicitly.
VectorStore Ingest(std::span<const PlainVector> rows, std::uint32_t dim,
                   const he::PublicKey& pk, mc::PivotCache* cache = nullptr,
                   Rng* rng = nullptr);

// Query elements prepared once for many records. DEPTH_EXCEEDED unless every
// element is degree 1; PARAMS_MISMATCH across parameter sets.
std::vector<he::PreparedCiphertext> PrepareQuery(std::span<const he::Ciphertext> query);

// sum_i elems[i] * query[i]; elements of a record with delta != 1 are first
// normalized by 1/delta. DIM_MISMATCH, DEPTH_EXCEEDED, SCALE_OVERFLOW.
EncryptedScore Score(const VectorRecord& record, std::span<const he::Ciphertext> query);
EncryptedScore Score(const VectorRecord& record,
                     std::span<const he::PreparedCiphertext> query);

// One score per record in record order. Disjoint record ranges are scored
// on up to `threads` workers; the output order does not depend on it.
std::vector<EncryptedScore> Scan(const VectorStore& store,
                                 std::span<const he::Ciphertext> query, int threads = 1);
std::vector<EncryptedScore> Scan(const VectorStore& store,
                                 std::span<const he::PreparedCiphertext> query,
                                 int threads = 1);

// A store with every element already in the NTT domain, so a scan costs
// pointwise products and one inverse transform per record. Elements of a
// record with delta != 1 are normalized before the transform. Scores are
// coefficient-identical to scanning the source store.
struct PreparedRecord {
  std::uint64_t id = 0;
  int scale_exp = 1;
  std::vector<he::TransformedPair> elems;
};

class PreparedStore {
 public:
  explicit PreparedStore(const VectorStore& store);

  const he::ContextPtr& context() const { return ctx_; }
  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<PreparedRecord>& records() const { return records_; }

 private:
  he::ContextPtr ctx_;
  std::uint32_t dim_;
  std::vector<PreparedRecord> records_;
};

std::vector<EncryptedScore> Scan(const PreparedStore& store,
                                 std::span<const he::PreparedCiphertext> query,
                                 int threads = 1);

Bytes Serialize(const VectorStore& store);
// MALFORMED_FILE for bad magic, version or shape; PARAMS_MISMATCH if the
// store was written under other parameters.
VectorStore Deserialize(ByteSpan bytes, const he::ContextPtr& ctx);

// IO_ERROR when the file cannot be written or read.
void Save(const VectorStore& store, const std::string& path);
VectorStore Load(const std::string& path, const he::ContextPtr& ctx);

}  // namespace frag::vecdb

#endif  // FRAG_VECDB_STORE_HPP_
