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

// One party's share of every record of a store, for SHARE_SPLIT serving.
//
// Share-table file (little-endian):
//   "FRAGSHT1" | version u16 | params_id[32] | dim u32 | n u16 | party u16 |
//   count u64 | records: id u64 | record commitment[32] | dim share frames

#ifndef FRAG_FEDERATION_SHARE_TABLE_HPP_
#define FRAG_FEDERATION_SHARE_TABLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "frag/common/rng.hpp"
#include "frag/he/tensor.hpp"
#include "frag/sharing/sharing.hpp"
#include "frag/vecdb/store.hpp"

namespace frag::fed {

inline constexpr he::Magic kShareTableMagic = he::MakeMagic("FRAGSHT1");
inline constexpr std::uint16_t kShareTableVersion = 1;

struct ShareRecord {
  std::uint64_t id = 0;
  Digest commitment{};  // RecordCommitment over the element commitments
  std::vector<sharing::CipherShare> elems;

  bool operator==(const ShareRecord&) const = default;
};

struct ShareTable {
  he::ContextPtr ctx;
  std::uint32_t dim = 0;
  std::uint16_t share_count = 0;
  std::uint16_t party = 0;
  std::vector<ShareRecord> records;

  bool operator==(const ShareTable& o) const;
};

// Splits every element into n shares; table j - 1 holds party j's shares.
// Elements of a record with delta != 1 are normalized before splitting.
std::vector<ShareTable> SplitStore(const vecdb::VectorStore& store, int n, Rng& rng);

// Party-local partial for every record, in table order. DIM_MISMATCH if the
// query length differs from the table dimension.
std::vector<sharing::PartialResult> ShareScan(const ShareTable& table,
                                              std::span<const he::PreparedCiphertext> query);

// A party's table with every share already in the NTT domain. Partials are
// coefficient-identical to ShareScan over the source table.
class PreparedShareTable {
 public:
  struct Record {
    std::uint64_t id = 0;
    Digest commitment{};
    std::vector<he::TransformedPair> elems;
  };

  // SCALE_MISMATCH if the shares disagree on party, share count or scale.
  // Source shares are released record by record as they are transformed.
  explicit PreparedShareTable(ShareTable table);

  const he::ContextPtr& context() const { return ctx_; }
  std::uint32_t dim() const { return dim_; }
  std::uint16_t party() const { return party_; }
  std::uint16_t share_count() const { return share_count_; }
  int scale_exp() const { return scale_exp_; }
  const std::vector<Record>& records() const { return records_; }

 private:
  he::ContextPtr ctx_;
  std::uint32_t dim_ = 0;
  std::uint16_t party_ = 0;
  std::uint16_t share_count_ = 0;
  int scale_exp_ = 1;
  std::vector<Record> records_;
};

std::vector<sharing::PartialResult> ShareScan(const PreparedShareTable& table,
                                              std::span<const he::PreparedCiphertext> query);

Bytes SerializeShareTable(const ShareTable& table);
// MALFORMED_FILE / PARAMS_MISMATCH as for stores.
ShareTable DeserializeShareTable(ByteSpan bytes, const he::ContextPtr& ctx);
void SaveShareTable(const ShareTable& table, const std::string& path);
ShareTable LoadShareTable(const std::string& path, const he::ContextPtr& ctx);

}  // namespace frag::fed

#endif  // FRAG_FEDERATION_SHARE_TABLE_HPP_
