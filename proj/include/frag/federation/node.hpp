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

#ifndef FRAG_FEDERATION_NODE_HPP_
#define FRAG_FEDERATION_NODE_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "frag/federation/share_table.hpp"
#include "frag/federation/wire.hpp"
#include "frag/vecdb/store.hpp"

namespace frag::fed {

// A federation member. It holds a local store (LOCAL_SCORE), a share table
// (SHARE_SPLIT), or both, and answers QUERY frames with PARTIAL frames.
class Node {
 public:
  Node(std::uint16_t node_id, he::ContextPtr ctx);

  // Both keep only an NTT-domain copy; the argument is released on return.
  // The parameters must match the node's (PARAMS_MISMATCH).
  void SetStore(vecdb::VectorStore store);
  void SetShareTable(ShareTable table);
  void set_threads(int threads) { threads_ = threads; }

  std::uint16_t id() const { return node_id_; }
  const he::ContextPtr& context() const { return ctx_; }
  bool has_store() const { return store_.has_value(); }
  bool has_share_table() const { return table_.has_value(); }

  // LOCAL_SCORE scans the store; SHARE_SPLIT evaluates every held share.
  // PARAMS_MISMATCH for foreign ciphertexts; UNKNOWN_MODE when the node
  // holds nothing for the requested mode; DIM_MISMATCH.
  PartialMsg HandleQuery(const QueryEnvelope& env) const;

  // HELLO -> HELLO (or ERROR PARAMS_MISMATCH), QUERY -> PARTIAL. Every
  // failure becomes an ERROR frame; this never throws.
  Bytes HandleFrame(ByteSpan request) const;

  // Called once per answered QUERY with a one-line summary.
  void set_log(std::function<void(const std::string&)> log) { log_ = std::move(log); }

 private:
  std::uint16_t node_id_;
  he::ContextPtr ctx_;
  std::optional<vecdb::PreparedStore> store_;
  std::optional<PreparedShareTable> table_;
  int threads_ = 1;
  std::function<void(const std::string&)> log_;
  mutable std::mutex log_mu_;
};

// Splits a store into n contiguous, nearly equal parts for LOCAL_SCORE
// nodes. Record order is preserved.
std::vector<vecdb::VectorStore> PartitionStore(const vecdb::VectorStore& store, std::size_t n);

// Nodes 1..n over one logical corpus: node j holds part j of
// PartitionStore and, with `with_shares`, party j's table from SplitStore.
std::vector<std::unique_ptr<Node>> MakeNodes(const vecdb::VectorStore& store, std::size_t n,
                                             Rng& rng, bool with_shares = true);

}  // namespace frag::fed

#endif  // FRAG_FEDERATION_NODE_HPP_
