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

// Query workflow: distribution (round 1), per-node partials (round 2),
// aggregation, and client-side decryption with top-k selection.

#ifndef FRAG_FEDERATION_COORDINATOR_HPP_
#define FRAG_FEDERATION_COORDINATOR_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "frag/federation/transport.hpp"
#include "frag/federation/wire.hpp"
#include "frag/he/keys.hpp"

namespace frag::fed {

enum class TransportKind : std::uint8_t { kInProcess, kSocket };

struct FederationConfig {
  std::vector<std::string> nodes;  // host:port for sockets, labels otherwise
  Mode mode = Mode::kLocalScore;
  std::uint32_t k = 10;
  TransportKind transport = TransportKind::kInProcess;
  // Empty: the querying client aggregates. Otherwise the address of a
  // standalone aggregator that fans the query out on the client's behalf.
  std::string aggregator;

  std::size_t n() const { return nodes.size(); }
  // INVALID_CONFIG unless n >= 1 and k >= 1.
  void Validate() const;
};

struct MessageRecord {
  int round = 0;
  MsgType type = MsgType::kQuery;
  std::size_t node = 0;
  std::size_t bytes = 0;  // whole frame
};

struct RoundLog {
  QueryId qid{};
  Mode mode = Mode::kLocalScore;
  std::size_t n = 0;
  std::size_t m = 0;
  int rounds = 0;
  std::uint64_t messages_sent = 0;
  std::vector<MessageRecord> messages;
  bool closed = false;

  // Appends a message; opening a later round bumps `rounds`. CONTRACT_VIOLATION
  // once the log is closed or for a round that goes backwards.
  void Record(int round, MsgType type, std::size_t node, std::size_t bytes);
  void Close() { closed = true; }
};

// aggregate: LOCAL_SCORE concatenates, SHARE_SPLIT combines the complete
// party set of every record. Output is sorted by record_id.
// DUPLICATE_PARTIAL (a node twice, or a record reported by two nodes in
// LOCAL_SCORE), SHARE_SET_INCOMPLETE (a node or party missing),
// COMMITMENT_MISMATCH (parties disagree on a record's commitment).
AggregateMsg Aggregate(std::span<const PartialMsg> partials, std::size_t n, Mode mode);

// Collects partials per query from concurrent producers. Complete() is the
// exclusive step that turns them into one AggregateMsg.
class Aggregator {
 public:
  Aggregator(std::size_t n, Mode mode) : n_(n), mode_(mode) {}

  // DUPLICATE_PARTIAL if this node already reported for the query.
  void Submit(PartialMsg partial);
  std::size_t pending(const QueryId& qid) const;
  // Aggregates and forgets the query; SHARE_SET_INCOMPLETE if it is unknown.
  AggregateMsg Complete(const QueryId& qid);

 private:
  std::size_t n_;
  Mode mode_;
  mutable std::mutex mu_;
  std::map<QueryId, std::vector<PartialMsg>> partials_;
};

// Fans an envelope out to every node and aggregates the replies. Used by
// the querying client and by a standalone aggregator.
class Coordinator {
 public:
  Coordinator(std::unique_ptr<Transport> transport, he::ContextPtr ctx);

  // Round 1 sends QUERY to all nodes; round 2 collects one PARTIAL from
  // each. Fails fast with NODE_UNREACHABLE naming the node; a node's ERROR
  // reply is rethrown with its code.
  AggregateMsg Run(const QueryEnvelope& env, RoundLog* log);

  Transport& transport() { return *transport_; }
  std::size_t n() const { return transport_->size(); }

  // Test hook: after the partials, ping every node once more (a third
  // round) so the audit has something to reject.
  void set_inject_extra_round(bool on) { inject_extra_round_ = on; }

 private:
  AggregateMsg RunOnce(const QueryEnvelope& env, RoundLog* log);

  std::unique_ptr<Transport> transport_;
  he::ContextPtr ctx_;
  bool inject_extra_round_ = false;
};

class Client {
 public:
  // With cfg.aggregator set, `transport` must reach that single endpoint.
  Client(FederationConfig cfg, std::unique_ptr<Transport> transport, he::PublicKey pk);

  // submit_query: encrypts q element-wise and runs the query. DIM_MISMATCH
  // when cfg knows the dimension (set_dim) and q differs;
  // PLAINTEXT_OUT_OF_RANGE outside [-1, 1]; NODE_UNREACHABLE.
  QueryId SubmitQuery(std::span<const double> q, Rng& rng);
  // Same with an already encrypted query.
  QueryId SubmitEncrypted(std::vector<he::Ciphertext> enc_query, Rng& rng);

  // The combined response of a submitted query.
  const AggregateMsg& Aggregate(const QueryId& qid) const;
  // Round log of a query aggregated here (absent behind a standalone
  // aggregator, which keeps its own).
  const RoundLog* log(const QueryId& qid) const;
  // Drops the stored response and log of a finished query.
  void Forget(const QueryId& qid);

  void set_dim(std::size_t dim) { dim_ = dim; }
  Coordinator* coordinator() { return coordinator_.get(); }

 private:
  FederationConfig cfg_;
  he::PublicKey pk_;
  std::unique_ptr<Coordinator> coordinator_;
  std::unique_ptr<Transport> relay_;
  std::size_t dim_ = 0;
  std::map<QueryId, AggregateMsg> results_;
  std::map<QueryId, RoundLog> logs_;
};

struct Hit {
  std::uint64_t record_id = 0;
  double score = 0;
};

// Decrypts every score, sorts descending with ties to the lower id, returns
// the first min(k, total). PARAMS_MISMATCH for foreign ciphertexts.
std::vector<Hit> ClientFinalize(const AggregateMsg& agg, const he::SecretKey& sk, std::size_t k);

struct AuditReport {
  int rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t expected_messages = 0;
  std::size_t query_payload_bytes = 0;
  std::size_t expected_query_payload_bytes = 0;
  std::string csv;  // header plus one row
};

inline constexpr const char* kAuditCsvHeader =
    "qid,mode,n,m,rounds,messages,expected_messages,query_payload_bytes,"
    "expected_query_payload_bytes";

// Checks rounds == 2, messages == 2n, every QUERY payload exactly
// 25 + m * (ciphertext frame size), and one PARTIAL per node. Raises
// CONTRACT_VIOLATION naming the violated bound.
AuditReport AuditComplexity(const RoundLog& log, std::size_t m, std::size_t n, Mode mode,
                            const he::Context& ctx);

// Standalone aggregator role: answers a client's QUERY with an AGGREGATE
// after running the workflow against the nodes, and HELLO like a node.
class AggregatorService {
 public:
  AggregatorService(std::unique_ptr<Transport> nodes, he::ContextPtr ctx);

  Bytes HandleFrame(ByteSpan request);
  void set_log(std::function<void(const std::string&)> log) { log_ = std::move(log); }

 private:
  std::mutex mu_;  // one query at a time over the shared node connections
  Coordinator coordinator_;
  he::ContextPtr ctx_;
  std::function<void(const std::string&)> log_;
};

}  // namespace frag::fed

#endif  // FRAG_FEDERATION_COORDINATOR_HPP_
