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

#include "frag/federation/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "frag/he/cipher.hpp"
#include "frag/he/serialize.hpp"

namespace frag::fed {

namespace {

Error Violation(const std::string& what) { return Error(ErrorCode::kContractViolation, what); }

}  // namespace

void FederationConfig::Validate() const {
  if (nodes.empty()) throw Error(ErrorCode::kInvalidConfig, "federation needs at least one node");
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "k must be at least 1");
}

void RoundLog::Record(int round, MsgType type, std::size_t node, std::size_t bytes) {
  if (closed) throw Violation("message recorded after the query completed");
  if (round < rounds) throw Violation("round " + std::to_string(round) + " after round " +
                                      std::to_string(rounds));
  rounds = round;
  ++messages_sent;
  messages.push_back(MessageRecord{round, type, node, bytes});
}

AggregateMsg Aggregate(std::span<const PartialMsg> partials, std::size_t n, Mode mode) {
  if (partials.empty()) throw Error(ErrorCode::kShareSetIncomplete, "no partials");
  const QueryId qid = partials.front().qid;
  std::set<std::uint16_t> nodes;
  for (const PartialMsg& p : partials) {
    if (p.qid != qid) throw Error(ErrorCode::kMalformedFrame, "partials belong to different queries");
    if (p.mode != mode) throw Error(ErrorCode::kUnknownMode, "partial in the wrong mode");
    if (!nodes.insert(p.node_id).second) {
      throw Error(ErrorCode::kDuplicatePartial, "node " + std::to_string(p.node_id) +
                                                    " reported twice");
    }
  }
  if (partials.size() < n) {
    throw Error(ErrorCode::kShareSetIncomplete, "partials from " + std::to_string(partials.size()) +
                                                    " of " + std::to_string(n) + " nodes");
  }
  if (partials.size() > n) {
    throw Error(ErrorCode::kDuplicatePartial, std::to_string(partials.size()) +
                                                  " partials for " + std::to_string(n) + " nodes");
  }

  AggregateMsg out;
  out.qid = qid;
  if (mode == Mode::kLocalScore) {
    std::map<std::uint64_t, const vecdb::EncryptedScore*> by_id;
    for (const PartialMsg& p : partials) {
      for (const vecdb::EncryptedScore& s : p.scores) {
        if (!by_id.emplace(s.record_id, &s).second) {
          throw Error(ErrorCode::kDuplicatePartial,
                      "record " + std::to_string(s.record_id) + " reported twice");
        }
      }
    }
    out.combined.reserve(by_id.size());
    for (const auto& [id, s] : by_id) out.combined.push_back(*s);
    return out;
  }

  std::map<std::uint64_t, std::vector<sharing::PartialResult>> by_id;
  for (const PartialMsg& p : partials) {
    for (const sharing::PartialResult& r : p.partials) by_id[r.record_id].push_back(r);
  }
  out.combined.reserve(by_id.size());
  for (auto& [id, group] : by_id) {
    const Digest& commitment = group.front().commitment;
    for (const sharing::PartialResult& r : group) {
      if (!sharing::Verify(r, commitment)) {
        throw Error(ErrorCode::kCommitmentMismatch,
                    "parties disagree on record " + std::to_string(id));
      }
    }
    if (group.size() != n || group.front().share_count != n) {
      throw Error(ErrorCode::kShareSetIncomplete,
                  "record " + std::to_string(id) + " has " + std::to_string(group.size()) +
                      " of " + std::to_string(n) + " partials");
    }
    out.combined.push_back(vecdb::EncryptedScore{id, sharing::AggregatePartials(group)});
  }
  return out;
}

void Aggregator::Submit(PartialMsg partial) {
  std::lock_guard<std::mutex> lock(mu_);
  auto& list = partials_[partial.qid];
  for (const PartialMsg& p : list) {
    if (p.node_id == partial.node_id) {
      throw Error(ErrorCode::kDuplicatePartial, "node " + std::to_string(partial.node_id) +
                                                    " already reported for query " +
                                                    ToHex(partial.qid));
    }
  }
  list.push_back(std::move(partial));
}

std::size_t Aggregator::pending(const QueryId& qid) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = partials_.find(qid);
  return it == partials_.end() ? 0 : it->second.size();
}

AggregateMsg Aggregator::Complete(const QueryId& qid) {
  std::vector<PartialMsg> list;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = partials_.find(qid);
    if (it == partials_.end()) {
      throw Error(ErrorCode::kShareSetIncomplete, "no partials for query " + ToHex(qid));
    }
    list = std::move(it->second);
    partials_.erase(it);
  }
  return Aggregate(list, n_, mode_);
}

Coordinator::Coordinator(std::unique_ptr<Transport> transport, he::ContextPtr ctx)
    : transport_(std::move(transport)), ctx_(std::move(ctx)) {}

AggregateMsg Coordinator::Run(const QueryEnvelope& env, RoundLog* log) {
  try {
    return RunOnce(env, log);
  } catch (...) {
    // Fail fast, and leave no stale replies behind for the next query.
    for (std::size_t i = 0; i < n(); ++i) transport_->Reset(i);
    throw;
  }
}

AggregateMsg Coordinator::RunOnce(const QueryEnvelope& env, RoundLog* log) {
  RoundLog local;
  RoundLog& rl = log != nullptr ? *log : local;
  rl = RoundLog{};
  rl.qid = env.qid;
  rl.mode = env.mode;
  rl.n = n();
  rl.m = env.enc_query.size();

  const Bytes query = EncodeFrame(Encode(env));
  for (std::size_t i = 0; i < n(); ++i) {
    transport_->Send(i, query);
    rl.Record(1, MsgType::kQuery, i, query.size());
  }
  Aggregator aggregator(n(), env.mode);
  for (std::size_t i = 0; i < n(); ++i) {
    const Bytes reply = transport_->Receive(i);
    const Frame frame = DecodeFrame(reply);
    rl.Record(2, frame.type, i, reply.size());
    try {
      RaiseIfError(frame);
    } catch (const Error& e) {
      throw Error(e.code(), "node " + std::to_string(i + 1) + " (" + transport_->Describe(i) +
                                "): " + e.message());
    }
    PartialMsg partial = DecodePartial(frame, ctx_, env.mode);
    if (partial.qid != env.qid) {
      throw Error(ErrorCode::kMalformedFrame, "node " + std::to_string(i + 1) +
                                                  " answered another query");
    }
    aggregator.Submit(std::move(partial));
  }
  if (inject_extra_round_) {
    const Bytes hello = EncodeFrame(Encode(Hello{ctx_->id()}));
    for (std::size_t i = 0; i < n(); ++i) {
      transport_->Send(i, hello);
      rl.Record(3, MsgType::kHello, i, hello.size());
      const Bytes reply = transport_->Receive(i);
      rl.Record(3, DecodeFrame(reply).type, i, reply.size());
    }
  }
  rl.Close();
  return aggregator.Complete(env.qid);
}

Client::Client(FederationConfig cfg, std::unique_ptr<Transport> transport, he::PublicKey pk)
    : cfg_(std::move(cfg)), pk_(std::move(pk)) {
  cfg_.Validate();
  if (cfg_.aggregator.empty()) {
    if (transport->size() != cfg_.n()) {
      throw Error(ErrorCode::kInvalidConfig, "transport reaches " +
                                                 std::to_string(transport->size()) + " of " +
                                                 std::to_string(cfg_.n()) + " nodes");
    }
    coordinator_ = std::make_unique<Coordinator>(std::move(transport), pk_.context());
  } else {
    if (transport->size() != 1) {
      throw Error(ErrorCode::kInvalidConfig, "aggregator transport needs one endpoint");
    }
    relay_ = std::move(transport);
  }
}

QueryId Client::SubmitQuery(std::span<const double> q, Rng& rng) {
  if (dim_ != 0 && q.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "query has " + std::to_string(q.size()) +
                                             " values, federation dimension is " +
                                             std::to_string(dim_));
  }
  std::vector<he::Ciphertext> enc;
  enc.reserve(q.size());
  for (double x : q) {
    if (!(std::fabs(x) <= 1.0)) {
      throw Error(ErrorCode::kPlaintextOutOfRange, "query value " + std::to_string(x) +
                                                       " outside [-1, 1]");
    }
    enc.push_back(he::Encrypt(x, pk_, rng));
  }
  return SubmitEncrypted(std::move(enc), rng);
}

QueryId Client::SubmitEncrypted(std::vector<he::Ciphertext> enc_query, Rng& rng) {
  QueryEnvelope env;
  env.qid = RandomQueryId(rng);
  env.mode = cfg_.mode;
  env.k = cfg_.k;
  env.enc_query = std::move(enc_query);
  if (coordinator_) {
    RoundLog log;
    results_[env.qid] = coordinator_->Run(env, &log);
    logs_[env.qid] = std::move(log);
    return env.qid;
  }
  relay_->Send(0, EncodeFrame(Encode(env)));
  const Frame reply = DecodeFrame(relay_->Receive(0));
  RaiseIfError(reply);
  AggregateMsg agg = DecodeAggregate(reply, pk_.context());
  if (agg.qid != env.qid) throw Error(ErrorCode::kMalformedFrame, "aggregate for another query");
  results_[env.qid] = std::move(agg);
  return env.qid;
}

const AggregateMsg& Client::Aggregate(const QueryId& qid) const {
  const auto it = results_.find(qid);
  if (it == results_.end()) throw Error(ErrorCode::kShareSetIncomplete, "unknown query " + ToHex(qid));
  return it->second;
}

const RoundLog* Client::log(const QueryId& qid) const {
  const auto it = logs_.find(qid);
  return it == logs_.end() ? nullptr : &it->second;
}

void Client::Forget(const QueryId& qid) {
  results_.erase(qid);
  logs_.erase(qid);
}

std::vector<Hit> ClientFinalize(const AggregateMsg& agg, const he::SecretKey& sk, std::size_t k) {
  std::vector<Hit> hits;
  hits.reserve(agg.combined.size());
  for (const vecdb::EncryptedScore& s : agg.combined) {
    hits.push_back(Hit{s.record_id, he::Decrypt(s.score, sk)});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.record_id < b.record_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

AuditReport AuditComplexity(const RoundLog& log, std::size_t m, std::size_t n, Mode mode,
                            const he::Context& ctx) {
  AuditReport report;
  report.rounds = log.rounds;
  report.messages = log.messages_sent;
  report.expected_messages = 2 * n;
  report.expected_query_payload_bytes = 25 + m * he::CiphertextFrameSize(ctx.degree(), 1);
  std::ostringstream csv;
  csv << kAuditCsvHeader << "\n";

  if (!log.closed) throw Violation("query has not completed");
  if (log.mode != mode || log.n != n || log.m != m) {
    throw Violation("log describes another query shape");
  }
  if (log.rounds != 2) {
    throw Violation("rounds = " + std::to_string(log.rounds) + ", expected 2");
  }
  if (log.messages_sent != 2 * n) {
    throw Violation("messages = " + std::to_string(log.messages_sent) + ", expected 2n = " +
                    std::to_string(2 * n));
  }
  std::vector<int> queries(n, 0), partials(n, 0);
  for (const MessageRecord& msg : log.messages) {
    if (msg.node >= n) throw Violation("message to unknown node " + std::to_string(msg.node));
    if (msg.type == MsgType::kQuery && msg.round == 1) {
      ++queries[msg.node];
      report.query_payload_bytes = msg.bytes - kFrameHeader;
      if (report.query_payload_bytes != report.expected_query_payload_bytes) {
        throw Violation("query payload " + std::to_string(report.query_payload_bytes) +
                        " bytes, expected 25 + m * frame = " +
                        std::to_string(report.expected_query_payload_bytes));
      }
    } else if (msg.type == MsgType::kPartial && msg.round == 2) {
      ++partials[msg.node];
    } else {
      throw Violation("unexpected message type " + std::to_string(static_cast<int>(msg.type)) +
                      " in round " + std::to_string(msg.round));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (queries[i] != 1 || partials[i] != 1) {
      throw Violation("node " + std::to_string(i + 1) + " saw " + std::to_string(queries[i]) +
                      " queries and " + std::to_string(partials[i]) + " partials");
    }
  }
  csv << ToHex(log.qid) << "," << ModeName(mode) << "," << n << "," << m << "," << report.rounds
      << "," << report.messages << "," << report.expected_messages << ","
      << report.query_payload_bytes << "," << report.expected_query_payload_bytes << "\n";
  report.csv = csv.str();
  return report;
}

AggregatorService::AggregatorService(std::unique_ptr<Transport> nodes, he::ContextPtr ctx)
    : coordinator_(std::move(nodes), ctx), ctx_(std::move(ctx)) {}

Bytes AggregatorService::HandleFrame(ByteSpan request) {
  try {
    const Frame frame = DecodeFrame(request);
    if (frame.type == MsgType::kHello) {
      if (DecodeHello(frame).params_id != ctx_->id()) {
        throw Error(ErrorCode::kParamsMismatch, "peer uses other parameters");
      }
      return EncodeFrame(Encode(Hello{ctx_->id()}));
    }
    if (frame.type != MsgType::kQuery) {
      throw Error(ErrorCode::kMalformedFrame, "aggregator accepts HELLO and QUERY only");
    }
    const QueryEnvelope env = DecodeQuery(frame, ctx_);
    std::lock_guard<std::mutex> lock(mu_);
    RoundLog log;
    const AggregateMsg agg = coordinator_.Run(env, &log);
    if (log_) {
      std::string line = "qid=" + ToHex(env.qid) + " mode=" + ModeName(env.mode) +
                         " n=" + std::to_string(log.n) + " m=" + std::to_string(log.m) +
                         " rounds=" + std::to_string(log.rounds) +
                         " messages=" + std::to_string(log.messages_sent) +
                         " records=" + std::to_string(agg.combined.size());
      try {
        AuditComplexity(log, log.m, log.n, env.mode, *ctx_);
        line += " audit=ok";
      } catch (const Error& e) {
        line += " audit=" + e.message();
      }
      log_(line);
    }
    return EncodeFrame(Encode(agg));
  } catch (const Error& e) {
    return EncodeFrame(Encode(ToErrorMsg(e)));
  } catch (const std::exception& e) {
    return EncodeFrame(Encode(ErrorMsg{ErrorCode::kInternal, e.what()}));
  }
}

}  // namespace frag::fed
