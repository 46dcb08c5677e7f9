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

#include "frag/federation/node.hpp"

#include <chrono>
#include <sstream>

namespace frag::fed {

Node::Node(std::uint16_t node_id, he::ContextPtr ctx) : node_id_(node_id), ctx_(std::move(ctx)) {}

void Node::SetStore(vecdb::VectorStore store) {
  if (store.context()->id() != ctx_->id()) {
    throw Error(ErrorCode::kParamsMismatch, "store uses other parameters");
  }
  store_.emplace(store);
}

void Node::SetShareTable(ShareTable table) {
  if (table.ctx->id() != ctx_->id()) {
    throw Error(ErrorCode::kParamsMismatch, "share table uses other parameters");
  }
  table_.emplace(std::move(table));
}

PartialMsg Node::HandleQuery(const QueryEnvelope& env) const {
  for (const he::Ciphertext& ct : env.enc_query) {
    if (!ct.valid() || ct.params_id() != ctx_->id()) {
      throw Error(ErrorCode::kParamsMismatch, "query was encrypted under other parameters");
    }
  }
  PartialMsg out;
  out.qid = env.qid;
  out.node_id = node_id_;
  out.mode = env.mode;
  const auto query = vecdb::PrepareQuery(env.enc_query);
  switch (env.mode) {
    case Mode::kLocalScore:
      if (!store_) throw Error(ErrorCode::kUnknownMode, "node holds no store for LOCAL_SCORE");
      out.scores = vecdb::Scan(*store_, query, threads_);
      return out;
    case Mode::kShareSplit:
      if (!table_) throw Error(ErrorCode::kUnknownMode, "node holds no shares for SHARE_SPLIT");
      out.partials = ShareScan(*table_, query);
      return out;
  }
  throw Error(ErrorCode::kUnknownMode, "mode " + std::to_string(static_cast<int>(env.mode)));
}

Bytes Node::HandleFrame(ByteSpan request) const {
  try {
    const Frame frame = DecodeFrame(request);
    switch (frame.type) {
      case MsgType::kHello: {
        const Hello hello = DecodeHello(frame);
        if (hello.params_id != ctx_->id()) {
          throw Error(ErrorCode::kParamsMismatch, "peer uses other parameters");
        }
        return EncodeFrame(Encode(Hello{ctx_->id()}));
      }
      case MsgType::kQuery: {
        const auto start = std::chrono::steady_clock::now();
        const QueryEnvelope env = DecodeQuery(frame, ctx_);
        const Bytes reply = EncodeFrame(Encode(HandleQuery(env)));
        if (log_) {
          const double ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
          std::ostringstream line;
          line << "qid=" << ToHex(env.qid) << " node=" << node_id_ << " mode=" << ModeName(env.mode)
               << " m=" << env.enc_query.size() << " round=2 in_bytes=" << request.size()
               << " out_bytes=" << reply.size() << " ms=" << ms;
          std::lock_guard<std::mutex> lock(log_mu_);
          log_(line.str());
        }
        return reply;
      }
      default:
        throw Error(ErrorCode::kMalformedFrame, "nodes accept HELLO and QUERY only");
    }
  } catch (const Error& e) {
    return EncodeFrame(Encode(ToErrorMsg(e)));
  } catch (const std::exception& e) {
    return EncodeFrame(Encode(ErrorMsg{ErrorCode::kInternal, e.what()}));
  }
}

std::vector<vecdb::VectorStore> PartitionStore(const vecdb::VectorStore& store, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidConfig, "cannot partition into zero parts");
  std::vector<vecdb::VectorStore> parts;
  parts.reserve(n);
  const std::size_t total = store.size();
  std::size_t next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    vecdb::VectorStore part(store.context(), store.dim());
    const std::size_t end = total * (j + 1) / n;
    for (; next < end; ++next) part.Append(store.records()[next]);
    parts.push_back(std::move(part));
  }
  return parts;
}

std::vector<std::unique_ptr<Node>> MakeNodes(const vecdb::VectorStore& store, std::size_t n,
                                             Rng& rng, bool with_shares) {
  std::vector<vecdb::VectorStore> parts = PartitionStore(store, n);
  std::vector<ShareTable> tables;
  if (with_shares) tables = SplitStore(store, static_cast<int>(n), rng);
  std::vector<std::unique_ptr<Node>> nodes;
  for (std::size_t j = 0; j < n; ++j) {
    auto node = std::make_unique<Node>(static_cast<std::uint16_t>(j + 1), store.context());
    node->SetStore(std::move(parts[j]));
    if (with_shares) node->SetShareTable(std::move(tables[j]));
    nodes.push_back(std::move(node));
  }
  return nodes;
}

}  // namespace frag::fed
