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

#include "frag/federation/transport.hpp"

namespace frag::fed {

void Transport::Unreachable(std::size_t endpoint, const std::string& why) const {
  throw Error(ErrorCode::kNodeUnreachable,
              "node " + std::to_string(endpoint + 1) + " (" + Describe(endpoint) + "): " + why);
}

void Transport::Send(std::size_t endpoint, ByteSpan frame) {
  if (endpoint >= size()) Unreachable(endpoint, "no such endpoint");
  if (tap_) tap_(Direction::kOutbound, endpoint, frame);
  try {
    DoSend(endpoint, frame);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNodeUnreachable) throw;
    Unreachable(endpoint, e.message());
  }
}

Bytes Transport::Receive(std::size_t endpoint) {
  if (endpoint >= size()) Unreachable(endpoint, "no such endpoint");
  Bytes frame;
  try {
    frame = DoReceive(endpoint);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNodeUnreachable) throw;
    Unreachable(endpoint, e.message());
  }
  if (frame.empty()) Unreachable(endpoint, "connection closed");
  if (tap_) tap_(Direction::kInbound, endpoint, frame);
  return frame;
}

InProcessTransport::InProcessTransport(std::vector<Handler> handlers)
    : handlers_(std::move(handlers)),
      reachable_(handlers_.size(), true),
      replies_(handlers_.size()) {}

InProcessTransport::InProcessTransport(const std::vector<const Node*>& nodes)
    : reachable_(nodes.size(), true), replies_(nodes.size()) {
  for (const Node* node : nodes) {
    if (node == nullptr) {
      handlers_.emplace_back();
    } else {
      handlers_.emplace_back([node](ByteSpan request) { return node->HandleFrame(request); });
    }
  }
}

void InProcessTransport::SetReachable(std::size_t endpoint, bool reachable) {
  reachable_.at(endpoint) = reachable;
}

std::string InProcessTransport::Describe(std::size_t endpoint) const {
  return "in-process #" + std::to_string(endpoint + 1);
}

void InProcessTransport::DoSend(std::size_t endpoint, ByteSpan frame) {
  if (!handlers_[endpoint] || !reachable_[endpoint]) {
    throw Error(ErrorCode::kNodeUnreachable, "endpoint is down");
  }
  replies_[endpoint].push_back(handlers_[endpoint](frame));
}

Bytes InProcessTransport::DoReceive(std::size_t endpoint) {
  auto& queue = replies_[endpoint];
  if (queue.empty()) throw Error(ErrorCode::kNodeUnreachable, "no reply pending");
  Bytes reply = std::move(queue.front());
  queue.pop_front();
  return reply;
}

SocketTransport::SocketTransport(std::vector<Address> endpoints, int connect_timeout_ms)
    : endpoints_(std::move(endpoints)),
      connections_(endpoints_.size()),
      timeout_ms_(connect_timeout_ms) {}

std::string SocketTransport::Describe(std::size_t endpoint) const {
  return endpoints_[endpoint].ToString();
}

void SocketTransport::DoSend(std::size_t endpoint, ByteSpan frame) {
  Connection& conn = connections_[endpoint];
  if (!conn.is_open()) conn = Connection::Open(endpoints_[endpoint], timeout_ms_);
  conn.WriteFrame(frame);
}

Bytes SocketTransport::DoReceive(std::size_t endpoint) {
  Connection& conn = connections_[endpoint];
  if (!conn.is_open()) throw Error(ErrorCode::kNodeUnreachable, "not connected");
  Bytes frame = conn.ReadFrame();
  if (frame.empty()) conn.Close();
  return frame;
}

}  // namespace frag::fed
