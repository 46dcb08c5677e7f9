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

#ifndef FRAG_FEDERATION_TRANSPORT_HPP_
#define FRAG_FEDERATION_TRANSPORT_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "frag/federation/net.hpp"
#include "frag/federation/node.hpp"

namespace frag::fed {

// Request/response frame delivery to a fixed list of endpoints. Endpoints
// are numbered from 0 in configuration order; messages name them from 1.
class Transport {
 public:
  enum class Direction { kOutbound, kInbound };
  // Sees every encoded frame that crosses the transport.
  using Tap = std::function<void(Direction, std::size_t endpoint, ByteSpan frame)>;

  virtual ~Transport() = default;

  virtual std::size_t size() const = 0;
  virtual std::string Describe(std::size_t endpoint) const = 0;

  // NODE_UNREACHABLE naming the endpoint on any delivery failure.
  void Send(std::size_t endpoint, ByteSpan frame);
  Bytes Receive(std::size_t endpoint);

  // Drops pending replies and connection state, e.g. after a failed query.
  virtual void Reset(std::size_t endpoint) = 0;

  void set_tap(Tap tap) { tap_ = std::move(tap); }

 protected:
  virtual void DoSend(std::size_t endpoint, ByteSpan frame) = 0;
  virtual Bytes DoReceive(std::size_t endpoint) = 0;

 private:
  [[noreturn]] void Unreachable(std::size_t endpoint, const std::string& why) const;

  Tap tap_;
};

// Delivers frames by direct calls. An endpoint without a handler, or one
// switched off, is unreachable.
class InProcessTransport : public Transport {
 public:
  using Handler = std::function<Bytes(ByteSpan request)>;

  explicit InProcessTransport(std::vector<Handler> handlers);
  explicit InProcessTransport(const std::vector<const Node*>& nodes);

  void SetReachable(std::size_t endpoint, bool reachable);

  std::size_t size() const override { return handlers_.size(); }
  std::string Describe(std::size_t endpoint) const override;
  void Reset(std::size_t endpoint) override { replies_.at(endpoint).clear(); }

 protected:
  void DoSend(std::size_t endpoint, ByteSpan frame) override;
  Bytes DoReceive(std::size_t endpoint) override;

 private:
  std::vector<Handler> handlers_;
  std::vector<bool> reachable_;
  std::vector<std::deque<Bytes>> replies_;
};

// One TCP connection per endpoint, opened on first use and kept.
class SocketTransport : public Transport {
 public:
  explicit SocketTransport(std::vector<Address> endpoints, int connect_timeout_ms = 10000);

  std::size_t size() const override { return endpoints_.size(); }
  std::string Describe(std::size_t endpoint) const override;
  void Reset(std::size_t endpoint) override { connections_.at(endpoint).Close(); }

 protected:
  void DoSend(std::size_t endpoint, ByteSpan frame) override;
  Bytes DoReceive(std::size_t endpoint) override;

 private:
  std::vector<Address> endpoints_;
  std::vector<Connection> connections_;
  int timeout_ms_;
};

}  // namespace frag::fed

#endif  // FRAG_FEDERATION_TRANSPORT_HPP_
