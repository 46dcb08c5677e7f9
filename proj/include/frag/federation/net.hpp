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

// Blocking TCP helpers for the frame protocol (POSIX sockets).

#ifndef FRAG_FEDERATION_NET_HPP_
#define FRAG_FEDERATION_NET_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "frag/federation/wire.hpp"

namespace frag::fed {

struct Address {
  std::string host;
  std::uint16_t port = 0;

  std::string ToString() const { return host + ":" + std::to_string(port); }
};

// "host:port". USAGE for anything else.
Address ParseAddress(const std::string& text);

// Owns a connected socket.
class Connection {
 public:
  Connection() = default;
  explicit Connection(int fd) : fd_(fd) {}
  ~Connection();
  Connection(Connection&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Connection& operator=(Connection&& o) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  // NODE_UNREACHABLE if the peer cannot be reached.
  static Connection Open(const Address& address, int timeout_ms = 10000);

  bool is_open() const { return fd_ >= 0; }
  // Raw encoded frames. Failures raise NODE_UNREACHABLE; a clean EOF before
  // a header makes ReadFrame return an empty buffer.
  void WriteFrame(ByteSpan frame);
  Bytes ReadFrame();
  void Close();

 private:
  int fd_ = -1;
};

// Accepts connections and answers each request frame with `handler(frame)`.
// One thread per connection; requests on a connection are handled in order.
class FrameServer {
 public:
  using Handler = std::function<Bytes(ByteSpan request)>;

  // BIND_FAILURE if the address cannot be bound. Port 0 picks a free port.
  FrameServer(const Address& address, Handler handler);
  ~FrameServer();
  FrameServer(const FrameServer&) = delete;
  FrameServer& operator=(const FrameServer&) = delete;

  std::uint16_t port() const { return port_; }

  // Accept loop on a background thread / on the calling thread.
  void Start();
  void Run();
  void Stop();

 private:
  void Accept();

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  Handler handler_;
  std::atomic<bool> stop_{false};
  std::thread acceptor_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
  std::vector<int> client_fds_;
};

}  // namespace frag::fed

#endif  // FRAG_FEDERATION_NET_HPP_
