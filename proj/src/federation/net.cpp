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

#include "frag/federation/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace frag::fed {

namespace {

std::string Errno() { return std::strerror(errno); }

// Resolves `address` and hands every candidate to `fn` until it returns a
// descriptor. Returns -1 when none worked; `why` holds the last failure.
int ForEachAddress(const Address& address, bool passive, std::string& why,
                   const std::function<int(const addrinfo&)>& fn) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* list = nullptr;
  const std::string port = std::to_string(address.port);
  const int rc = getaddrinfo(address.host.empty() ? nullptr : address.host.c_str(), port.c_str(),
                             &hints, &list);
  if (rc != 0) {
    why = gai_strerror(rc);
    return -1;
  }
  int fd = -1;
  for (addrinfo* ai = list; ai != nullptr && fd < 0; ai = ai->ai_next) fd = fn(*ai);
  if (fd < 0 && why.empty()) why = Errno();
  freeaddrinfo(list);
  return fd;
}

void ReadExact(int fd, std::uint8_t* out, std::size_t n, bool* eof_at_start) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, out + got, n - got, 0);
    if (r == 0) {
      if (got == 0 && eof_at_start != nullptr) {
        *eof_at_start = true;
        return;
      }
      throw Error(ErrorCode::kNodeUnreachable, "connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kNodeUnreachable, "recv failed: " + Errno());
    }
    got += static_cast<std::size_t>(r);
  }
}

}  // namespace

Address ParseAddress(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size()) {
    throw Error(ErrorCode::kUsage, "address '" + text + "' is not host:port");
  }
  Address a;
  a.host = text.substr(0, colon);
  if (a.host.size() >= 2 && a.host.front() == '[' && a.host.back() == ']') {
    a.host = a.host.substr(1, a.host.size() - 2);
  }
  const std::string port = text.substr(colon + 1);
  unsigned long value = 0;
  try {
    std::size_t used = 0;
    value = std::stoul(port, &used);
    if (used != port.size()) throw std::invalid_argument(port);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kUsage, "bad port in '" + text + "'");
  }
  if (value > 65535) throw Error(ErrorCode::kUsage, "bad port in '" + text + "'");
  a.port = static_cast<std::uint16_t>(value);
  return a;
}

Connection::~Connection() { Close(); }

Connection& Connection::operator=(Connection&& o) noexcept {
  if (this != &o) {
    Close();
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

void Connection::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Connection Connection::Open(const Address& address, int timeout_ms) {
  std::string why;
  const int fd = ForEachAddress(address, false, why, [&](const addrinfo& ai) {
    const int s = ::socket(ai.ai_family, ai.ai_socktype, ai.ai_protocol);
    if (s < 0) return -1;
    timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
    ::setsockopt(s, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    if (::connect(s, ai.ai_addr, ai.ai_addrlen) != 0) {
      why = Errno();
      ::close(s);
      return -1;
    }
    const int one = 1;
    ::setsockopt(s, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return s;
  });
  if (fd < 0) {
    throw Error(ErrorCode::kNodeUnreachable, address.ToString() + ": " + why);
  }
  return Connection(fd);
}

void Connection::WriteFrame(ByteSpan frame) {
  if (fd_ < 0) throw Error(ErrorCode::kNodeUnreachable, "connection is closed");
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t w = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kNodeUnreachable, "send failed: " + Errno());
    }
    sent += static_cast<std::size_t>(w);
  }
}

Bytes Connection::ReadFrame() {
  if (fd_ < 0) throw Error(ErrorCode::kNodeUnreachable, "connection is closed");
  Bytes frame(kFrameHeader);
  bool eof = false;
  ReadExact(fd_, frame.data(), kFrameHeader, &eof);
  if (eof) return {};
  const std::uint32_t length = PayloadLength(frame);
  frame.resize(kFrameHeader + length);
  ReadExact(fd_, frame.data() + kFrameHeader, length, nullptr);
  return frame;
}

FrameServer::FrameServer(const Address& address, Handler handler) : handler_(std::move(handler)) {
  std::string why;
  listen_fd_ = ForEachAddress(address, true, why, [&](const addrinfo& ai) {
    const int s = ::socket(ai.ai_family, ai.ai_socktype, ai.ai_protocol);
    if (s < 0) return -1;
    if (::bind(s, ai.ai_addr, ai.ai_addrlen) != 0 || ::listen(s, 64) != 0) {
      why = Errno();
      ::close(s);
      return -1;
    }
    return s;
  });
  if (listen_fd_ < 0) {
    throw Error(ErrorCode::kBindFailure, "cannot listen on " + address.ToString() + ": " + why);
  }
  sockaddr_storage bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = bound.ss_family == AF_INET6
              ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
              : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
}

FrameServer::~FrameServer() {
  Stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void FrameServer::Start() {
  acceptor_ = std::thread([this] { Accept(); });
}

void FrameServer::Run() { Accept(); }

void FrameServer::Stop() {
  stop_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mu_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (std::thread& t : workers) t.join();
}

void FrameServer::Accept() {
  while (!stop_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard<std::mutex> lock(workers_mu_);
    if (stop_) {
      ::close(fd);
      break;
    }
    client_fds_.push_back(fd);
    workers_.emplace_back([this, fd] {
      Connection conn(fd);
      try {
        while (!stop_) {
          Bytes request = conn.ReadFrame();
          if (request.empty()) break;
          conn.WriteFrame(handler_(request));
        }
      } catch (const Error& e) {
        // Unreadable header: answer once, then drop the connection.
        if (e.code() == ErrorCode::kMalformedFrame) {
          try {
            conn.WriteFrame(EncodeFrame(Encode(ToErrorMsg(e))));
          } catch (const Error&) {
          }
        }
      }
      std::lock_guard<std::mutex> inner(workers_mu_);
      std::erase(client_fds_, fd);
    });
  }
}

}  // namespace frag::fed
