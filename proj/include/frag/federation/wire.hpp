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

// Wire protocol of the federated query workflow.
//
// Frame: payload length u32 big-endian | type u8 | payload. Payload integers
// are little-endian.
//
//   HELLO      params_id[32]
//   QUERY      qid[16] | mode u8 | k u32 | m u32 | m ciphertext frames
//   PARTIAL    qid[16] | node_id u16 | count u32 |
//              count * (record_id u64 | entry frame)
//   AGGREGATE  qid[16] | count u32 | count * (record_id u64 | ciphertext frame)
//   ERROR      code u16 | UTF-8 message
//
// PARTIAL entries are ciphertext frames in LOCAL_SCORE mode and share frames
// ("FRAGSH1\0", carrying party, share count and record commitment) in
// SHARE_SPLIT mode.

#ifndef FRAG_FEDERATION_WIRE_HPP_
#define FRAG_FEDERATION_WIRE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "frag/common/bytes.hpp"
#include "frag/common/error.hpp"
#include "frag/common/rng.hpp"
#include "frag/he/ciphertext.hpp"
#include "frag/sharing/sharing.hpp"
#include "frag/vecdb/store.hpp"

namespace frag::fed {

enum class MsgType : std::uint8_t {
  kHello = 0x01,
  kQuery = 0x02,
  kPartial = 0x03,
  kAggregate = 0x04,
  kError = 0x05,
};

enum class Mode : std::uint8_t {
  kLocalScore = 0x01,
  kShareSplit = 0x02,
};

// "LOCAL_SCORE" / "SHARE_SPLIT"; ParseMode raises UNKNOWN_MODE.
std::string ModeName(Mode mode);
Mode ParseMode(const std::string& name);

using QueryId = std::array<std::uint8_t, 16>;
QueryId RandomQueryId(Rng& rng);
std::string ToHex(const QueryId& qid);

// Frames larger than this are rejected as MALFORMED_FRAME.
inline constexpr std::uint32_t kMaxPayload = 1u << 30;
inline constexpr std::size_t kFrameHeader = 5;

struct Frame {
  MsgType type = MsgType::kError;
  Bytes payload;

  bool operator==(const Frame&) const = default;
};

Bytes EncodeFrame(const Frame& frame);
// Whole buffer must be one frame. MALFORMED_FRAME otherwise.
Frame DecodeFrame(ByteSpan bytes);
// Payload length from a 5-byte header; MALFORMED_FRAME for an unknown type
// or an oversize length.
std::uint32_t PayloadLength(ByteSpan header);

struct Hello {
  he::ParamsId params_id{};
};

struct QueryEnvelope {
  QueryId qid{};
  Mode mode = Mode::kLocalScore;
  std::uint32_t k = 0;
  std::vector<he::Ciphertext> enc_query;
};

struct PartialMsg {
  QueryId qid{};
  std::uint16_t node_id = 0;
  Mode mode = Mode::kLocalScore;
  std::vector<vecdb::EncryptedScore> scores;        // LOCAL_SCORE
  std::vector<sharing::PartialResult> partials;     // SHARE_SPLIT

  std::size_t size() const { return mode == Mode::kLocalScore ? scores.size() : partials.size(); }
};

struct AggregateMsg {
  QueryId qid{};
  std::vector<vecdb::EncryptedScore> combined;  // record_id ascending
};

struct ErrorMsg {
  ErrorCode code = ErrorCode::kInternal;
  std::string message;
};

Frame Encode(const Hello& msg);
Frame Encode(const QueryEnvelope& msg);
Frame Encode(const PartialMsg& msg);
Frame Encode(const AggregateMsg& msg);
Frame Encode(const ErrorMsg& msg);
ErrorMsg ToErrorMsg(const Error& e);

// Decoders check the frame type and structure (MALFORMED_FRAME). Ciphertext
// material must match `ctx` (PARAMS_MISMATCH). QUERY raises UNKNOWN_MODE for
// a mode byte outside the two modes.
Hello DecodeHello(const Frame& frame);
QueryEnvelope DecodeQuery(const Frame& frame, const he::ContextPtr& ctx);
// `mode` is the mode of the originating query; every entry must match it.
PartialMsg DecodePartial(const Frame& frame, const he::ContextPtr& ctx, Mode mode);
AggregateMsg DecodeAggregate(const Frame& frame, const he::ContextPtr& ctx);
ErrorMsg DecodeError(const Frame& frame);

// Throws the carried error if `frame` is an ERROR frame.
void RaiseIfError(const Frame& frame);

}  // namespace frag::fed

#endif  // FRAG_FEDERATION_WIRE_HPP_
