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

#include "frag/federation/wire.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "frag/he/serialize.hpp"

namespace frag::fed {

namespace {

void RequireType(const Frame& frame, MsgType want, const char* what) {
  if (frame.type != want) {
    throw Error(ErrorCode::kMalformedFrame,
                std::string("expected ") + what + " frame, got type " +
                    std::to_string(static_cast<int>(frame.type)));
  }
}

void RequireDone(const ByteReader& r) {
  if (!r.done()) r.Fail("trailing bytes in payload");
}

bool KnownType(std::uint8_t t) { return t >= 0x01 && t <= 0x05; }

}  // namespace

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kLocalScore:
      return "LOCAL_SCORE";
    case Mode::kShareSplit:
      return "SHARE_SPLIT";
  }
  return "UNKNOWN";
}

Mode ParseMode(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  if (upper == "LOCAL_SCORE" || upper == "LOCAL") return Mode::kLocalScore;
  if (upper == "SHARE_SPLIT" || upper == "SPLIT") return Mode::kShareSplit;
  throw Error(ErrorCode::kUnknownMode, "unknown mode '" + name + "'");
}

QueryId RandomQueryId(Rng& rng) {
  QueryId qid{};
  for (int half = 0; half < 2; ++half) {
    const std::uint64_t v = rng.NextU64();
    for (int i = 0; i < 8; ++i) qid[half * 8 + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  return qid;
}

std::string ToHex(const QueryId& qid) {
  std::string out;
  char buf[3];
  for (std::uint8_t b : qid) {
    std::snprintf(buf, sizeof(buf), "%02x", b);
    out += buf;
  }
  return out;
}

Bytes EncodeFrame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayload) {
    throw Error(ErrorCode::kMalformedFrame, "payload exceeds frame limit");
  }
  Bytes out;
  out.reserve(kFrameHeader + frame.payload.size());
  ByteWriter w(&out);
  w.PutU32Be(static_cast<std::uint32_t>(frame.payload.size()));
  w.PutU8(static_cast<std::uint8_t>(frame.type));
  w.PutBytes(frame.payload);
  return out;
}

std::uint32_t PayloadLength(ByteSpan header) {
  ByteReader r(header, ErrorCode::kMalformedFrame);
  const std::uint32_t length = r.GetU32Be();
  const std::uint8_t type = r.GetU8();
  if (!KnownType(type)) r.Fail("unknown message type " + std::to_string(type));
  if (length > kMaxPayload) r.Fail("payload length " + std::to_string(length) + " over limit");
  return length;
}

Frame DecodeFrame(ByteSpan bytes) {
  ByteReader r(bytes, ErrorCode::kMalformedFrame);
  const std::uint32_t length = PayloadLength(r.Peek(kFrameHeader));
  r.GetBytes(4);
  Frame frame;
  frame.type = static_cast<MsgType>(r.GetU8());
  const ByteSpan payload = r.GetBytes(length);
  frame.payload.assign(payload.begin(), payload.end());
  RequireDone(r);
  return frame;
}

Frame Encode(const Hello& msg) {
  Frame f{MsgType::kHello, {}};
  ByteWriter(&f.payload).PutBytes(msg.params_id);
  return f;
}

Frame Encode(const QueryEnvelope& msg) {
  Frame f{MsgType::kQuery, {}};
  ByteWriter w(&f.payload);
  w.PutBytes(msg.qid);
  w.PutU8(static_cast<std::uint8_t>(msg.mode));
  w.PutU32(msg.k);
  w.PutU32(static_cast<std::uint32_t>(msg.enc_query.size()));
  for (const he::Ciphertext& ct : msg.enc_query) he::WriteCiphertextFrame(w, ct);
  return f;
}

Frame Encode(const PartialMsg& msg) {
  Frame f{MsgType::kPartial, {}};
  ByteWriter w(&f.payload);
  w.PutBytes(msg.qid);
  w.PutU16(msg.node_id);
  w.PutU32(static_cast<std::uint32_t>(msg.size()));
  if (msg.mode == Mode::kLocalScore) {
    for (const vecdb::EncryptedScore& s : msg.scores) {
      w.PutU64(s.record_id);
      he::WriteCiphertextFrame(w, s.score);
    }
  } else {
    for (const sharing::PartialResult& p : msg.partials) {
      w.PutU64(p.record_id);
      sharing::WriteShareFrame(w, sharing::CipherShare{p.party, p.share_count, p.value, p.commitment});
    }
  }
  return f;
}

Frame Encode(const AggregateMsg& msg) {
  Frame f{MsgType::kAggregate, {}};
  ByteWriter w(&f.payload);
  w.PutBytes(msg.qid);
  w.PutU32(static_cast<std::uint32_t>(msg.combined.size()));
  for (const vecdb::EncryptedScore& s : msg.combined) {
    w.PutU64(s.record_id);
    he::WriteCiphertextFrame(w, s.score);
  }
  return f;
}

Frame Encode(const ErrorMsg& msg) {
  Frame f{MsgType::kError, {}};
  ByteWriter w(&f.payload);
  w.PutU16(static_cast<std::uint16_t>(msg.code));
  w.PutString(msg.message);
  return f;
}

ErrorMsg ToErrorMsg(const Error& e) { return ErrorMsg{e.code(), e.message()}; }

Hello DecodeHello(const Frame& frame) {
  RequireType(frame, MsgType::kHello, "HELLO");
  ByteReader r(frame.payload, ErrorCode::kMalformedFrame);
  Hello msg{r.GetArray<32>()};
  RequireDone(r);
  return msg;
}

QueryEnvelope DecodeQuery(const Frame& frame, const he::ContextPtr& ctx) {
  RequireType(frame, MsgType::kQuery, "QUERY");
  ByteReader r(frame.payload, ErrorCode::kMalformedFrame);
  QueryEnvelope msg;
  msg.qid = r.GetArray<16>();
  const std::uint8_t mode = r.GetU8();
  if (mode != static_cast<std::uint8_t>(Mode::kLocalScore) &&
      mode != static_cast<std::uint8_t>(Mode::kShareSplit)) {
    throw Error(ErrorCode::kUnknownMode, "query mode byte " + std::to_string(mode));
  }
  msg.mode = static_cast<Mode>(mode);
  msg.k = r.GetU32();
  const std::uint32_t m = r.GetU32();
  if (r.remaining() / he::CiphertextFrameSize(ctx->degree(), 1) < m) {
    r.Fail("query dimension " + std::to_string(m) + " exceeds payload");
  }
  msg.enc_query.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    msg.enc_query.push_back(he::ReadCiphertextFrame(r, ctx));
    if (msg.enc_query.back().degree() != 1) r.Fail("query elements must be degree 1");
  }
  RequireDone(r);
  return msg;
}

PartialMsg DecodePartial(const Frame& frame, const he::ContextPtr& ctx, Mode mode) {
  RequireType(frame, MsgType::kPartial, "PARTIAL");
  ByteReader r(frame.payload, ErrorCode::kMalformedFrame);
  PartialMsg msg;
  msg.mode = mode;
  msg.qid = r.GetArray<16>();
  msg.node_id = r.GetU16();
  const std::uint32_t count = r.GetU32();
  if (r.remaining() / (8 + he::CiphertextFrameSize(ctx->degree(), 1)) < count) {
    r.Fail("entry count " + std::to_string(count) + " exceeds payload");
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t record_id = r.GetU64();
    if (mode == Mode::kLocalScore) {
      msg.scores.push_back(vecdb::EncryptedScore{record_id, he::ReadCiphertextFrame(r, ctx)});
    } else {
      sharing::CipherShare s = sharing::ReadShareFrame(r, ctx);
      msg.partials.push_back(sharing::PartialResult{s.party, s.share_count, record_id,
                                                    std::move(s.body), s.commitment});
    }
  }
  RequireDone(r);
  return msg;
}

AggregateMsg DecodeAggregate(const Frame& frame, const he::ContextPtr& ctx) {
  RequireType(frame, MsgType::kAggregate, "AGGREGATE");
  ByteReader r(frame.payload, ErrorCode::kMalformedFrame);
  AggregateMsg msg;
  msg.qid = r.GetArray<16>();
  const std::uint32_t count = r.GetU32();
  if (r.remaining() / (8 + he::CiphertextFrameSize(ctx->degree(), 1)) < count) {
    r.Fail("entry count " + std::to_string(count) + " exceeds payload");
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint64_t record_id = r.GetU64();
    msg.combined.push_back(vecdb::EncryptedScore{record_id, he::ReadCiphertextFrame(r, ctx)});
  }
  RequireDone(r);
  return msg;
}

ErrorMsg DecodeError(const Frame& frame) {
  RequireType(frame, MsgType::kError, "ERROR");
  ByteReader r(frame.payload, ErrorCode::kMalformedFrame);
  ErrorMsg msg;
  msg.code = static_cast<ErrorCode>(r.GetU16());
  const ByteSpan text = r.GetBytes(r.remaining());
  msg.message.assign(text.begin(), text.end());
  return msg;
}

void RaiseIfError(const Frame& frame) {
  if (frame.type != MsgType::kError) return;
  const ErrorMsg e = DecodeError(frame);
  throw Error(e.code, e.message);
}

}  // namespace frag::fed
