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

#include <openssl/evp.h>
#include <sys/stat.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "frag/common/bytes.hpp"
#include "frag/common/digest.hpp"
#include "frag/common/error.hpp"
#include "frag/common/rng.hpp"

namespace frag {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "INVALID_PARAMS";
    case ErrorCode::kPlaintextOutOfRange: return "PLAINTEXT_OUT_OF_RANGE";
    case ErrorCode::kDegreeUnsupported: return "DEGREE_UNSUPPORTED";
    case ErrorCode::kParamsMismatch: return "PARAMS_MISMATCH";
    case ErrorCode::kScaleMismatch: return "SCALE_MISMATCH";
    case ErrorCode::kDegreeMismatch: return "DEGREE_MISMATCH";
    case ErrorCode::kDepthExceeded: return "DEPTH_EXCEEDED";
    case ErrorCode::kMalformedFrame: return "MALFORMED_FRAME";
    case ErrorCode::kInvalidShareCount: return "INVALID_SHARE_COUNT";
    case ErrorCode::kShareSetIncomplete: return "SHARE_SET_INCOMPLETE";
    case ErrorCode::kCommitmentMismatch: return "COMMITMENT_MISMATCH";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kRepresentationOverflow: return "REPRESENTATION_OVERFLOW";
    case ErrorCode::kZeroPoolEmpty: return "ZERO_POOL_EMPTY";
    case ErrorCode::kDivideByZeroScale: return "DIVIDE_BY_ZERO_SCALE";
    case ErrorCode::kDuplicateId: return "DUPLICATE_ID";
    case ErrorCode::kDimMismatch: return "DIM_MISMATCH";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kMalformedFile: return "MALFORMED_FILE";
    case ErrorCode::kNodeUnreachable: return "NODE_UNREACHABLE";
    case ErrorCode::kUnknownMode: return "UNKNOWN_MODE";
    case ErrorCode::kDuplicatePartial: return "DUPLICATE_PARTIAL";
    case ErrorCode::kContractViolation: return "CONTRACT_VIOLATION";
    case ErrorCode::kBindFailure: return "BIND_FAILURE";
    case ErrorCode::kUnknownSuite: return "UNKNOWN_SUITE";
    case ErrorCode::kUsage: return "USAGE";
    case ErrorCode::kScaleOverflow: return "SCALE_OVERFLOW";
    case ErrorCode::kInternal: return "INTERNAL";
  }
  return "UNKNOWN";
}

void ByteWriter::PutU64Array(std::span<const std::uint64_t> values) {
  const std::size_t offset = out_->size();
  out_->resize(offset + values.size() * 8);
  std::uint8_t* dst = out_->data() + offset;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(dst, values.data(), values.size() * 8);
  } else {
    for (std::uint64_t v : values) {
      for (int i = 0; i < 8; ++i) *dst++ = static_cast<std::uint8_t>(v >> (8 * i));
    }
  }
}

void ByteReader::GetU64Array(std::span<std::uint64_t> out) {
  ByteSpan raw = GetBytes(out.size() * 8);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), raw.data(), raw.size());
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::uint64_t v = 0;
      for (int b = 0; b < 8; ++b) v |= std::uint64_t{raw[i * 8 + b]} << (8 * b);
      out[i] = v;
    }
  }
}

Bytes ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path);
  return data;
}

void WriteFile(const std::string& path, ByteSpan bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

Digest Sha256(std::initializer_list<ByteSpan> parts) {
  Digest out{};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error(ErrorCode::kInternal, "EVP_MD_CTX_new");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1;
  for (ByteSpan part : parts) {
    ok = ok && EVP_DigestUpdate(ctx, part.data(), part.size()) == 1;
  }
  unsigned int len = 0;
  ok = ok && EVP_DigestFinal_ex(ctx, out.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || len != out.size()) throw Error(ErrorCode::kInternal, "sha256 failed");
  return out;
}

Digest Sha256(ByteSpan data) { return Sha256({data}); }

std::string ToHex(ByteSpan bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Rng Rng::FromEntropy() {
  std::random_device rd;
  return Rng((std::uint64_t{rd()} << 32) ^ rd());
}

std::uint64_t Rng::UniformBelow(std::uint64_t bound) {
  // Reject the low sliver that would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = NextU64();
    if (r >= threshold) return r % bound;
  }
}

GaussianSampler::GaussianSampler(double stddev) : stddev_(stddev) {
  bound_ = static_cast<std::int64_t>(std::ceil(10.0 * stddev));
  std::vector<double> weights;
  double total = 0.0;
  for (std::int64_t x = -bound_; x <= bound_; ++x) {
    const double w = std::exp(-static_cast<double>(x * x) / (2.0 * stddev * stddev));
    weights.push_back(w);
    total += w;
  }
  cdf_.reserve(weights.size());
  double acc = 0.0;
  for (double w : weights) {
    acc += w / total;
    const double scaled = std::ldexp(acc, 64);
    cdf_.push_back(scaled >= 0x1.0p64 ? std::numeric_limits<std::uint64_t>::max()
                                      : static_cast<std::uint64_t>(scaled));
  }
  cdf_.back() = std::numeric_limits<std::uint64_t>::max();
}

std::int64_t GaussianSampler::Sample(Rng& rng) const {
  const std::uint64_t r = rng.NextU64();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
  const auto index = static_cast<std::int64_t>(
      std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  return index - bound_;
}

}  // namespace frag
