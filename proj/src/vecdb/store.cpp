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

#include "frag/vecdb/store.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>

#include "frag/common/error.hpp"

namespace frag::vecdb {

namespace {

std::string RowPrefix(std::size_t row, std::uint64_t id) {
  return "row " + std::to_string(row) + " (id " + std::to_string(id) + "): ";
}

void RequireQuery(const VectorRecord& record, std::size_t query_dim) {
  if (record.dim() != query_dim) {
    throw Error(ErrorCode::kDimMismatch, "record " + std::to_string(record.id) + " has " +
                                             std::to_string(record.dim()) + " elements, query " +
                                             std::to_string(query_dim));
  }
}

}  // namespace

VectorStore::VectorStore(he::ContextPtr ctx, std::uint32_t dim) : ctx_(std::move(ctx)), dim_(dim) {
  if (!ctx_) throw Error(ErrorCode::kInvalidParams, "store needs a context");
}

void VectorStore::Append(VectorRecord record) {
  if (record.dim() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "record " + std::to_string(record.id) + " has " +
                                             std::to_string(record.dim()) +
                                             " elements, store dimension is " +
                                             std::to_string(dim_));
  }
  if (ids_.contains(record.id)) {
    throw Error(ErrorCode::kDuplicateId, "id " + std::to_string(record.id) + " already stored");
  }
  for (const he::Ciphertext& ct : record.elems) {
    if (!ct.valid() || ct.params_id() != ctx_->id()) {
      throw Error(ErrorCode::kParamsMismatch, "element does not match the store parameters");
    }
    if (ct.degree() != 1) throw Error(ErrorCode::kDepthExceeded, "stored elements are degree 1");
    if (ct.scale_exp() != record.elems.front().scale_exp()) {
      throw Error(ErrorCode::kScaleMismatch, "elements of one record disagree on scale");
    }
  }
  ids_.insert(record.id);
  records_.push_back(std::move(record));
}

bool VectorStore::operator==(const VectorStore& o) const {
  return ctx_->id() == o.ctx_->id() && dim_ == o.dim_ && records_ == o.records_;
}

VectorStore Ingest(std::span<const PlainVector> rows, const he::PublicKey& pk,
                   mc::PivotCache* cache, Rng* rng) {
  const auto dim = rows.empty() ? 0u : static_cast<std::uint32_t>(rows.front().values.size());
  return Ingest(rows, dim, pk, cache, rng);
}

VectorStore Ingest(std::span<const PlainVector> rows, std::uint32_t dim, const he::PublicKey& pk,
                   mc::PivotCache* cache, Rng* rng) {
  VectorStore store(pk.context(), dim);
  for (std::size_t row = 0; row < rows.size(); ++row) {
    const PlainVector& in = rows[row];
    try {
      if (in.values.size() != dim) {
        throw Error(ErrorCode::kDimMismatch, std::to_string(in.values.size()) +
                                                 " values, expected " + std::to_string(dim));
      }
      if (store.contains(in.id)) throw Error(ErrorCode::kDuplicateId, "id already stored");
      if (!(in.delta != 0 && std::isfinite(in.delta))) {
        throw Error(ErrorCode::kDivideByZeroScale, "record scale must be finite and nonzero");
      }
      VectorRecord record{in.id, in.delta, {}};
      record.elems.reserve(dim);
      for (double v : in.values) {
        // A cache bounds the range first so oversize values report the
        // representation limit.
        if (cache != nullptr) cache->CheckRepresentable(v * in.delta);
        if (!(std::fabs(v) <= 1.0)) {
          throw Error(ErrorCode::kPlaintextOutOfRange,
                      "value " + std::to_string(v) + " outside [-1, 1]");
        }
        const double x = v * in.delta;
        if (cache != nullptr) {
          record.elems.push_back(cache->Enc(x));
        } else if (rng != nullptr) {
          record.elems.push_back(he::Encrypt(x, pk, *rng));
        } else {
          record.elems.push_back(he::Encrypt(x, pk));
        }
      }
      store.Append(std::move(record));
    } catch (const Error& e) {
      throw Error(e.code(), RowPrefix(row, in.id) + e.message());
    }
  }
  return store;
}

std::vector<he::PreparedCiphertext> PrepareQuery(std::span<const he::Ciphertext> query) {
  std::vector<he::PreparedCiphertext> out;
  out.reserve(query.size());
  for (const he::Ciphertext& ct : query) {
    if (!out.empty() && ct.valid() && ct.params_id() != out.front().context()->id()) {
      throw Error(ErrorCode::kParamsMismatch, "query elements use different parameters");
    }
    out.emplace_back(ct);
  }
  return out;
}

EncryptedScore Score(const VectorRecord& record, std::span<const he::Ciphertext> query) {
  RequireQuery(record, query.size());
  return Score(record, PrepareQuery(query));
}

EncryptedScore Score(const VectorRecord& record, std::span<const he::PreparedCiphertext> query) {
  RequireQuery(record, query.size());
  if (record.elems.empty()) {
    throw Error(ErrorCode::kDimMismatch, "cannot score a zero-dimensional record");
  }
  const he::ContextPtr& ctx = record.elems.front().context();
  const bool normalize = record.delta != 1.0;
  const int elem_scale = record.elems.front().scale_exp() + (normalize ? 1 : 0);
  const int scale_exp = elem_scale + query.front().scale_exp();
  if (scale_exp > ctx->max_scale_exp()) {
    throw Error(ErrorCode::kScaleOverflow,
                "score scale_exp " + std::to_string(scale_exp) + " exceeds modulus budget " +
                    std::to_string(ctx->max_scale_exp()));
  }
  he::TensorAccumulator acc(ctx);
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (query[i].scale_exp() != query.front().scale_exp()) {
      throw Error(ErrorCode::kScaleMismatch, "query elements disagree on scale");
    }
    if (normalize) {
      acc.Add(mc::Normalize(record.elems[i], record.delta), query[i]);
    } else {
      acc.Add(record.elems[i], query[i]);
    }
  }
  return EncryptedScore{record.id, acc.Finish(scale_exp)};
}

std::vector<EncryptedScore> Scan(const VectorStore& store, std::span<const he::Ciphertext> query,
                                 int threads) {
  if (query.size() != store.dim()) {
    throw Error(ErrorCode::kDimMismatch, "query has " + std::to_string(query.size()) +
                                             " elements, store dimension is " +
                                             std::to_string(store.dim()));
  }
  return Scan(store, PrepareQuery(query), threads);
}

namespace {

void RequireQueryDim(std::size_t query_dim, std::uint32_t dim) {
  if (query_dim != dim) {
    throw Error(ErrorCode::kDimMismatch, "query has " + std::to_string(query_dim) +
                                             " elements, store dimension is " +
                                             std::to_string(dim));
  }
}

int ScoreScale(const he::Context& ctx, int elem_scale,
               std::span<const he::PreparedCiphertext> query) {
  const int scale_exp = elem_scale + query.front().scale_exp();
  if (scale_exp > ctx.max_scale_exp()) {
    throw Error(ErrorCode::kScaleOverflow,
                "score scale_exp " + std::to_string(scale_exp) + " exceeds modulus budget " +
                    std::to_string(ctx.max_scale_exp()));
  }
  for (const he::PreparedCiphertext& q : query) {
    if (q.scale_exp() != query.front().scale_exp()) {
      throw Error(ErrorCode::kScaleMismatch, "query elements disagree on scale");
    }
  }
  return scale_exp;
}

// Calls score(i) for every i < count on up to `threads` workers.
std::vector<EncryptedScore> Parallel(std::size_t count, int threads,
                                     const std::function<EncryptedScore(std::size_t)>& score) {
  std::vector<EncryptedScore> out(count);
  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(count, 1));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = score(i);
  };
  if (workers == 1) {
    run(0, count);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        run(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

std::vector<EncryptedScore> Scan(const VectorStore& store,
                                 std::span<const he::PreparedCiphertext> query, int threads) {
  RequireQueryDim(query.size(), store.dim());
  const auto& records = store.records();
  return Parallel(records.size(), threads, [&](std::size_t i) { return Score(records[i], query); });
}

PreparedStore::PreparedStore(const VectorStore& store) : ctx_(store.context()), dim_(store.dim()) {
  records_.reserve(store.size());
  for (const VectorRecord& record : store.records()) {
    PreparedRecord& p = records_.emplace_back();
    p.id = record.id;
    p.elems.reserve(record.dim());
    const bool normalize = record.delta != 1.0;
    for (const he::Ciphertext& ct : record.elems) {
      if (normalize) {
        const he::Ciphertext scaled = mc::Normalize(ct, record.delta);
        p.scale_exp = scaled.scale_exp();
        p.elems.emplace_back(scaled);
      } else {
        p.scale_exp = ct.scale_exp();
        p.elems.emplace_back(ct);
      }
    }
  }
}

std::vector<EncryptedScore> Scan(const PreparedStore& store,
                                 std::span<const he::PreparedCiphertext> query, int threads) {
  RequireQueryDim(query.size(), store.dim());
  if (store.size() == 0) return {};
  if (store.dim() == 0) throw Error(ErrorCode::kDimMismatch, "cannot score a zero-dimensional record");
  const auto& records = store.records();
  return Parallel(records.size(), threads, [&](std::size_t i) {
    const PreparedRecord& record = records[i];
    const int scale_exp = ScoreScale(*store.context(), record.scale_exp, query);
    he::TensorAccumulator acc(store.context());
    for (std::size_t e = 0; e < record.elems.size(); ++e) acc.Add(record.elems[e], query[e]);
    return EncryptedScore{record.id, acc.Finish(scale_exp)};
  });
}

Bytes Serialize(const VectorStore& store) {
  Bytes out;
  ByteWriter w(&out);
  const std::size_t per_record =
      16 + static_cast<std::size_t>(store.dim()) * he::CiphertextFrameSize(store.context()->degree(), 1);
  out.reserve(54 + store.size() * per_record);
  w.PutBytes(kStoreMagic);
  w.PutU16(kStoreVersion);
  w.PutBytes(store.context()->id());
  w.PutU32(store.dim());
  w.PutU64(store.size());
  for (const VectorRecord& record : store.records()) {
    w.PutU64(record.id);
    w.PutF64(record.delta);
    for (const he::Ciphertext& ct : record.elems) he::WriteCiphertextFrame(w, ct);
  }
  return out;
}

VectorStore Deserialize(ByteSpan bytes, const he::ContextPtr& ctx) {
  ByteReader r(bytes, ErrorCode::kMalformedFile);
  he::ExpectMagic(r, kStoreMagic, "vector store");
  const std::uint16_t version = r.GetU16();
  if (version != kStoreVersion) {
    throw Error(ErrorCode::kMalformedFile, "unsupported store version " + std::to_string(version));
  }
  const auto id = r.GetArray<32>();
  if (id != ctx->id()) {
    throw Error(ErrorCode::kParamsMismatch, "store was written under other parameters");
  }
  const std::uint32_t dim = r.GetU32();
  const std::uint64_t count = r.GetU64();
  const std::size_t frame = he::CiphertextFrameSize(ctx->degree(), 1);
  if (count != 0 && (r.remaining() / count) < 16 + std::uint64_t{dim} * frame) {
    throw Error(ErrorCode::kMalformedFile, "record count exceeds file size");
  }
  VectorStore store(ctx, dim);
  try {
    for (std::uint64_t i = 0; i < count; ++i) {
      VectorRecord record;
      record.id = r.GetU64();
      record.delta = r.GetF64();
      record.elems.reserve(dim);
      for (std::uint32_t e = 0; e < dim; ++e) record.elems.push_back(he::ReadCiphertextFrame(r, ctx));
      store.Append(std::move(record));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParamsMismatch) throw;
    throw Error(ErrorCode::kMalformedFile, e.message());
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kMalformedFile, "trailing bytes after store");
  return store;
}

void Save(const VectorStore& store, const std::string& path) { WriteFile(path, Serialize(store)); }

VectorStore Load(const std::string& path, const he::ContextPtr& ctx) {
  return Deserialize(ReadFile(path), ctx);
}

}  // namespace frag::vecdb
