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

#include "frag/mc/pivot_cache.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "frag/common/error.hpp"
#include "frag/he/serialize.hpp"

namespace frag::mc {

namespace {

constexpr he::Magic kCacheMagic = he::MakeMagic("FRAGMC1");

[[noreturn]] void InvalidConfig(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

// Constant-time acc += digit * p for digit in {-1, 0, 1}; q < 2^63.
void MaskedAccumulate(std::uint64_t* acc, const std::uint64_t* p, std::size_t n, int digit,
                      std::uint64_t q) {
  const std::uint64_t add_mask = 0 - static_cast<std::uint64_t>(digit == 1);
  const std::uint64_t sub_mask = 0 - static_cast<std::uint64_t>(digit == -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t t = acc[i] + (p[i] & add_mask);
    t = std::min(t, t - q);
    t -= p[i] & sub_mask;
    acc[i] = std::min(t, t + q);
  }
}

}  // namespace

void CacheConfig::Validate(const he::Context& ctx) const {
  if (pivot_count < 4 || pivot_count > 64) {
    InvalidConfig("pivot_count " + std::to_string(pivot_count) + " outside [4, 64]");
  }
  if (frac_bits < 0) InvalidConfig("negative frac_bits");
  if (zero_pool_size < 1) InvalidConfig("zero_pool_size must be at least 1");
  if (!(ttl_seconds >= 0)) InvalidConfig("negative ttl");
  if (capacity < static_cast<std::size_t>(pivot_count) + zero_pool_size) {
    InvalidConfig("capacity below pivot_count + zero_pool_size");
  }
  if (std::ldexp(1.0, pivot_count - 1 - frac_bits) > ctx.max_plain()) {
    InvalidConfig("top pivot 2^" + std::to_string(pivot_count - 1 - frac_bits) +
                  " exceeds encryption headroom; raise frac_bits");
  }
}

double CacheConfig::max_magnitude() const {
  return (std::ldexp(1.0, pivot_count) - 1) * std::ldexp(1.0, -frac_bits);
}

std::vector<int> SignedDigits(double x, int pivot_count, int frac_bits) {
  const double scaled = std::round(std::fabs(x) * std::ldexp(1.0, frac_bits));
  if (!std::isfinite(x) || scaled >= std::ldexp(1.0, pivot_count)) {
    throw Error(ErrorCode::kRepresentationOverflow,
                std::to_string(x) + " needs more than " + std::to_string(pivot_count) + " pivots");
  }
  const auto v = static_cast<unsigned __int128>(scaled);
  const int sign = x < 0 ? -1 : 1;
  std::vector<int> digits(pivot_count, 0);

  // Non-adjacent form; falls back to plain binary when it needs digit P.
  unsigned __int128 r = v;
  bool fits = true;
  for (int k = 0; r != 0; ++k) {
    int d = 0;
    if (r & 1) {
      d = (r & 3) == 3 ? -1 : 1;
      r = d == 1 ? r - 1 : r + 1;
    }
    if (k >= pivot_count) {
      fits = fits && d == 0;
    } else {
      digits[k] = d * sign;
    }
    r >>= 1;
    if (!fits) break;
  }
  if (!fits) {
    for (int k = 0; k < pivot_count; ++k) digits[k] = static_cast<int>((v >> k) & 1) * sign;
  }
  return digits;
}

PivotCache::PivotCache(const he::PublicKey& pk, const CacheConfig& cfg, std::uint64_t seed)
    : pk_(pk), cfg_(cfg), refill_rng_(seed) {}

std::unique_ptr<PivotCache> PivotCache::Build(const he::PublicKey& pk, const CacheConfig& cfg,
                                              std::uint64_t seed) {
  cfg.Validate(*pk.context());
  Rng rng(seed);
  std::unique_ptr<PivotCache> cache(new PivotCache(pk, cfg, rng.NextU64()));
  cache->pivots_.reserve(cfg.pivot_count);
  for (int k = 0; k < cfg.pivot_count; ++k) {
    cache->pivots_.push_back(he::Encrypt(std::ldexp(1.0, k - cfg.frac_bits), pk, rng));
  }
  cache->zero_basis_.reserve(cfg.zero_pool_size);
  for (std::size_t i = 0; i < cfg.zero_pool_size; ++i) {
    cache->zero_basis_.push_back(he::Encrypt(0.0, pk, rng));
  }
  cache->pool_.assign(cache->zero_basis_.begin(), cache->zero_basis_.end());
  cache->StartRefiller();
  return cache;
}

PivotCache::~PivotCache() {
  {
    std::lock_guard<std::mutex> lk(pool_mu_);
    stop_ = true;
  }
  refill_cv_.notify_all();
  if (refiller_.joinable()) refiller_.join();
}

void PivotCache::StartRefiller() {
  if (cfg_.refill == RefillMode::kBackground) refiller_ = std::thread([this] { RefillLoop(); });
}

void PivotCache::CheckRepresentable(double x) const {
  SignedDigits(x, cfg_.pivot_count, cfg_.frac_bits);
}

he::Ciphertext PivotCache::DeriveZero(Rng& rng) const {
  const he::Context& ctx = *pk_.context();
  const std::size_t n = ctx.degree();
  const std::size_t basis = zero_basis_.size();
  const std::size_t a = rng.UniformBelow(basis);
  std::size_t b = rng.UniformBelow(basis);
  if (basis > 1 && b == a) b = (b + 1) % basis;
  const std::size_t shift_a = rng.UniformBelow(2 * n);
  const std::size_t shift_b = rng.UniformBelow(2 * n);
  const bool negate = rng.NextU64() & 1;
  std::vector<he::Polynomial> polys(2, he::Polynomial(n));
  for (std::size_t c = 0; c < 2; ++c) {
    he::AddRotated(ctx.modulus(), polys[c], zero_basis_[a].polys()[c], shift_a, false);
    he::AddRotated(ctx.modulus(), polys[c], zero_basis_[b].polys()[c], shift_b, negate);
  }
  return he::Ciphertext(pk_.context(), std::move(polys), 1);
}

void PivotCache::RefillNow() {
  std::lock_guard<std::mutex> refill_lock(refill_mu_);
  std::size_t need;
  {
    std::lock_guard<std::mutex> lk(pool_mu_);
    need = cfg_.zero_pool_size - std::min(cfg_.zero_pool_size, pool_.size());
  }
  if (need == 0) return;
  std::vector<he::Ciphertext> fresh;
  fresh.reserve(need);
  for (std::size_t i = 0; i < need; ++i) fresh.push_back(DeriveZero(refill_rng_));
  {
    std::lock_guard<std::mutex> lk(pool_mu_);
    for (he::Ciphertext& z : fresh) pool_.push_back(std::move(z));
  }
  ++pool_refills_;
}

void PivotCache::RefillLoop() {
  for (;;) {
    {
      std::unique_lock<std::mutex> lk(pool_mu_);
      refill_cv_.wait(lk, [this] { return stop_ || pool_.size() < cfg_.zero_pool_size / 2; });
      if (stop_) return;
    }
    RefillNow();
  }
}

std::optional<he::Ciphertext> PivotCache::TakeZero() {
  std::optional<he::Ciphertext> z;
  bool low;
  {
    std::lock_guard<std::mutex> lk(pool_mu_);
    if (!pool_.empty()) {
      z = std::move(pool_.front());
      pool_.pop_front();
    }
    low = pool_.size() < cfg_.zero_pool_size / 2 || pool_.empty();
  }
  if (low) {
    if (cfg_.refill == RefillMode::kBackground) {
      refill_cv_.notify_one();
    } else if (cfg_.refill == RefillMode::kInline) {
      // Skip if another caller is already refilling.
      std::unique_lock<std::mutex> busy(refill_mu_, std::try_to_lock);
      if (busy.owns_lock()) {
        busy.unlock();
        RefillNow();
      }
    }
  }
  return z;
}

std::size_t PivotCache::zero_pool_available() const {
  std::lock_guard<std::mutex> lk(pool_mu_);
  return pool_.size();
}

he::Ciphertext PivotCache::Enc(double x) {
  const std::vector<int> digits = SignedDigits(x, cfg_.pivot_count, cfg_.frac_bits);
  std::optional<he::Ciphertext> zero = TakeZero();
  if (!zero) throw Error(ErrorCode::kZeroPoolEmpty, "zero pool exhausted; refill starved");
  const std::uint64_t q = pk_.context()->modulus().value();
  const std::size_t n = pk_.context()->degree();
  auto& out = zero->mutable_polys();
  for (int k = 0; k < cfg_.pivot_count; ++k) {
    for (std::size_t c = 0; c < 2; ++c) {
      MaskedAccumulate(out[c].coeffs.data(), pivots_[k].polys()[c].coeffs.data(), n, digits[k], q);
    }
  }
  return std::move(*zero);
}

void PivotCache::Put(std::uint64_t key, he::Ciphertext ct, Clock::time_point now,
                     std::optional<double> ttl_seconds) {
  std::unique_lock<std::shared_mutex> lk(entries_mu_);
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    order_.erase(it->second.order);
    entries_.erase(it);
  }
  order_.push_back(key);
  entries_.emplace(key, Entry{std::move(ct), now, ttl_seconds.value_or(cfg_.ttl_seconds),
                              std::prev(order_.end())});
  while (entries_.size() > entry_capacity()) {
    entries_.erase(order_.front());
    order_.pop_front();
    ++evictions_;
  }
}

namespace {

bool Expired(Clock::time_point created, double ttl, Clock::time_point now) {
  if (ttl <= 0) return false;
  return created + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(ttl)) <
         now;
}

}  // namespace

std::optional<he::Ciphertext> PivotCache::Get(std::uint64_t key, Clock::time_point now) const {
  std::shared_lock<std::shared_mutex> lk(entries_mu_);
  auto it = entries_.find(key);
  if (it == entries_.end() || Expired(it->second.created_at, it->second.ttl, now)) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return it->second.ct;
}

std::size_t PivotCache::EvictExpired(Clock::time_point now) {
  std::unique_lock<std::shared_mutex> lk(entries_mu_);
  std::size_t count = 0;
  for (auto it = order_.begin(); it != order_.end();) {
    auto e = entries_.find(*it);
    if (Expired(e->second.created_at, e->second.ttl, now)) {
      entries_.erase(e);
      it = order_.erase(it);
      ++count;
    } else {
      ++it;
    }
  }
  evictions_ += count;
  return count;
}

std::size_t PivotCache::entry_count() const {
  std::shared_lock<std::shared_mutex> lk(entries_mu_);
  return entries_.size();
}

CacheStats PivotCache::stats() const {
  return CacheStats{hits_.load(), misses_.load(), evictions_.load(), pool_refills_.load()};
}

Bytes PivotCache::Serialize() const {
  Bytes out;
  ByteWriter w(&out);
  w.PutBytes(kCacheMagic);
  w.PutU32(static_cast<std::uint32_t>(cfg_.pivot_count));
  w.PutU32(static_cast<std::uint32_t>(cfg_.frac_bits));
  w.PutU64(cfg_.zero_pool_size);
  w.PutF64(cfg_.ttl_seconds);
  w.PutU64(cfg_.capacity);
  const CacheStats s = stats();
  w.PutU64(s.hits);
  w.PutU64(s.misses);
  w.PutU64(s.evictions);
  w.PutU64(s.pool_refills);
  w.PutU32(static_cast<std::uint32_t>(pivots_.size()));
  for (const he::Ciphertext& p : pivots_) he::WriteCiphertextFrame(w, p);
  w.PutU32(static_cast<std::uint32_t>(zero_basis_.size()));
  for (const he::Ciphertext& z : zero_basis_) he::WriteCiphertextFrame(w, z);
  return out;
}

void PivotCache::Save(const std::string& path) const { WriteFile(path, Serialize()); }

namespace {

CacheConfig ReadConfig(ByteReader& r, CacheStats* stats) {
  he::ExpectMagic(r, kCacheMagic, "cache file");
  CacheConfig cfg;
  cfg.pivot_count = static_cast<int>(r.GetU32());
  cfg.frac_bits = static_cast<int>(r.GetU32());
  cfg.zero_pool_size = r.GetU64();
  cfg.ttl_seconds = r.GetF64();
  cfg.capacity = r.GetU64();
  stats->hits = r.GetU64();
  stats->misses = r.GetU64();
  stats->evictions = r.GetU64();
  stats->pool_refills = r.GetU64();
  return cfg;
}

}  // namespace

CacheStats PivotCache::ReadStats(ByteSpan bytes, CacheConfig* cfg) {
  ByteReader r(bytes, ErrorCode::kMalformedFile);
  CacheStats stats;
  const CacheConfig c = ReadConfig(r, &stats);
  if (cfg != nullptr) *cfg = c;
  return stats;
}

std::unique_ptr<PivotCache> PivotCache::Deserialize(ByteSpan bytes, const he::PublicKey& pk,
                                                    std::uint64_t seed, RefillMode refill) {
  ByteReader r(bytes, ErrorCode::kMalformedFile);
  CacheStats stats;
  CacheConfig cfg = ReadConfig(r, &stats);
  cfg.refill = refill;
  cfg.Validate(*pk.context());
  std::unique_ptr<PivotCache> cache(new PivotCache(pk, cfg, seed));
  const std::uint32_t pivots = r.GetU32();
  if (pivots != static_cast<std::uint32_t>(cfg.pivot_count)) r.Fail("pivot count mismatch");
  for (std::uint32_t i = 0; i < pivots; ++i) {
    cache->pivots_.push_back(he::ReadCiphertextFrame(r, pk.context()));
  }
  const std::uint32_t zeros = r.GetU32();
  if (zeros == 0) r.Fail("empty zero basis");
  for (std::uint32_t i = 0; i < zeros; ++i) {
    cache->zero_basis_.push_back(he::ReadCiphertextFrame(r, pk.context()));
  }
  for (const he::Ciphertext& ct : cache->pivots_) {
    if (ct.degree() != 1 || ct.scale_exp() != 1) r.Fail("pivot is not a fresh ciphertext");
  }
  for (const he::Ciphertext& ct : cache->zero_basis_) {
    if (ct.degree() != 1 || ct.scale_exp() != 1) r.Fail("zero is not a fresh ciphertext");
  }
  if (!r.done()) r.Fail("trailing bytes after cache");
  cache->hits_ = stats.hits;
  cache->misses_ = stats.misses;
  cache->evictions_ = stats.evictions;
  cache->pool_refills_ = stats.pool_refills;
  cache->pool_.assign(cache->zero_basis_.begin(), cache->zero_basis_.end());
  cache->StartRefiller();
  return cache;
}

std::unique_ptr<PivotCache> PivotCache::Load(const std::string& path, const he::PublicKey& pk,
                                             std::uint64_t seed, RefillMode refill) {
  const Bytes bytes = ReadFile(path);
  return Deserialize(bytes, pk, seed, refill);
}

he::Ciphertext CacheAdd(const he::Ciphertext& a, const he::Ciphertext& b) {
  return he::EvalAdd(a, b);
}

he::Ciphertext CacheMulPlain(double p, const he::Ciphertext& ct) { return he::EvalMulPlain(ct, p); }

he::Ciphertext Normalize(const he::Ciphertext& ct, double delta) {
  if (delta == 0) throw Error(ErrorCode::kDivideByZeroScale, "normalization by zero");
  return he::EvalMulPlain(ct, 1.0 / delta);
}

}  // namespace frag::mc
