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

// Cached encryption from precomputed power-of-two pivots.
//
// A real x is rounded onto the grid 2^-frac_bits, written in signed binary
// (non-adjacent form when it fits in P digits) and realised as
//
//   z + sum_k d_k * Enc(2^(k - frac_bits)),   d_k in {-1, 0, 1}
//
// where z is an encryption of zero taken from the pool. Every pivot is
// visited with a masked add so the work does not depend on x.
//
// Zero pool refill does not encrypt. It draws two zeros z_a, z_b from a basis
// of fresh encryptions made at build time and emits X^i z_a +/- X^j z_b, which
// is again an encryption of zero with comparable noise.
//
// Persistence file:
//   "FRAGMC1\0" | config block | stats block |
//   pivot count u32 | pivot frames | zero count u32 | zero-basis frames
// config block: P u32 | frac_bits u32 | Z u64 | ttl f64 | capacity u64
// stats block:  hits u64 | misses u64 | evictions u64 | pool_refills u64

#ifndef FRAG_MC_PIVOT_CACHE_HPP_
#define FRAG_MC_PIVOT_CACHE_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "frag/common/rng.hpp"
#include "frag/he/cipher.hpp"
#include "frag/he/keys.hpp"

namespace frag::mc {

using Clock = std::chrono::steady_clock;

enum class RefillMode : std::uint8_t {
  kInline,      // the consuming thread tops the pool up after taking a zero
  kBackground,  // a dedicated thread tops the pool up
  kManual,      // only RefillNow(); an empty pool raises ZERO_POOL_EMPTY
};

struct CacheConfig {
  int pivot_count = 16;
  int frac_bits = 10;
  std::size_t zero_pool_size = 256;
  double ttl_seconds = 3600;  // 0 = entries never expire
  std::size_t capacity = 65536;
  RefillMode refill = RefillMode::kInline;

  // INVALID_CONFIG: P outside [4, 64], Z < 1, capacity < P + Z, negative
  // frac_bits or ttl, or a top pivot 2^(P-1-frac_bits) beyond the encryption
  // headroom of `ctx`.
  void Validate(const he::Context& ctx) const;

  // Largest representable magnitude, (2^P - 1) * 2^-frac_bits.
  double max_magnitude() const;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t pool_refills = 0;
};

// Signed digits of round(|x| * 2^frac_bits) * sign(x), least significant
// first, exactly P entries. REPRESENTATION_OVERFLOW beyond the range.
std::vector<int> SignedDigits(double x, int pivot_count, int frac_bits);

class PivotCache {
 public:
  // build_pivots. Randomness for pivots, zeros and refill comes from `seed`.
  static std::unique_ptr<PivotCache> Build(const he::PublicKey& pk, const CacheConfig& cfg,
                                           std::uint64_t seed);

  ~PivotCache();
  PivotCache(const PivotCache&) = delete;
  PivotCache& operator=(const PivotCache&) = delete;

  // cache_enc. REPRESENTATION_OVERFLOW, ZERO_POOL_EMPTY.
  he::Ciphertext Enc(double x);

  // Throws REPRESENTATION_OVERFLOW if x is outside the representable range.
  void CheckRepresentable(double x) const;

  const CacheConfig& config() const { return cfg_; }
  const he::PublicKey& public_key() const { return pk_; }
  const std::vector<he::Ciphertext>& pivots() const { return pivots_; }
  const std::vector<he::Ciphertext>& zero_basis() const { return zero_basis_; }
  std::size_t zero_pool_available() const;

  // Fills the pool up to Z on the calling thread.
  void RefillNow();

  // Data-derived entries. Pivots and zeros are never evicted; data entries
  // are limited to capacity - P - Z and evicted oldest first.
  void Put(std::uint64_t key, he::Ciphertext ct, Clock::time_point now = Clock::now(),
           std::optional<double> ttl_seconds = std::nullopt);
  std::optional<he::Ciphertext> Get(std::uint64_t key, Clock::time_point now = Clock::now()) const;
  // evict_expired: removes entries with created_at + ttl < now.
  std::size_t EvictExpired(Clock::time_point now = Clock::now());
  std::size_t entry_count() const;
  std::size_t entry_capacity() const { return cfg_.capacity - cfg_.pivot_count - cfg_.zero_pool_size; }

  CacheStats stats() const;

  void Save(const std::string& path) const;
  Bytes Serialize() const;
  // PARAMS_MISMATCH if the file was built under other parameters.
  static std::unique_ptr<PivotCache> Load(const std::string& path, const he::PublicKey& pk,
                                          std::uint64_t seed, RefillMode refill = RefillMode::kInline);
  static std::unique_ptr<PivotCache> Deserialize(ByteSpan bytes, const he::PublicKey& pk,
                                                 std::uint64_t seed,
                                                 RefillMode refill = RefillMode::kInline);
  // Counters only, without a key (used by the stats command).
  static CacheStats ReadStats(ByteSpan bytes, CacheConfig* cfg = nullptr);

 private:
  struct Entry {
    he::Ciphertext ct;
    Clock::time_point created_at;
    double ttl;
    std::list<std::uint64_t>::iterator order;
  };

  PivotCache(const he::PublicKey& pk, const CacheConfig& cfg, std::uint64_t seed);
  void StartRefiller();
  he::Ciphertext DeriveZero(Rng& rng) const;
  std::optional<he::Ciphertext> TakeZero();
  void RefillLoop();

  he::PublicKey pk_;
  CacheConfig cfg_;
  std::vector<he::Ciphertext> pivots_;
  std::vector<he::Ciphertext> zero_basis_;

  mutable std::mutex pool_mu_;
  std::deque<he::Ciphertext> pool_;
  Rng refill_rng_;
  std::mutex refill_mu_;  // serialises refills, never held while taking zeros
  std::condition_variable refill_cv_;
  bool stop_ = false;
  std::thread refiller_;

  mutable std::shared_mutex entries_mu_;
  std::unordered_map<std::uint64_t, Entry> entries_;
  std::list<std::uint64_t> order_;  // oldest first

  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
  std::atomic<std::uint64_t> evictions_{0};
  std::atomic<std::uint64_t> pool_refills_{0};
};

// cache_add / cache_mul_plain: same contracts as EvalAdd / EvalMulPlain.
he::Ciphertext CacheAdd(const he::Ciphertext& a, const he::Ciphertext& b);
he::Ciphertext CacheMulPlain(double p, const he::Ciphertext& ct);

// eval_mul_plain(ct, 1 / delta). DIVIDE_BY_ZERO_SCALE for delta == 0.
he::Ciphertext Normalize(const he::Ciphertext& ct, double delta);

}  // namespace frag::mc

#endif  // FRAG_MC_PIVOT_CACHE_HPP_
