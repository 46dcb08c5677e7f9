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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "frag/common/rng.hpp"
#include "frag/he/cipher.hpp"
#include "frag/he/keys.hpp"
#include "frag/he/serialize.hpp"
#include "frag/mc/pivot_cache.hpp"
#include "support/oracles.hpp"

namespace frag::mc {
namespace {

using he::Ciphertext;
using he::Decrypt;
using std::chrono::milliseconds;
using std::chrono::seconds;

class McTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ctx_ = he::Context::Create(he::CipherParams{});
    keys_ = new he::KeyPair(he::KeyGen(ctx_, 1));
  }
  static void TearDownTestSuite() {
    delete keys_;
    ctx_.reset();
  }
  const he::PublicKey& pk() { return keys_->pk; }
  const he::SecretKey& sk() { return keys_->sk; }

  static CacheConfig Small(int p, int f, RefillMode mode = RefillMode::kInline) {
    CacheConfig cfg;
    cfg.pivot_count = p;
    cfg.frac_bits = f;
    cfg.zero_pool_size = 8;
    cfg.capacity = 64;
    cfg.refill = mode;
    return cfg;
  }

  static he::ContextPtr ctx_;
  static he::KeyPair* keys_;
};

he::ContextPtr McTest::ctx_;
he::KeyPair* McTest::keys_ = nullptr;

double GridRound(double x, int f) { return std::round(x * std::ldexp(1.0, f)) * std::ldexp(1.0, -f); }

TEST_F(McTest, ConfigValidation) {
  auto code = [&](CacheConfig cfg) { return oracle::CaptureError([&] { cfg.Validate(*ctx_); }); };
  EXPECT_EQ(code(CacheConfig{}), static_cast<ErrorCode>(0));
  CacheConfig c;
  c.pivot_count = 3;
  EXPECT_EQ(code(c), ErrorCode::kInvalidConfig);
  c.pivot_count = 65;
  EXPECT_EQ(code(c), ErrorCode::kInvalidConfig);
  c = CacheConfig{};
  c.zero_pool_size = 0;
  EXPECT_EQ(code(c), ErrorCode::kInvalidConfig);
  c = CacheConfig{};
  c.capacity = c.pivot_count + c.zero_pool_size - 1;
  EXPECT_EQ(code(c), ErrorCode::kInvalidConfig);
  c = CacheConfig{};
  c.ttl_seconds = -1;
  EXPECT_EQ(code(c), ErrorCode::kInvalidConfig);
  // A 64-pivot table needs its top pivot inside the encryption headroom.
  c = CacheConfig{};
  c.pivot_count = 64;
  EXPECT_EQ(code(c), ErrorCode::kInvalidConfig);
  c.frac_bits = 37;
  EXPECT_EQ(code(c), static_cast<ErrorCode>(0));
  EXPECT_FRAG_ERROR(PivotCache::Build(pk(), Small(3, 0), 1), ErrorCode::kInvalidConfig);
}

TEST(SignedDigitsTest, ReconstructsGridValue) {
  Rng rng(1);
  for (int trial = 0; trial < 20000; ++trial) {
    const int p = 4 + static_cast<int>(rng.UniformBelow(30));
    const int f = static_cast<int>(rng.UniformBelow(p));
    const double range = (std::ldexp(1.0, p) - 1) * std::ldexp(1.0, -f);
    const double x = rng.UniformReal(-range, range);
    const auto digits = SignedDigits(x, p, f);
    ASSERT_EQ(digits.size(), static_cast<std::size_t>(p));
    long double sum = 0;
    for (int k = 0; k < p; ++k) {
      ASSERT_TRUE(digits[k] >= -1 && digits[k] <= 1);
      sum += digits[k] * std::ldexp(1.0L, k);
    }
    ASSERT_EQ(static_cast<double>(sum * std::ldexp(1.0L, -f)), GridRound(x, f)) << x;
  }
  // 2^P - 1 does not fit as NAF in P digits and falls back to binary.
  const auto all = SignedDigits(15, 4, 0);
  EXPECT_EQ(all, (std::vector<int>{1, 1, 1, 1}));
  const auto naf = SignedDigits(7, 4, 0);
  EXPECT_EQ(naf, (std::vector<int>{-1, 0, 0, 1}));
  EXPECT_FRAG_ERROR(SignedDigits(16, 4, 0), ErrorCode::kRepresentationOverflow);
  EXPECT_FRAG_ERROR(SignedDigits(-16, 4, 0), ErrorCode::kRepresentationOverflow);
  EXPECT_FRAG_ERROR(SignedDigits(std::nan(""), 4, 0), ErrorCode::kRepresentationOverflow);
  EXPECT_NO_THROW(SignedDigits(std::ldexp(1.0, 26), 64, 37));
}

TEST_F(McTest, PivotsDecryptToBitWeights) {
  const auto cache = PivotCache::Build(pk(), CacheConfig{}, 7);
  ASSERT_EQ(cache->pivots().size(), 16u);
  for (int k = 0; k < 16; ++k) {
    EXPECT_NEAR(Decrypt(cache->pivots()[k], sk()), std::ldexp(1.0, k - 10), 1e-6) << k;
  }
  EXPECT_EQ(cache->zero_basis().size(), 256u);
  for (const Ciphertext& z : cache->zero_basis()) EXPECT_NEAR(Decrypt(z, sk()), 0.0, 1e-6);
  EXPECT_EQ(cache->zero_pool_available(), 256u);
  EXPECT_DOUBLE_EQ(cache->config().max_magnitude(), 65535.0 / 1024.0);
}

TEST_F(McTest, FourBitIntegers) {
  const auto cache = PivotCache::Build(pk(), Small(4, 0), 2);
  EXPECT_DOUBLE_EQ(cache->config().max_magnitude(), 15.0);
  for (int v = -15; v <= 15; ++v) EXPECT_NEAR(Decrypt(cache->Enc(v), sk()), v, 1e-6) << v;
  EXPECT_FRAG_ERROR(cache->Enc(16), ErrorCode::kRepresentationOverflow);
}

TEST_F(McTest, CacheEncExamples) {
  const auto cache = PivotCache::Build(pk(), CacheConfig{}, 3);
  EXPECT_NEAR(Decrypt(cache->Enc(0), sk()), 0.0, 1e-6);
  EXPECT_NEAR(Decrypt(cache->Enc(5.25), sk()), 5.25, 1e-6);
  const Ciphertext a = cache->Enc(1.5);
  EXPECT_EQ(a.degree(), 1);
  EXPECT_EQ(a.scale_exp(), 1);
  EXPECT_NE(he::SerializeCiphertext(a), he::SerializeCiphertext(cache->Enc(1.5)));
}

// Calibration of the 1e-6 bound for cached encryption: the error is the sum
// of the noises of the selected pivots and the zero.
TEST_F(McTest, GridCorrectnessOverRandomSamples) {
  const auto cache = PivotCache::Build(pk(), CacheConfig{}, 4);
  const double range = cache->config().max_magnitude();
  Rng rng(5);
  double worst_on = 0, worst_off = 0;
  for (int i = 0; i < 1000; ++i) {
    const double grid = GridRound(rng.UniformReal(-range, range), 10);
    worst_on = std::max(worst_on, std::fabs(Decrypt(cache->Enc(grid), sk()) - grid));
    const double off = rng.UniformReal(-range, range);
    worst_off = std::max(worst_off, std::fabs(Decrypt(cache->Enc(off), sk()) - off));
  }
  std::printf("cache_enc worst error on grid %.3e, off grid %.3e\n", worst_on, worst_off);
  EXPECT_LT(worst_on, 1e-6);
  EXPECT_LE(worst_off, std::ldexp(1.0, -11) + 1e-6);
}

TEST_F(McTest, WidePivotTables) {
  // P = 64 with the smallest legal frac_bits; values below 2^-30 vanish in
  // the encoding but stay within tolerance.
  CacheConfig cfg = Small(64, 37);
  cfg.capacity = 128;
  const auto cache = PivotCache::Build(pk(), cfg, 6);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.UniformReal(-1000, 1000);
    EXPECT_NEAR(Decrypt(cache->Enc(x), sk()), x, 2e-6);
  }
  const auto sweep = PivotCache::Build(pk(), Small(8, 7), 7);
  for (double x : {-1.0, -0.5, 0.0, 0.25, 0.9921875}) {
    EXPECT_NEAR(Decrypt(sweep->Enc(x), sk()), x, 1e-6);
  }
}

TEST_F(McTest, CacheAddAndMulPlain) {
  const auto cache = PivotCache::Build(pk(), CacheConfig{}, 8);
  EXPECT_NEAR(Decrypt(CacheAdd(cache->Enc(2), cache->Enc(3)), sk()), 5.0, 1e-6);
  const Ciphertext x = cache->Enc(-7.125);
  EXPECT_NEAR(Decrypt(CacheAdd(x, cache->Enc(0)), sk()), Decrypt(x, sk()), 1e-6);
  EXPECT_FRAG_ERROR(CacheAdd(x, CacheMulPlain(1.0, x)), ErrorCode::kScaleMismatch);
  // Degree-1 products at scale 2 decode for |v| < 4.
  const Ciphertext y = cache->Enc(-1.125);
  EXPECT_NEAR(Decrypt(CacheMulPlain(1.0, y), sk()), Decrypt(y, sk()), 1e-6);
  EXPECT_NEAR(Decrypt(CacheMulPlain(0.5, cache->Enc(4)), sk()), 2.0, 1e-6);
  EXPECT_FRAG_ERROR(CacheMulPlain(std::ldexp(1.0, 40), x), ErrorCode::kPlaintextOutOfRange);
  // Delegation is exact.
  EXPECT_EQ(CacheMulPlain(0.75, x), he::EvalMulPlain(x, 0.75));
  EXPECT_EQ(CacheAdd(x, x), he::EvalAdd(x, x));
}

TEST_F(McTest, Normalization) {
  const Ciphertext ct = he::Encrypt(0.3, pk());
  EXPECT_NEAR(Decrypt(Normalize(ct, 1.0), sk()), Decrypt(ct, sk()), 1e-6);
  EXPECT_NEAR(Decrypt(Normalize(he::Encrypt(0.25 * 4, pk()), 4), sk()), 0.25, 1e-6);
  EXPECT_FRAG_ERROR(Normalize(ct, 0.0), ErrorCode::kDivideByZeroScale);
  Rng rng(9);
  for (double delta : {0.5, 1.0, 4.0, 1024.0}) {
    for (int i = 0; i < 50; ++i) {
      const double vq = rng.UniformReal(-1, 1) * rng.UniformReal(-1, 1);
      const Ciphertext scaled = he::Encrypt(vq * delta, pk(), rng);
      EXPECT_NEAR(Decrypt(Normalize(scaled, delta), sk()), vq, 1e-3 * std::max(1.0, std::fabs(vq)));
    }
  }
}

TEST_F(McTest, TtlEviction) {
  CacheConfig never = Small(4, 0);
  never.ttl_seconds = 0;
  const auto cache = PivotCache::Build(pk(), never, 10);
  const auto t0 = Clock::now();
  cache->Put(1, cache->Enc(1), t0);
  EXPECT_EQ(cache->EvictExpired(t0 + std::chrono::hours(10000)), 0u);
  EXPECT_TRUE(cache->Get(1, t0 + std::chrono::hours(10000)).has_value());

  const auto ttl = PivotCache::Build(pk(), Small(4, 0), 11);
  ttl->Put(7, ttl->Enc(3), t0, 1.0);
  ttl->Put(8, ttl->Enc(4), t0);  // default ttl 3600
  EXPECT_TRUE(ttl->Get(7, t0 + milliseconds(500)).has_value());
  EXPECT_FALSE(ttl->Get(7, t0 + seconds(2)).has_value());
  EXPECT_EQ(ttl->EvictExpired(t0 + seconds(2)), 1u);
  EXPECT_EQ(ttl->entry_count(), 1u);
  EXPECT_NEAR(Decrypt(*ttl->Get(8, t0 + seconds(2)), sk()), 4.0, 1e-6);
  EXPECT_FALSE(ttl->Get(99, t0).has_value());
  const CacheStats s = ttl->stats();
  EXPECT_EQ(s.hits, 2u);
  EXPECT_EQ(s.misses, 2u);
  EXPECT_EQ(s.evictions, 1u);
  // Pivots and zeros are untouched by eviction.
  EXPECT_EQ(ttl->pivots().size(), 4u);
}

TEST_F(McTest, CapacityEvictsOldestFirst) {
  CacheConfig cfg = Small(4, 0);
  cfg.capacity = 4 + 8 + 3;
  const auto cache = PivotCache::Build(pk(), cfg, 12);
  EXPECT_EQ(cache->entry_capacity(), 3u);
  const auto t0 = Clock::now();
  for (std::uint64_t k = 1; k <= 5; ++k) cache->Put(k, cache->Enc(1), t0 + seconds(k));
  EXPECT_EQ(cache->entry_count(), 3u);
  EXPECT_FALSE(cache->Get(1, t0).has_value());
  EXPECT_FALSE(cache->Get(2, t0).has_value());
  for (std::uint64_t k = 3; k <= 5; ++k) EXPECT_TRUE(cache->Get(k, t0).has_value());
  EXPECT_EQ(cache->stats().evictions, 2u);
  // Re-putting a key refreshes its age.
  cache->Put(3, cache->Enc(2), t0 + seconds(6));
  cache->Put(6, cache->Enc(2), t0 + seconds(7));
  EXPECT_FALSE(cache->Get(4, t0).has_value());
  EXPECT_TRUE(cache->Get(3, t0).has_value());
}

TEST_F(McTest, ManualPoolDrainsAndRefills) {
  const auto cache = PivotCache::Build(pk(), Small(4, 0, RefillMode::kManual), 13);
  for (int i = 0; i < 8; ++i) cache->Enc(1);
  EXPECT_EQ(cache->zero_pool_available(), 0u);
  EXPECT_FRAG_ERROR(cache->Enc(1), ErrorCode::kZeroPoolEmpty);
  cache->RefillNow();
  EXPECT_EQ(cache->zero_pool_available(), 8u);
  EXPECT_EQ(cache->stats().pool_refills, 1u);
  // Derived zeros still decrypt to zero.
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(Decrypt(cache->Enc(-3), sk()), -3.0, 1e-6);
}

TEST_F(McTest, InlineRefillNeverStarves) {
  const auto cache = PivotCache::Build(pk(), Small(4, 0), 14);
  std::set<Bytes> seen;
  for (int i = 0; i < 100; ++i) {
    const Ciphertext ct = cache->Enc(5);
    ASSERT_NEAR(Decrypt(ct, sk()), 5.0, 1e-6);
    seen.insert(he::SerializeCiphertext(ct));
    ASSERT_GE(cache->zero_pool_available(), 4u);
  }
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_GT(cache->stats().pool_refills, 0u);
}

TEST_F(McTest, BackgroundRefill) {
  const auto cache = PivotCache::Build(pk(), Small(4, 0, RefillMode::kBackground), 15);
  for (int i = 0; i < 6; ++i) cache->Enc(2);
  const auto deadline = Clock::now() + seconds(10);
  while (cache->zero_pool_available() < 8 && Clock::now() < deadline) {
    std::this_thread::sleep_for(milliseconds(1));
  }
  EXPECT_EQ(cache->zero_pool_available(), 8u);
  EXPECT_GE(cache->stats().pool_refills, 1u);
}

TEST_F(McTest, ConcurrentCallersGetDistinctZeros) {
  CacheConfig cfg = Small(8, 4);
  cfg.zero_pool_size = 64;
  cfg.capacity = 128;
  const auto cache = PivotCache::Build(pk(), cfg, 16);
  std::vector<std::vector<Bytes>> out(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        out[t].push_back(he::SerializeCiphertext(cache->Enc(1.5)));
        if (i % 10 == 0) cache->Put(t * 100 + i, cache->Enc(0.5));
        cache->Get(t * 100);
      }
    });
  }
  for (auto& th : threads) th.join();
  std::set<Bytes> all;
  for (const auto& v : out) all.insert(v.begin(), v.end());
  EXPECT_EQ(all.size(), 200u);
  EXPECT_NEAR(Decrypt(he::DeserializeCiphertext(out[3].back(), ctx_), sk()), 1.5, 1e-6);
}

TEST_F(McTest, PersistenceRoundTrip) {
  const auto cache = PivotCache::Build(pk(), Small(6, 2), 17);
  cache->Get(1);
  cache->Put(2, cache->Enc(1));
  cache->Get(2);
  const Bytes bytes = cache->Serialize();
  const auto loaded = PivotCache::Deserialize(bytes, pk(), 99);
  EXPECT_EQ(loaded->Serialize(), bytes);
  EXPECT_EQ(loaded->pivots(), cache->pivots());
  EXPECT_EQ(loaded->zero_basis(), cache->zero_basis());
  EXPECT_EQ(loaded->stats().hits, 1u);
  EXPECT_EQ(loaded->stats().misses, 1u);
  EXPECT_NEAR(Decrypt(loaded->Enc(3.75), sk()), 3.75, 1e-6);

  CacheConfig cfg;
  const CacheStats stats = PivotCache::ReadStats(bytes, &cfg);
  EXPECT_EQ(cfg.pivot_count, 6);
  EXPECT_EQ(stats.hits, 1u);

  Bytes bad = bytes;
  bad[0] = 'X';
  EXPECT_FRAG_ERROR(PivotCache::Deserialize(bad, pk(), 1), ErrorCode::kMalformedFile);
  EXPECT_FRAG_ERROR(PivotCache::Deserialize(Bytes(bytes.begin(), bytes.end() - 1), pk(), 1),
                    ErrorCode::kMalformedFile);
  he::CipherParams other;
  other.scale_bits = 20;
  const auto other_keys = he::KeyGen(he::Context::Create(other), 1);
  EXPECT_FRAG_ERROR(PivotCache::Deserialize(bytes, other_keys.pk, 1), ErrorCode::kParamsMismatch);
}

}  // namespace
}  // namespace frag::mc
