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

#include "frag/bench/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "frag/common/error.hpp"
#include "frag/he/cipher.hpp"
#include "frag/mc/pivot_cache.hpp"
#include "frag/sharing/sharing.hpp"
#include "frag/vecdb/store.hpp"

namespace frag::bench {

namespace {

using SteadyClock = std::chrono::steady_clock;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double Percentile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Draws from [1, 20000] mapped linearly onto (0, limit].
std::vector<double> DrawValues(Rng& rng, std::size_t count, double limit) {
  std::vector<double> out(count);
  for (double& x : out) x = rng.UniformReal(1.0, 20000.0) * (limit / 20000.0);
  return out;
}

std::vector<double> UnitVector(Rng& rng, std::size_t m) {
  std::vector<double> v(m);
  double norm = 0;
  for (double& x : v) {
    x = rng.UniformReal(-1.0, 1.0);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

BenchRow Row(std::string op, std::string axis_value, std::uint64_t ops, std::vector<double> secs,
             int workers = 1) {
  BenchRow row;
  row.operation = std::move(op);
  row.axis_value = std::move(axis_value);
  row.ops = ops;
  row.workers = workers;
  row.timing = Summarize(std::move(secs));
  return row;
}

// Times each call of `op(i)` separately over reps inputs.
std::vector<double> PerOp(int warmup, int reps, const std::function<void(std::size_t)>& op) {
  std::size_t i = 0;
  return Measure(warmup, reps, [&] { op(i++); });
}

void Primitives(const he::KeyPair& keys, const BenchOptions& opts, BenchReport& report) {
  report.axis = "m";
  Rng rng(opts.seed);
  std::vector<he::Ciphertext> cts;
  for (int i = 0; i < 768; ++i) cts.push_back(he::Encrypt(rng.UniformReal(-1, 1), keys.pk, rng));
  for (std::size_t m : {64u, 256u, 768u}) {
    const std::span<const he::Ciphertext> input(cts.data(), m);
    std::vector<std::vector<sharing::CipherShare>> sets(m);
    for (std::size_t i = 0; i < m; ++i) sets[i] = sharing::Split(input[i], 3, rng);

    report.rows.push_back(Row("split", std::to_string(m), m, Measure(opts.warmup, opts.samples, [&] {
                                for (const auto& ct : input) sharing::Split(ct, 3, rng);
                              })));
    report.rows.push_back(Row("merge", std::to_string(m), m, Measure(opts.warmup, opts.samples, [&] {
                                for (const auto& set : sets) sharing::Merge(set);
                              })));
    bool all_ok = true;
    report.rows.push_back(Row("verify", std::to_string(m), 3 * m, Measure(opts.warmup, opts.samples, [&] {
                                for (const auto& set : sets) {
                                  for (const auto& share : set) {
                                    all_ok = sharing::Verify(share, set[0].commitment) && all_ok;
                                  }
                                }
                              })));
    if (!all_ok) throw Error(ErrorCode::kInternal, "benchmark shares failed verification");
  }
}

void Mc(const he::KeyPair& keys, const BenchOptions& opts, BenchReport& report) {
  report.axis = "value_range";
  const std::string range = "1..20000";
  const mc::CacheConfig cfg;
  auto cache = mc::PivotCache::Build(keys.pk, cfg, opts.seed);
  Rng rng(opts.seed + 1);
  const std::size_t n = static_cast<std::size_t>(opts.reps + opts.warmup);
  // Grid values at the top of the cache's range; plaintext factors in (0, 1].
  const std::vector<double> xs = DrawValues(rng, n, cfg.max_magnitude());
  const std::vector<double> ps = DrawValues(rng, n, 1.0);
  std::vector<he::Ciphertext> cts;
  for (std::size_t i = 0; i < n; ++i) cts.push_back(cache->Enc(xs[i]));

  report.rows.push_back(Row("fresh_encrypt", range, 1, PerOp(opts.warmup, opts.reps, [&](std::size_t i) {
                              he::Encrypt(xs[i], keys.pk, rng);
                            })));
  report.rows.push_back(Row("cache_enc", range, 1, PerOp(opts.warmup, opts.reps, [&](std::size_t i) {
                              cache->Enc(xs[i]);
                            })));
  report.rows.push_back(Row("cache_add", range, 1, PerOp(opts.warmup, opts.reps, [&](std::size_t i) {
                              mc::CacheAdd(cts[i], cts[n - 1 - i]);
                            })));
  report.rows.push_back(Row("cache_mul_plain", range, 1, PerOp(opts.warmup, opts.reps, [&](std::size_t i) {
                              mc::CacheMulPlain(ps[i], cts[i]);
                            })));
  const mc::CacheStats stats = cache->stats();
  report.stamp.emplace_back("pool_refills", std::to_string(stats.pool_refills));
}

void Pivots(const he::KeyPair& keys, const BenchOptions& opts, BenchReport& report) {
  report.axis = "pivots";
  for (int p : {4, 8, 16, 32, 64}) {
    mc::CacheConfig cfg;
    cfg.pivot_count = p;
    // Top pivot at 1 keeps every P inside the encryption headroom.
    cfg.frac_bits = p - 1;
    auto cache = mc::PivotCache::Build(keys.pk, cfg, opts.seed + static_cast<std::uint64_t>(p));
    Rng rng(opts.seed);
    const std::vector<double> xs =
        DrawValues(rng, static_cast<std::size_t>(opts.reps + opts.warmup), cfg.max_magnitude());
    report.rows.push_back(Row("cache_enc", std::to_string(p), 1,
                              PerOp(opts.warmup, opts.reps, [&](std::size_t i) { cache->Enc(xs[i]); })));
  }
}

void Weak(const he::KeyPair& keys, const BenchOptions& opts, BenchReport& report) {
  report.axis = "batch";
  const mc::CacheConfig cfg;
  auto cache = mc::PivotCache::Build(keys.pk, cfg, opts.seed);
  Rng rng(opts.seed);
  const std::vector<double> xs = DrawValues(rng, 120, cfg.max_magnitude());
  // Roughly `reps` messages through the smallest batch.
  const int samples = std::max(opts.samples, opts.reps / 40);
  // The pool is topped up between batches, off the clock, as an asynchronous
  // refill would do. Inline refills inside a batch would land in some
  // samples and not others and skew the medians.
  for (std::size_t batch : {40u, 80u, 120u}) {
    report.rows.push_back(Row("cache_enc", std::to_string(batch), batch,
                              Measure(
                                  opts.warmup, samples,
                                  [&] {
                                    for (std::size_t i = 0; i < batch; ++i) cache->Enc(xs[i]);
                                  },
                                  [&] { cache->RefillNow(); })));
  }
  report.stamp.emplace_back("weak_pool", "refilled between samples");
}

// Encrypt the corpus block by block, score each block against the query and
// keep only the scores, then decrypt and rank. The whole encrypted corpus at
// 10,000 x 64 would not fit in memory, so blocks are dropped after scoring.
void Pipeline(const std::vector<vecdb::PlainVector>& rows, const std::vector<double>& query,
              const he::KeyPair& keys, mc::PivotCache* cache, Rng& rng) {
  constexpr std::size_t kBlock = 500;
  std::vector<he::Ciphertext> enc_query;
  for (double x : query) enc_query.push_back(cache ? cache->Enc(x) : he::Encrypt(x, keys.pk, rng));
  const auto prepared = vecdb::PrepareQuery(enc_query);
  std::vector<vecdb::EncryptedScore> scores;
  scores.reserve(rows.size());
  for (std::size_t at = 0; at < rows.size(); at += kBlock) {
    const std::size_t len = std::min(kBlock, rows.size() - at);
    const auto block = vecdb::Ingest(std::span(rows).subspan(at, len), keys.pk, cache, &rng);
    for (auto& s : vecdb::Scan(block, prepared)) scores.push_back(std::move(s));
  }
  std::vector<std::pair<double, std::uint64_t>> plain;
  plain.reserve(scores.size());
  for (const auto& s : scores) plain.emplace_back(he::Decrypt(s.score, keys.sk), s.record_id);
  const std::size_t k = std::min<std::size_t>(10, plain.size());
  std::partial_sort(plain.begin(), plain.begin() + static_cast<std::ptrdiff_t>(k), plain.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
}

void Speedup(const he::KeyPair& keys, const BenchOptions& opts, BenchReport& report) {
  report.axis = "corpus";
  Rng data_rng(opts.seed);
  std::vector<vecdb::PlainVector> rows;
  for (std::size_t i = 0; i < opts.corpus_rows; ++i) {
    rows.push_back(vecdb::PlainVector{i + 1, UnitVector(data_rng, opts.corpus_dim)});
  }
  const std::vector<double> query = UnitVector(data_rng, opts.corpus_dim);
  auto cache = mc::PivotCache::Build(keys.pk, mc::CacheConfig{}, opts.seed);

  // Interleaved so drift on the host hits both sides alike.
  std::vector<double> plain_secs, cached_secs, ratios;
  Rng rng(opts.seed + 1);
  for (int it = 0; it < opts.warmup + opts.samples; ++it) {
    auto t0 = SteadyClock::now();
    Pipeline(rows, query, keys, nullptr, rng);
    auto t1 = SteadyClock::now();
    Pipeline(rows, query, keys, cache.get(), rng);
    auto t2 = SteadyClock::now();
    if (it < opts.warmup) continue;
    plain_secs.push_back(std::chrono::duration<double>(t1 - t0).count());
    cached_secs.push_back(std::chrono::duration<double>(t2 - t1).count());
    ratios.push_back(plain_secs.back() / cached_secs.back());
  }
  const std::string axis_value = std::to_string(opts.corpus_rows) + "x" + std::to_string(opts.corpus_dim);
  report.rows.push_back(Row("pipeline_uncached", axis_value, opts.corpus_rows, plain_secs));
  report.rows.push_back(Row("pipeline_cached", axis_value, opts.corpus_rows, cached_secs));
  const double speedup = report.rows[0].timing.median / report.rows[1].timing.median;
  report.stamp.emplace_back("speedup_of_medians", Num(speedup));
  report.stamp.emplace_back("median_paired_speedup", Num(Summarize(ratios).median));
}

void Threads(const he::KeyPair& keys, const BenchOptions& opts, BenchReport& report) {
  report.axis = "workers";
  int max_workers = opts.max_threads;
  if (max_workers <= 0) {
    max_workers = std::min(96, std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
  }
  Rng rng(opts.seed);
  std::vector<vecdb::PlainVector> rows;
  for (std::size_t i = 0; i < opts.thread_rows; ++i) {
    rows.push_back(vecdb::PlainVector{i + 1, UnitVector(rng, opts.thread_dim)});
  }
  auto cache = mc::PivotCache::Build(keys.pk, mc::CacheConfig{}, opts.seed);
  const auto store = vecdb::Ingest(rows, keys.pk, cache.get(), &rng);
  std::vector<he::Ciphertext> query;
  for (double x : UnitVector(rng, opts.thread_dim)) query.push_back(he::Encrypt(x, keys.pk, rng));
  const auto prepared = vecdb::PrepareQuery(query);

  std::vector<int> counts;
  for (int w = 1; w < max_workers; w *= 2) counts.push_back(w);
  counts.push_back(max_workers);
  for (int w : counts) {
    report.rows.push_back(Row("scan", std::to_string(w), opts.thread_rows,
                              Measure(opts.warmup, opts.samples, [&] { vecdb::Scan(store, prepared, w); }),
                              w));
  }
}

std::string ReadCpuModel() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(colon + 2);
    }
  }
  return "unknown";
}

}  // namespace

Summary Summarize(std::vector<double> seconds) {
  if (seconds.empty()) throw Error(ErrorCode::kInvalidConfig, "no samples to summarize");
  std::sort(seconds.begin(), seconds.end());
  return Summary{Percentile(seconds, 0.5), Percentile(seconds, 0.1), Percentile(seconds, 0.9),
                 seconds.size()};
}

std::vector<double> Measure(int warmup, int samples, const std::function<void()>& fn,
                            const std::function<void()>& setup) {
  for (int i = 0; i < warmup; ++i) {
    if (setup) setup();
    fn();
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    if (setup) setup();
    const auto t0 = SteadyClock::now();
    fn();
    out.push_back(std::chrono::duration<double>(SteadyClock::now() - t0).count());
  }
  return out;
}

const BenchRow& BenchReport::Find(std::string_view operation, std::string_view axis_value) const {
  for (const BenchRow& row : rows) {
    if (row.operation == operation && row.axis_value == axis_value) return row;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "no row " + std::string(operation) + " at " + std::string(axis_value));
}

std::string BenchReport::ToCsv() const {
  std::ostringstream out;
  for (const auto& [key, value] : stamp) out << "# " << key << "=" << value << "\n";
  out << kCsvHeader << "\n";
  for (const BenchRow& r : rows) {
    const double throughput =
        static_cast<double>(r.ops) / r.timing.median / static_cast<double>(r.workers);
    out << suite << "," << r.operation << "," << axis << "," << r.axis_value << "," << r.workers
        << "," << r.timing.samples << "," << r.ops << "," << Num(r.timing.median) << ","
        << Num(r.timing.p10) << "," << Num(r.timing.p90) << "," << Num(throughput) << "\n";
  }
  return out.str();
}

void BenchOptions::Validate() const {
  if (warmup < 3) throw Error(ErrorCode::kInvalidConfig, "warmup must be at least 3");
  if (samples < 5) throw Error(ErrorCode::kInvalidConfig, "samples must be at least 5");
  if (reps < samples) throw Error(ErrorCode::kInvalidConfig, "reps must be at least samples");
  if (corpus_rows == 0 || corpus_dim == 0 || thread_rows == 0 || thread_dim == 0) {
    throw Error(ErrorCode::kInvalidConfig, "corpus sizes must be positive");
  }
}

std::vector<std::pair<std::string, std::string>> EnvironmentStamp(const he::Context& ctx,
                                                                  std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> stamp;
  const he::CipherParams& p = ctx.params();
  stamp.emplace_back("ring_degree", std::to_string(p.ring_degree));
  stamp.emplace_back("modulus", std::to_string(p.modulus));
  stamp.emplace_back("scale_bits", std::to_string(p.scale_bits));
  stamp.emplace_back("noise_stddev", Num(p.noise_stddev));
  stamp.emplace_back("seed", std::to_string(seed));
  char host[256] = {};
  if (gethostname(host, sizeof(host) - 1) != 0) std::snprintf(host, sizeof(host), "unknown");
  stamp.emplace_back("host", host);
  stamp.emplace_back("cpu", ReadCpuModel());
  stamp.emplace_back("hardware_threads", std::to_string(std::thread::hardware_concurrency()));
  stamp.emplace_back("compiler", __VERSION__);
#ifdef NDEBUG
  stamp.emplace_back("build", "release");
#else
  stamp.emplace_back("build", "debug");
#endif
  const std::time_t now = std::time(nullptr);
  char when[32];
  std::strftime(when, sizeof(when), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  stamp.emplace_back("utc", when);
  return stamp;
}

BenchReport RunSuite(std::string_view suite, const he::KeyPair& keys, const BenchOptions& opts) {
  if (std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end()) {
    throw Error(ErrorCode::kUnknownSuite, "unknown suite '" + std::string(suite) + "'");
  }
  opts.Validate();
  BenchReport report;
  report.suite = std::string(suite);
  report.stamp = EnvironmentStamp(*keys.pk.context(), opts.seed);
  report.stamp.emplace_back("suite", report.suite);
  report.stamp.emplace_back("warmup", std::to_string(opts.warmup));
  report.stamp.emplace_back("samples", std::to_string(opts.samples));
  if (suite == "primitives") {
    Primitives(keys, opts, report);
  } else if (suite == "mc") {
    Mc(keys, opts, report);
  } else if (suite == "pivots") {
    Pivots(keys, opts, report);
  } else if (suite == "weak") {
    Weak(keys, opts, report);
  } else if (suite == "speedup") {
    Speedup(keys, opts, report);
  } else {
    Threads(keys, opts, report);
  }
  return report;
}

}  // namespace frag::bench
