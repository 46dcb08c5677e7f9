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

// Micro-benchmark harness. Every suite reports medians with the 10th and
// 90th percentiles after warm-up, and stamps the CSV with the parameter set,
// seed and host.
//
// CSV layout (header row fixed for every suite):
//   # key=value            stamp lines
//   suite,operation,axis,axis_value,workers,samples,ops,median_s,p10_s,p90_s,ops_per_s_per_worker
//
// median/p10/p90 are seconds per sample; a sample covers `ops` operations.

#ifndef FRAG_BENCH_BENCH_HPP_
#define FRAG_BENCH_BENCH_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "frag/he/keys.hpp"

namespace frag::bench {

inline constexpr std::string_view kCsvHeader =
    "suite,operation,axis,axis_value,workers,samples,ops,median_s,p10_s,p90_s,"
    "ops_per_s_per_worker";

inline const std::vector<std::string> kSuites = {"primitives", "mc",      "pivots",
                                                 "weak",       "speedup", "threads"};

struct Summary {
  double median = 0;
  double p10 = 0;
  double p90 = 0;
  std::size_t samples = 0;
};

// Percentiles by linear interpolation between order statistics.
// INVALID_CONFIG on an empty input.
Summary Summarize(std::vector<double> seconds);

// Runs `fn` warmup times untimed, then `samples` timed calls. `setup`, when
// given, runs untimed before every call.
std::vector<double> Measure(int warmup, int samples, const std::function<void()>& fn,
                            const std::function<void()>& setup = nullptr);

struct BenchRow {
  std::string operation;
  std::string axis_value;
  int workers = 1;
  std::uint64_t ops = 1;
  Summary timing;
};

struct BenchReport {
  std::string suite;
  std::string axis;
  std::vector<BenchRow> rows;
  // Ordered stamp: params, seed, host, plus suite-level derived values.
  std::vector<std::pair<std::string, std::string>> stamp;

  // INVALID_CONFIG if no row matches.
  const BenchRow& Find(std::string_view operation, std::string_view axis_value) const;
  std::string ToCsv() const;
};

struct BenchOptions {
  std::uint64_t seed = 1;
  int warmup = 3;
  int samples = 5;
  // Per-operation repetitions for the mc, pivots and weak suites.
  int reps = 1000;
  std::size_t corpus_rows = 10000;
  std::size_t corpus_dim = 64;
  // Worker sweep upper bound; 0 means min(96, hardware threads).
  int max_threads = 0;
  // Records scanned per sample in the threads suite.
  std::size_t thread_rows = 1000;
  std::size_t thread_dim = 16;

  // INVALID_CONFIG for warmup < 3, samples < 5 or non-positive sizes.
  void Validate() const;
};

// UNKNOWN_SUITE for names outside kSuites.
BenchReport RunSuite(std::string_view suite, const he::KeyPair& keys, const BenchOptions& opts);

// Host description for CSV stamps.
std::vector<std::pair<std::string, std::string>> EnvironmentStamp(const he::Context& ctx,
                                                                  std::uint64_t seed);

}  // namespace frag::bench

#endif  // FRAG_BENCH_BENCH_HPP_
