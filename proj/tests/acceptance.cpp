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

// Acceptance run. Prints one "ACnn PASS|FAIL" line per criterion and exits
// non-zero if any criterion fails. `--only 1,7` restricts the run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "frag/bench/bench.hpp"
#include "frag/common/bytes.hpp"
#include "frag/common/rng.hpp"
#include "frag/federation/coordinator.hpp"
#include "frag/federation/net.hpp"
#include "frag/federation/node.hpp"
#include "frag/federation/transport.hpp"
#include "frag/he/cipher.hpp"
#include "frag/he/keys.hpp"
#include "frag/he/serialize.hpp"
#include "frag/he/tensor.hpp"
#include "frag/mc/pivot_cache.hpp"
#include "frag/sharing/sharing.hpp"
#include "frag/vecdb/store.hpp"
#include "support/golden.hpp"
#include "support/oracles.hpp"
#include "support/wire_scan.hpp"

namespace frag {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

he::ContextPtr& Ctx() {
  static he::ContextPtr ctx = he::Context::Create(he::CipherParams{});
  return ctx;
}

const he::KeyPair& Keys() {
  static const he::KeyPair keys = he::KeyGen(Ctx(), 2026);
  return keys;
}

std::vector<double> UnitVector(Rng& rng, std::size_t m) {
  std::vector<double> v(m);
  double norm = 0;
  for (double& x : v) {
    x = rng.UniformReal(-1, 1);
    norm += x * x;
  }
  for (double& x : v) x /= std::sqrt(norm);
  return v;
}

double Norm(const std::vector<double>& v) { return std::sqrt(oracle::Dot(v, v)); }

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::vector<const fed::Node*> Ptrs(const std::vector<std::unique_ptr<fed::Node>>& nodes) {
  std::vector<const fed::Node*> out;
  for (const auto& n : nodes) out.push_back(n.get());
  return out;
}

std::vector<vecdb::PlainVector> Corpus(Rng& rng, std::size_t rows, std::size_t m) {
  std::vector<vecdb::PlainVector> out;
  for (std::size_t i = 0; i < rows; ++i) out.push_back(vecdb::PlainVector{i + 1, UnitVector(rng, m)});
  return out;
}

// ---------------------------------------------------------------------------

Outcome CipherCorrectness() {
  const auto start = Clock::now();
  const auto& keys = Keys();
  Rng rng(101);
  double add_err = 0, mul_err = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.UniformReal(-1, 1);
    const double b = rng.UniformReal(-1, 1);
    const auto ea = he::Encrypt(a, keys.pk, rng);
    const auto eb = he::Encrypt(b, keys.pk, rng);
    add_err = std::max(add_err, std::abs(he::Decrypt(he::EvalAdd(ea, eb), keys.sk) - (a + b)));
    mul_err = std::max(mul_err, std::abs(he::Decrypt(he::EvalMulCipher(ea, eb), keys.sk) - a * b));
  }
  const double secs = Seconds(start);
  return {add_err <= 1e-6 && mul_err <= 1e-6 && secs < 300,
          "max add err " + Fmt("%.3g", add_err) + ", max mul err " + Fmt("%.3g", mul_err) +
              " (tol 1e-6), " + Fmt("%.1f", secs) + " s (limit 300)"};
}

Outcome DotProductIdentity() {
  const auto start = Clock::now();
  const auto& keys = Keys();
  const std::size_t m = 768;
  const int n = 3;
  Rng rng(102);
  double worst = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const auto v = UnitVector(rng, m);
    const auto q = UnitVector(rng, m);
    std::vector<std::vector<sharing::CipherShare>> by_party(n);
    std::vector<Digest> commitments;
    std::vector<he::PreparedCiphertext> query;
    for (std::size_t i = 0; i < m; ++i) {
      auto shares = sharing::Split(he::Encrypt(v[i], keys.pk, rng), n, rng);
      commitments.push_back(shares[0].commitment);
      for (int j = 0; j < n; ++j) by_party[j].push_back(std::move(shares[j]));
      query.emplace_back(he::Encrypt(q[i], keys.pk, rng));
    }
    const Digest record = sharing::RecordCommitment(commitments);
    std::vector<sharing::PartialResult> partials;
    for (int j = 0; j < n; ++j) {
      partials.push_back(sharing::ShareDot(by_party[j], query, static_cast<std::uint64_t>(pair), record));
    }
    const double got = he::Decrypt(sharing::AggregatePartials(partials), keys.sk);
    worst = std::max(worst, std::abs(got - oracle::Dot(v, q)) / (Norm(v) * Norm(q)));
  }
  const double secs = Seconds(start);
  return {worst <= 1e-3 && secs < 600,
          "max relative err " + Fmt("%.3g", worst) + " (tol 1e-3), n=3, " + Fmt("%.1f", secs) +
              " s (limit 600)"};
}

Outcome ShareAlgebra() {
  const auto& keys = Keys();
  Rng rng(103);
  int merge_bad = 0, hom_bad = 0;
  for (int n = 1; n <= 10; ++n) {
    for (int t = 0; t < 1000; ++t) {
      const auto ct = he::Encrypt(rng.UniformReal(-1, 1), keys.pk, rng);
      const auto shares = sharing::Split(ct, n, rng);
      if (he::SerializeCiphertext(sharing::Merge(shares)) != he::SerializeCiphertext(ct)) ++merge_bad;
    }
  }
  for (int n : {1, 2, 3, 5, 8}) {
    for (int t = 0; t < 1000; ++t) {
      const auto a = he::Encrypt(rng.UniformReal(-1, 1), keys.pk, rng);
      const auto b = he::Encrypt(rng.UniformReal(-1, 1), keys.pk, rng);
      he::Ciphertext sum;
      bool first = true;
      for (const auto& s : sharing::Split(a, n, rng)) {
        auto part = sharing::ShareHomOp(s, b, static_cast<std::uint64_t>(t)).value;
        if (first) {
          sum = std::move(part);
          first = false;
        } else {
          he::EvalAddInPlace(sum, part);
        }
      }
      const auto want = he::EvalMulCipher(a, b);
      if (sum.polys() != want.polys() || sum.scale_exp() != want.scale_exp()) ++hom_bad;
    }
  }
  return {merge_bad == 0 && hom_bad == 0,
          "merge(split) mismatches " + std::to_string(merge_bad) + "/10000, share-sum vs product mismatches " +
              std::to_string(hom_bad) + "/5000"};
}

// Node data for one mode. Both modes over one process would hold the store,
// its partitions and n full share tables at once (about 5 GB at 1000 x 64),
// so the modes run one after the other against fresh servers.
struct SocketFederation {
  std::vector<std::unique_ptr<fed::Node>> nodes;
  std::vector<std::unique_ptr<fed::FrameServer>> servers;
  std::vector<fed::Address> addresses;

  void Start() {
    for (const auto& node : nodes) {
      servers.push_back(std::make_unique<fed::FrameServer>(
          fed::Address{"127.0.0.1", 0}, [p = node.get()](ByteSpan req) { return p->HandleFrame(req); }));
      servers.back()->Start();
      addresses.push_back(fed::Address{"127.0.0.1", servers.back()->port()});
    }
  }
  ~SocketFederation() {
    for (auto& s : servers) s->Stop();
  }
};

Outcome EndToEndFederation() {
  const auto start = Clock::now();
  const auto& keys = Keys();
  const std::size_t m = 64, k = 10, n = 3, queries = 50;
  Rng rng(104);
  const auto rows = Corpus(rng, 1000, m);
  std::vector<std::vector<double>> qs;
  for (std::size_t i = 0; i < queries; ++i) qs.push_back(UnitVector(rng, m));
  auto store = std::make_unique<vecdb::VectorStore>(vecdb::Ingest(rows, keys.pk, nullptr, &rng));

  const fed::Mode modes[2] = {fed::Mode::kLocalScore, fed::Mode::kShareSplit};
  std::vector<std::map<std::uint64_t, double>> scores[2];
  std::vector<std::set<std::uint64_t>> got[2];
  for (int c = 0; c < 2; ++c) {
    SocketFederation fedn;
    if (modes[c] == fed::Mode::kLocalScore) {
      auto parts = fed::PartitionStore(*store, n);
      for (std::size_t j = 0; j < n; ++j) {
        fedn.nodes.push_back(std::make_unique<fed::Node>(static_cast<std::uint16_t>(j + 1), Ctx()));
        fedn.nodes.back()->SetStore(std::move(parts[j]));
      }
    } else {
      // Shares are built from a fresh encryption of the same rows in blocks,
      // so the full store and all n tables never coexist.
      store.reset();
      std::vector<fed::ShareTable> tables;
      for (std::size_t begin = 0; begin < rows.size(); begin += 100) {
        const auto block = std::span(rows).subspan(begin, std::min<std::size_t>(100, rows.size() - begin));
        auto parts = fed::SplitStore(vecdb::Ingest(block, keys.pk, nullptr, &rng), static_cast<int>(n), rng);
        if (tables.empty()) {
          tables = std::move(parts);
          continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
          for (auto& r : parts[j].records) tables[j].records.push_back(std::move(r));
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        fedn.nodes.push_back(std::make_unique<fed::Node>(static_cast<std::uint16_t>(j + 1), Ctx()));
        fedn.nodes.back()->SetShareTable(std::move(tables[j]));
      }
    }
    fedn.Start();
    fed::FederationConfig cfg;
    for (const auto& a : fedn.addresses) cfg.nodes.push_back(a.ToString());
    cfg.mode = modes[c];
    cfg.k = k;
    cfg.transport = fed::TransportKind::kSocket;
    fed::Client client(cfg, std::make_unique<fed::SocketTransport>(fedn.addresses), keys.pk);
    for (const auto& q : qs) {
      const auto qid = client.SubmitQuery(q, rng);
      const auto& agg = client.Aggregate(qid);
      auto& s = scores[c].emplace_back();
      for (const auto& e : agg.combined) s[e.record_id] = he::Decrypt(e.score, keys.sk);
      auto& g = got[c].emplace_back();
      for (const auto& hit : fed::ClientFinalize(agg, keys.sk, k)) g.insert(hit.record_id);
      if (s.size() != rows.size()) return {false, std::string(fed::ModeName(modes[c])) + " did not score every record"};
      client.Forget(qid);
    }
  }

  int gap_queries = 0, matched[2] = {0, 0}, set_disagree = 0;
  double score_diff = 0;
  for (std::size_t i = 0; i < queries; ++i) {
    std::vector<std::pair<std::uint64_t, double>> plain;
    for (const auto& r : rows) plain.emplace_back(r.id, oracle::Dot(r.values, qs[i]));
    const auto ranked = oracle::TopK(plain, k + 1);
    const bool gap = ranked[k - 1].second - ranked[k].second > 2e-3;
    std::set<std::uint64_t> want;
    for (std::size_t j = 0; j < k; ++j) want.insert(ranked[j].first);
    for (int c = 0; c < 2; ++c) {
      if (gap && got[c][i] == want) ++matched[c];
    }
    for (const auto& [id, s] : scores[0][i]) score_diff = std::max(score_diff, std::abs(scores[1][i][id] - s));
    if (gap && got[0][i] != got[1][i]) ++set_disagree;
    gap_queries += gap ? 1 : 0;
  }
  const double secs = Seconds(start);
  const bool pass = matched[0] == gap_queries && matched[1] == gap_queries && set_disagree == 0 &&
                    score_diff <= 2e-6 && secs < 1800;
  return {pass, "gap queries " + std::to_string(gap_queries) + "/50, top-10 exact LOCAL_SCORE " +
                    std::to_string(matched[0]) + " SHARE_SPLIT " + std::to_string(matched[1]) +
                    ", max mode score diff " + Fmt("%.3g", score_diff) + " (tol 2e-6), " +
                    Fmt("%.1f", secs) + " s over sockets (limit 1800)"};
}

Outcome ComplexityContracts() {
  const auto& keys = Keys();
  const std::size_t m = 8;
  Rng rng(105);
  const auto store = vecdb::Ingest(Corpus(rng, 20, m), keys.pk, nullptr, &rng);
  std::ostringstream detail;
  bool pass = true;
  for (std::size_t n = 1; n <= 5; ++n) {
    auto nodes = fed::MakeNodes(store, n, rng);
    auto transport = std::make_unique<fed::InProcessTransport>(Ptrs(nodes));
    std::size_t frames = 0;
    transport->set_tap([&](fed::Transport::Direction, std::size_t, ByteSpan) { ++frames; });
    fed::FederationConfig cfg;
    cfg.nodes.assign(n, "in-process");
    cfg.mode = fed::Mode::kShareSplit;
    fed::Client client(cfg, std::move(transport), keys.pk);
    const auto qid = client.SubmitQuery(UnitVector(rng, m), rng);
    const auto report = fed::AuditComplexity(*client.log(qid), m, n, fed::Mode::kShareSplit, *Ctx());
    const bool ok = report.rounds == 2 && report.messages == 2 * n && frames == 2 * n;
    pass = pass && ok;
    detail << (n > 1 ? ", " : "") << "n=" << n << " rounds " << report.rounds << " messages "
           << report.messages << " tapped " << frames;
  }
  return {pass, detail.str()};
}

Outcome McCorrectness() {
  const auto& keys = Keys();
  const mc::CacheConfig cfg;
  auto cache = mc::PivotCache::Build(keys.pk, cfg, 106);
  Rng rng(106);
  const double limit = cfg.max_magnitude();
  const double grid = std::ldexp(1.0, cfg.frac_bits);
  double enc_err = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.UniformReal(-limit, limit);
    const double rounded = std::round(x * grid) / grid;
    enc_err = std::max(enc_err, std::abs(he::Decrypt(cache->Enc(x), keys.sk) - rounded));
  }
  std::ostringstream detail;
  detail << "cache_enc max err " << Fmt("%.3g", enc_err) << " (tol 1e-6, |x| <= " << limit << ")";
  bool pass = enc_err <= 1e-6;
  for (double delta : {0.5, 1.0, 4.0, 1024.0}) {
    double err = 0;
    for (int t = 0; t < 100; ++t) {
      const auto v = UnitVector(rng, 16);
      const auto q = UnitVector(rng, 16);
      const double s = oracle::Dot(v, q);
      const auto ct = he::Encrypt(s * delta, keys.pk, rng);
      err = std::max(err, std::abs(he::Decrypt(mc::Normalize(ct, delta), keys.sk) - s));
    }
    pass = pass && err <= 1e-3;
    detail << ", normalize delta=" << delta << " err " << Fmt("%.3g", err);
  }
  detail << " (tol 1e-3)";
  return {pass, detail.str()};
}

double MedianOf(const bench::BenchReport& report, const std::string& op) {
  for (const auto& row : report.rows) {
    if (row.operation == op) return row.timing.median;
  }
  throw std::runtime_error("no row for " + op);
}

Outcome McPerformance() {
  const auto report = bench::RunSuite("mc", Keys(), bench::BenchOptions{});
  const double fresh = MedianOf(report, "fresh_encrypt");
  const double enc = MedianOf(report, "cache_enc");
  const double mul = MedianOf(report, "cache_mul_plain");
  const double enc_over_mul = enc / mul;
  const double fresh_over_enc = fresh / enc;
  return {enc_over_mul >= 10 && fresh_over_enc >= 5,
          "cache_enc/cache_mul_plain " + Fmt("%.2f", enc_over_mul) + "x (floor 10), fresh/cache_enc " +
              Fmt("%.2f", fresh_over_enc) + "x (floor 5); medians fresh " + Fmt("%.3g", fresh) +
              " s, cache_enc " + Fmt("%.3g", enc) + " s, cache_mul_plain " + Fmt("%.3g", mul) + " s"};
}

Outcome PivotTrend() {
  const auto report = bench::RunSuite("pivots", Keys(), bench::BenchOptions{});
  std::ostringstream detail;
  bool pass = report.rows.size() == 5;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    detail << (i ? ", " : "") << "P=" << row.axis_value << " " << Fmt("%.3g", row.timing.median) << " s";
    if (i > 0 && row.timing.median < 0.9 * report.rows[i - 1].timing.median) pass = false;
  }
  detail << " (non-decreasing, 10% step slack)";
  return {pass, detail.str()};
}

Outcome WeakScaling() {
  const auto report = bench::RunSuite("weak", Keys(), bench::BenchOptions{});
  double base = 0;
  bool pass = report.rows.size() == 3;
  std::ostringstream detail;
  for (const auto& row : report.rows) {
    const double per = row.timing.median / static_cast<double>(row.ops);
    if (base == 0) base = per;
    const double rel = per / base - 1;
    if (std::abs(rel) > 0.25) pass = false;
    detail << (row.axis_value == report.rows.front().axis_value ? "" : ", ") << "batch " << row.axis_value
           << " " << Fmt("%.3g", per) << " s/msg (" << Fmt("%+.1f", 100 * rel) << "%)";
  }
  detail << " (tol 25%)";
  return {pass, detail.str()};
}

Outcome PipelineSpeedup() {
  const auto report = bench::RunSuite("speedup", Keys(), bench::BenchOptions{});
  const double uncached = MedianOf(report, "pipeline_uncached");
  const double cached = MedianOf(report, "pipeline_cached");
  const double speedup = uncached / cached;
  return {speedup >= 1.3, "10000x64 median uncached " + Fmt("%.2f", uncached) + " s, cached " +
                              Fmt("%.2f", cached) + " s, speedup " + Fmt("%.2f", speedup) + "x (floor 1.3)"};
}

Outcome FreshnessUniformity() {
  const auto& keys = Keys();
  Rng rng(111);
  std::set<Bytes> distinct;
  for (int i = 0; i < 100; ++i) distinct.insert(he::SerializeCiphertext(he::Encrypt(0.5, keys.pk, rng)));

  const std::uint64_t q = Ctx()->modulus().value();
  const int bins = 16;
  const double critical = oracle::ChiSquareCritical001(bins - 1);
  double worst = 0;
  int tested = 0, rejected = 0;
  for (int n : {2, 3, 5}) {
    const auto ct = he::Encrypt(0.25, keys.pk, rng);
    std::vector<std::vector<std::uint64_t>> counts(n - 1, std::vector<std::uint64_t>(bins, 0));
    for (int t = 0; t < 50; ++t) {
      const auto shares = sharing::Split(ct, n, rng);
      for (int j = 0; j < n - 1; ++j) {
        for (const auto& poly : shares[j].body.polys()) {
          for (std::uint64_t c : poly.coeffs) {
            ++counts[j][static_cast<std::size_t>(static_cast<oracle::u128>(c) * bins / q)];
          }
        }
      }
    }
    for (const auto& c : counts) {
      const double stat = oracle::ChiSquareUniform(c);
      worst = std::max(worst, stat);
      ++tested;
      if (stat > critical) ++rejected;
    }
  }
  return {distinct.size() == 100 && rejected == 0,
          "distinct encryptions " + std::to_string(distinct.size()) + "/100, share marginals rejected " +
              std::to_string(rejected) + "/" + std::to_string(tested) + " (max chi2 " + Fmt("%.2f", worst) +
              ", critical " + Fmt("%.3f", critical) + " at df 15)"};
}

Outcome WireAndPersistence() {
  const auto set = golden::Build();
  int mismatched = 0;
  std::string which;
  for (const auto& [name, bytes] : set.files) {
    Bytes pinned;
    try {
      pinned = ReadFile(std::string(FRAG_GOLDEN_DIR) + "/" + name);
    } catch (const std::exception&) {
    }
    if (pinned != bytes) {
      ++mismatched;
      which += " " + name;
    }
  }

  const auto& keys = Keys();
  Rng rng(112);
  const std::size_t m = 8;
  const auto rows = Corpus(rng, 24, m);
  const auto store = vecdb::Ingest(rows, keys.pk, nullptr, &rng);
  auto nodes = fed::MakeNodes(store, 3, rng);
  const auto q = UnitVector(rng, m);
  wire_scan::Needles needles(Ctx()->modulus().value(), static_cast<int>(Ctx()->params().scale_bits));
  for (double x : q) needles.Add(x, 1);
  for (const auto& r : rows) {
    for (double v : r.values) needles.Add(v, 1);
    needles.Add(oracle::Dot(r.values, q), 2);
  }
  Bytes planted(5, 0x11);
  ByteWriter(&planted).PutF64(rows[3].values[2]);
  const std::size_t control = needles.Count({planted});

  std::size_t hits = 0, frames_seen = 0;
  for (fed::Mode mode : {fed::Mode::kLocalScore, fed::Mode::kShareSplit}) {
    auto transport = std::make_unique<fed::InProcessTransport>(Ptrs(nodes));
    std::vector<Bytes> frames;
    transport->set_tap([&](fed::Transport::Direction, std::size_t, ByteSpan f) {
      frames.emplace_back(f.begin(), f.end());
    });
    fed::FederationConfig cfg;
    cfg.nodes.assign(3, "in-process");
    cfg.mode = mode;
    fed::Client client(cfg, std::move(transport), keys.pk);
    client.SubmitQuery(q, rng);
    hits += needles.Count(frames);
    frames_seen += frames.size();
  }
  return {mismatched == 0 && control == 1 && hits == 0,
          "golden files matching " + std::to_string(set.files.size() - mismatched) + "/" +
              std::to_string(set.files.size()) + (which.empty() ? "" : " (differs:" + which + ")") +
              ", plaintext hits " + std::to_string(hits) + " in " + std::to_string(frames_seen) +
              " tapped frames (planted control found " + std::to_string(control) + ")"};
}

std::set<int> ParseOnly(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::stoi(item));
    } else {
      throw std::invalid_argument(std::string("unknown argument ") + argv[i]);
    }
  }
  return only;
}

int Main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "cipher correctness", CipherCorrectness},
      {2, "dot-product identity", DotProductIdentity},
      {3, "share algebra", ShareAlgebra},
      {4, "end-to-end federation", EndToEndFederation},
      {5, "complexity contracts", ComplexityContracts},
      {6, "mc correctness", McCorrectness},
      {7, "mc performance ordering", McPerformance},
      {8, "pivot trend", PivotTrend},
      {9, "weak scaling", WeakScaling},
      {10, "pipeline speedup", PipelineSpeedup},
      {11, "freshness and uniformity", FreshnessUniformity},
      {12, "wire and persistence", WireAndPersistence},
  };
  const std::set<int> only = ParseOnly(argc, argv);
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    char tag[8];
    std::snprintf(tag, sizeof(tag), "AC%02d", c.id);
    std::cout << tag << ' ' << (out.pass ? "PASS" : "FAIL") << ' ' << c.name << ": " << out.detail << " ["
              << Fmt("%.1f", Seconds(start)) << " s]" << std::endl;
    failed += out.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace frag

int main(int argc, char** argv) {
  try {
    return frag::Main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
