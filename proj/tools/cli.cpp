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

#include "cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "frag/bench/bench.hpp"
#include "frag/federation/coordinator.hpp"
#include "frag/federation/net.hpp"
#include "frag/federation/node.hpp"
#include "frag/federation/share_table.hpp"
#include "frag/federation/transport.hpp"
#include "frag/he/serialize.hpp"
#include "frag/mc/pivot_cache.hpp"

namespace frag::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kBenchHelp =
    "Writes CSV: '# key=value' stamp lines (params, seed, host), then the header\n"
    "suite,operation,axis,axis_value,workers,samples,ops,median_s,p10_s,p90_s,"
    "ops_per_s_per_worker\n"
    "median/p10/p90 are seconds per sample; one sample covers `ops` operations.";
constexpr const char* kStatsHelp =
    "Prints CSV: pivots,frac_bits,zero_pool,hits,misses,evictions,pool_refills";
constexpr const char* kQueryHelp = "Prints CSV: rank,id,score (score with 6 decimals).";

// Options shared by several commands; any of them may come from --config.
struct Globals {
  std::string pk_path;
  std::string sk_path;
  std::optional<std::uint64_t> seed;
  he::CipherParams params;
  std::vector<std::string> nodes;
  std::string mode = "local";
  std::uint32_t k = 10;
  int timeout_ms = 10000;
  std::string aggregator;
  int pivots = 16;
  int frac_bits = -1;  // -1: min(10, pivots - 1)
  std::size_t zero_pool = 256;
  double ttl = 3600;
  std::size_t capacity = 65536;
  int threads = 1;
};

Rng MakeRng(const Globals& g) { return g.seed ? Rng(*g.seed) : Rng::FromEntropy(); }

he::PublicKey LoadPk(const Globals& g) {
  if (g.pk_path.empty()) throw Error(ErrorCode::kUsage, "--pk is required");
  return he::DeserializePublicKey(ReadFile(g.pk_path));
}

he::SecretKey LoadSk(const Globals& g, const he::ContextPtr& ctx) {
  if (g.sk_path.empty()) throw Error(ErrorCode::kUsage, "--sk is required");
  return he::DeserializeSecretKey(ReadFile(g.sk_path), ctx);
}

mc::CacheConfig MakeCacheConfig(const Globals& g) {
  mc::CacheConfig cfg;
  cfg.pivot_count = g.pivots;
  cfg.frac_bits = g.frac_bits >= 0 ? g.frac_bits : std::min(10, g.pivots - 1);
  cfg.zero_pool_size = g.zero_pool;
  cfg.ttl_seconds = g.ttl;
  cfg.capacity = g.capacity;
  return cfg;
}

std::uint64_t CacheSeed(const Globals& g) {
  return g.seed ? *g.seed : Rng::FromEntropy().NextU64();
}

double ParseDouble(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || text.empty()) {
    throw Error(ErrorCode::kMalformedFile, where + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// ---------------------------------------------------------------- keygen

void WriteOwnerOnly(const std::string& path, const Bytes& bytes) {
  {
    std::ofstream touch(path, std::ios::binary | std::ios::trunc);
    if (!touch) throw Error(ErrorCode::kIoError, "cannot create " + path);
  }
  std::error_code ec;
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace, ec);
  WriteFile(path, bytes);
}

int Keygen(const Globals& g, const std::string& dir, bool with_cache, std::ostream& out) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIoError, "output directory " + dir + " does not exist");
  const std::uint64_t seed = g.seed ? *g.seed : Rng::FromEntropy().NextU64();
  const he::KeyPair keys = he::KeyGen(g.params, seed);
  const std::string pk_path = (fs::path(dir) / "pk.bin").string();
  const std::string sk_path = (fs::path(dir) / "sk.bin").string();
  WriteFile(pk_path, he::SerializePublicKey(keys.pk));
  WriteOwnerOnly(sk_path, he::SerializeSecretKey(keys.sk));
  out << "wrote " << pk_path << "\n" << "wrote " << sk_path << "\n";
  if (with_cache) {
    const std::string cache_path = (fs::path(dir) / "cache.bin").string();
    mc::PivotCache::Build(keys.pk, MakeCacheConfig(g), seed)->Save(cache_path);
    out << "wrote " << cache_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- ingest

int Ingest(const Globals& g, const std::string& csv, const std::string& out_path, bool use_cache,
           const std::string& cache_file, int split, std::ostream& out) {
  const he::PublicKey pk = LoadPk(g);
  const auto rows = ReadVectorCsv(csv);
  if (rows.empty()) throw Error(ErrorCode::kMalformedFile, csv + " holds no rows");
  Rng rng = MakeRng(g);
  std::unique_ptr<mc::PivotCache> cache;
  if (!cache_file.empty()) {
    cache = mc::PivotCache::Load(cache_file, pk, CacheSeed(g));
  } else if (use_cache) {
    cache = mc::PivotCache::Build(pk, MakeCacheConfig(g), CacheSeed(g));
  }
  const vecdb::VectorStore store = vecdb::Ingest(rows, pk, cache.get(), &rng);
  vecdb::Save(store, out_path);
  out << "ingested " << store.size() << " records of dim " << store.dim() << " into " << out_path
      << "\n";
  if (cache && !cache_file.empty()) cache->Save(cache_file);
  if (split > 0) {
    const auto tables = fed::SplitStore(store, split, rng);
    for (std::size_t j = 0; j < tables.size(); ++j) {
      const std::string path = out_path + ".share" + std::to_string(j + 1);
      fed::SaveShareTable(tables[j], path);
      out << "wrote " << path << "\n";
    }
  }
  return kExitOk;
}

// ----------------------------------------------------------------- serve

struct ServeArgs {
  std::string store;
  std::string shares;
  std::string listen;
  std::string port_file;
  std::string role = "node";
  int node_id = 1;
};

void WaitForTermination() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
}

int Serve(const Globals& g, const ServeArgs& a, std::ostream& out, std::ostream& err) {
  // Blocked before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  const he::PublicKey pk = LoadPk(g);
  const he::ContextPtr& ctx = pk.context();
  std::mutex log_mu;
  auto log = [&](const std::string& line) {
    std::lock_guard<std::mutex> lock(log_mu);
    err << line << std::endl;
  };

  std::unique_ptr<fed::Node> node;
  std::unique_ptr<fed::AggregatorService> service;
  fed::FrameServer::Handler handler;
  if (a.role == "aggregator") {
    if (g.nodes.empty()) throw Error(ErrorCode::kUsage, "aggregator role needs --nodes");
    std::vector<fed::Address> addresses;
    for (const auto& n : g.nodes) addresses.push_back(fed::ParseAddress(n));
    service = std::make_unique<fed::AggregatorService>(
        std::make_unique<fed::SocketTransport>(addresses, g.timeout_ms), ctx);
    service->set_log(log);
    handler = [&service](ByteSpan req) { return service->HandleFrame(req); };
  } else if (a.role == "node") {
    if (a.store.empty() && a.shares.empty()) {
      throw Error(ErrorCode::kUsage, "serve needs --store and/or --shares");
    }
    node = std::make_unique<fed::Node>(static_cast<std::uint16_t>(a.node_id), ctx);
    if (!a.store.empty()) node->SetStore(vecdb::Load(a.store, ctx));
    if (!a.shares.empty()) node->SetShareTable(fed::LoadShareTable(a.shares, ctx));
    node->set_threads(g.threads);
    node->set_log(log);
    handler = [&node](ByteSpan req) { return node->HandleFrame(req); };
  } else {
    throw Error(ErrorCode::kUsage, "unknown role '" + a.role + "'");
  }

  fed::FrameServer server(fed::ParseAddress(a.listen), handler);
  if (!a.port_file.empty()) {
    const std::string port = std::to_string(server.port()) + "\n";
    WriteFile(a.port_file, ByteSpan(reinterpret_cast<const std::uint8_t*>(port.data()), port.size()));
  }
  out << "listening on " << fed::Address{fed::ParseAddress(a.listen).host, server.port()}.ToString()
      << " as " << a.role << std::endl;
  server.Start();
  WaitForTermination();
  server.Stop();
  return kExitOk;
}

// ----------------------------------------------------------------- query

struct QueryArgs {
  std::string vector;
  std::string query_file;
  std::string audit_csv;
  bool extra_round = false;
};

std::vector<double> QueryVector(const QueryArgs& a) {
  if (!a.vector.empty() && !a.query_file.empty()) {
    throw Error(ErrorCode::kUsage, "give either --vector or --query, not both");
  }
  if (!a.vector.empty()) {
    std::vector<double> q;
    for (const auto& f : SplitFields(a.vector)) q.push_back(ParseDouble(f, "--vector"));
    return q;
  }
  if (a.query_file.empty()) throw Error(ErrorCode::kUsage, "--vector or --query is required");
  const auto rows = ReadVectorCsv(a.query_file);
  if (rows.size() != 1) {
    throw Error(ErrorCode::kUsage, a.query_file + " must hold exactly one row, found " +
                                       std::to_string(rows.size()));
  }
  return rows[0].values;
}

int Query(const Globals& g, const QueryArgs& a, std::ostream& out, std::ostream& err) {
  if (g.k == 0) throw Error(ErrorCode::kUsage, "--k must be at least 1");
  if (g.nodes.empty()) throw Error(ErrorCode::kUsage, "--nodes is required");
  const he::PublicKey pk = LoadPk(g);
  const he::SecretKey sk = LoadSk(g, pk.context());
  const std::vector<double> q = QueryVector(a);

  fed::FederationConfig cfg;
  cfg.nodes = g.nodes;
  cfg.mode = fed::ParseMode(g.mode);
  cfg.k = g.k;
  cfg.transport = fed::TransportKind::kSocket;
  cfg.aggregator = g.aggregator;
  std::vector<fed::Address> endpoints;
  if (g.aggregator.empty()) {
    for (const auto& n : g.nodes) endpoints.push_back(fed::ParseAddress(n));
  } else {
    endpoints.push_back(fed::ParseAddress(g.aggregator));
  }
  fed::Client client(cfg, std::make_unique<fed::SocketTransport>(endpoints, g.timeout_ms), pk);
  if (a.extra_round && client.coordinator() != nullptr) {
    client.coordinator()->set_inject_extra_round(true);
  }
  Rng rng = MakeRng(g);
  const fed::QueryId qid = client.SubmitQuery(q, rng);

  if (const fed::RoundLog* log = client.log(qid)) {
    const fed::AuditReport report = fed::AuditComplexity(*log, q.size(), g.nodes.size(), cfg.mode,
                                                         *pk.context());
    if (!a.audit_csv.empty()) {
      const bool fresh = !fs::exists(a.audit_csv);
      std::ofstream audit(a.audit_csv, std::ios::app);
      if (!audit) throw Error(ErrorCode::kIoError, "cannot open " + a.audit_csv);
      const std::string body = report.csv.substr(report.csv.find('\n') + 1);
      if (fresh) audit << fed::kAuditCsvHeader << "\n";
      audit << body;
    }
  } else {
    err << "audit performed by the aggregator at " << g.aggregator << "\n";
  }

  // Rank on the printed precision so scores that print equal are ordered by
  // id; decryption noise alone would otherwise split exact ties.
  const fed::AggregateMsg& agg = client.Aggregate(qid);
  auto hits = fed::ClientFinalize(agg, sk, static_cast<std::uint32_t>(agg.combined.size()));
  for (fed::Hit& h : hits) h.score = std::round(h.score * 1e6) / 1e6 + 0.0;
  std::stable_sort(hits.begin(), hits.end(), [](const fed::Hit& a, const fed::Hit& b) {
    return a.score != b.score ? a.score > b.score : a.record_id < b.record_id;
  });
  if (hits.size() > g.k) hits.resize(g.k);
  out << "rank,id,score\n" << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    out << i + 1 << "," << hits[i].record_id << "," << hits[i].score << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- bench

int Bench(const Globals& g, const std::string& suite, const std::string& out_path,
          const bench::BenchOptions& base, std::ostream& out) {
  if (std::find(bench::kSuites.begin(), bench::kSuites.end(), suite) == bench::kSuites.end()) {
    throw Error(ErrorCode::kUnknownSuite, "unknown suite '" + suite + "'");
  }
  const he::PublicKey pk = LoadPk(g);
  const he::KeyPair keys{pk, LoadSk(g, pk.context())};
  bench::BenchOptions opts = base;
  opts.seed = g.seed.value_or(1);
  const bench::BenchReport report = bench::RunSuite(suite, keys, opts);
  const std::string csv = report.ToCsv();
  if (out_path.empty()) {
    out << csv;
  } else {
    WriteFile(out_path, ByteSpan(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
    out << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- stats

int Stats(const std::string& cache_file, std::ostream& out) {
  mc::CacheConfig cfg;
  const mc::CacheStats s = mc::PivotCache::ReadStats(ReadFile(cache_file), &cfg);
  out << "pivots,frac_bits,zero_pool,hits,misses,evictions,pool_refills\n"
      << cfg.pivot_count << "," << cfg.frac_bits << "," << cfg.zero_pool_size << "," << s.hits
      << "," << s.misses << "," << s.evictions << "," << s.pool_refills << "\n";
  return kExitOk;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNodeUnreachable:
    case ErrorCode::kBindFailure:
      return kExitNetwork;
    case ErrorCode::kContractViolation:
      return kExitContract;
    case ErrorCode::kUsage:
    case ErrorCode::kUnknownSuite:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

std::vector<vecdb::PlainVector> ReadVectorCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::vector<vecdb::PlainVector> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const auto fields = SplitFields(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() < 2) throw Error(ErrorCode::kMalformedFile, where + ": need an id and values");
    vecdb::PlainVector row;
    const double id = ParseDouble(fields[0], where);
    if (id < 0 || id != static_cast<double>(static_cast<std::uint64_t>(id))) {
      throw Error(ErrorCode::kMalformedFile, where + ": id '" + fields[0] + "' is not a non-negative integer");
    }
    row.id = static_cast<std::uint64_t>(id);
    for (std::size_t i = 1; i < fields.size(); ++i) row.values.push_back(ParseDouble(fields[i], where));
    if (rows.empty()) dim = row.values.size();
    if (row.values.size() != dim) {
      throw Error(ErrorCode::kDimMismatch, where + " (row " + std::to_string(rows.size()) + "): " +
                                               std::to_string(row.values.size()) + " values, expected " +
                                               std::to_string(dim));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Federated retrieval over encrypted vectors", "frag"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file; keys are long option names");
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--pk", g.pk_path, "Public key file");
  app.add_option("--sk", g.sk_path, "Secret key file");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for deterministic runs");
  app.add_option("--ring-degree", g.params.ring_degree, "Ring degree N (keygen)");
  app.add_option("--modulus", g.params.modulus, "Ciphertext modulus q (keygen)");
  app.add_option("--noise-stddev", g.params.noise_stddev, "Error standard deviation (keygen)");
  app.add_option("--scale-bits", g.params.scale_bits, "log2 of the encoding scale (keygen)");
  app.add_option("--nodes", g.nodes, "Node addresses host:port")->delimiter(',');
  app.add_option("--mode", g.mode, "local or split");
  app.add_option("--k", g.k, "Number of results");
  app.add_option("--timeout-ms", g.timeout_ms, "Connect timeout");
  app.add_option("--aggregator", g.aggregator, "Standalone aggregator host:port");
  auto* pivots_opt = app.add_option("--pivots", g.pivots, "Cache pivot count P")->check(CLI::Range(4, 64));
  app.add_option("--frac-bits", g.frac_bits, "Cache grid 2^-frac_bits (default min(10, P-1))");
  app.add_option("--zero-pool", g.zero_pool, "Cache zero pool size");
  app.add_option("--ttl", g.ttl, "Cache entry TTL seconds (0 = never)");
  app.add_option("--capacity", g.capacity, "Cache capacity");
  app.add_option("--threads", g.threads, "Worker threads for node scans")->check(CLI::PositiveNumber);

  std::string keygen_out;
  bool keygen_cache = false;
  auto* keygen = app.add_subcommand("keygen", "Write pk.bin and sk.bin (sk owner-only)");
  keygen->add_option("--out", keygen_out, "Existing output directory")->required();
  keygen->add_flag("--cache", keygen_cache, "Also build cache.bin from the pivot settings");

  std::string csv, store_out, cache_file;
  bool use_cache = false;
  int split = 0;
  auto* ingest = app.add_subcommand("ingest", "Encrypt a CSV of id,v1..vm rows into a store");
  ingest->add_option("--csv", csv, "Input CSV")->required();
  ingest->add_option("--out", store_out, "Store file")->required();
  ingest->add_flag("--cache", use_cache, "Encrypt through a pivot cache (implied by --pivots)");
  ingest->add_option("--cache-file", cache_file, "Saved cache to load; counters are written back");
  ingest->add_option("--split", split, "Also write n share tables OUT.share1..n")->check(CLI::Range(1, 65535));

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Serve a store and/or share table over TCP");
  serve->add_option("--store", serve_args.store, "Store file");
  serve->add_option("--shares", serve_args.shares, "Share table file");
  serve->add_option("--listen", serve_args.listen, "host:port (port 0 picks one)")->required();
  serve->add_option("--node-id", serve_args.node_id, "Node id")->check(CLI::Range(1, 65535));
  serve->add_option("--port-file", serve_args.port_file, "Write the bound port here");
  serve->add_option("--role", serve_args.role, "node or aggregator");

  QueryArgs query_args;
  auto* query = app.add_subcommand("query", "Run one query against the federation");
  query->footer(kQueryHelp);
  query->add_option("--vector", query_args.vector, "Comma-separated query values");
  query->add_option("--query", query_args.query_file, "CSV file holding one id,v1..vm row");
  query->add_option("--audit-csv", query_args.audit_csv, "Append the round/message audit here");
  query->add_flag("--inject-extra-round", query_args.extra_round, "Test hook: break the round contract");

  std::string suite, bench_out;
  bench::BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->footer(kBenchHelp);
  bench_cmd->add_option("--suite", suite, "primitives|mc|pivots|weak|speedup|threads")->required();
  bench_cmd->add_option("--out", bench_out, "CSV output (default stdout)");
  bench_cmd->add_option("--warmup", bench_opts.warmup, "Warm-up iterations (>= 3)");
  bench_cmd->add_option("--samples", bench_opts.samples, "Timed samples (>= 5)");
  bench_cmd->add_option("--reps", bench_opts.reps, "Per-operation repetitions");
  bench_cmd->add_option("--rows", bench_opts.corpus_rows, "Speedup corpus rows");
  bench_cmd->add_option("--dim", bench_opts.corpus_dim, "Speedup corpus dimension");
  bench_cmd->add_option("--max-threads", bench_opts.max_threads, "Thread sweep bound (0 = auto)");

  std::string stats_file;
  auto* stats = app.add_subcommand("stats", "Print cache counters as CSV");
  stats->footer(kStatsHelp);
  stats->add_option("--cache-file", stats_file, "Saved cache")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*keygen) return Keygen(g, keygen_out, keygen_cache, out);
    if (*ingest) {
      return Ingest(g, csv, store_out, use_cache || pivots_opt->count() > 0, cache_file, split, out);
    }
    if (*serve) return Serve(g, serve_args, out, err);
    if (*query) return Query(g, query_args, out, err);
    if (*bench_cmd) return Bench(g, suite, bench_out, bench_opts, out);
    return Stats(stats_file, out);
  } catch (const Error& e) {
    err << "frag: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "frag: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace frag::cli
