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

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "frag/federation/coordinator.hpp"
#include "frag/federation/net.hpp"
#include "frag/federation/share_table.hpp"
#include "frag/federation/wire.hpp"
#include "frag/he/serialize.hpp"
#include "frag/mc/pivot_cache.hpp"
#include "support/oracles.hpp"

extern char** environ;

namespace frag::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Frag(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Main(args, out, err);
  return Result{code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteText(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// A `frag serve` child process, terminated on destruction.
class Server {
 public:
  Server(const fs::path& dir, const std::string& name, std::vector<std::string> args)
      : port_file_(dir / (name + ".port")), log_(dir / (name + ".log")) {
    fs::remove(port_file_);
    args.insert(args.begin(), {FRAG_BINARY, "serve", "--port-file", port_file_.string()});
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addopen(&actions, 2, log_.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (posix_spawn(&pid_, FRAG_BINARY, &actions, nullptr, argv.data(), environ) != 0) pid_ = -1;
    posix_spawn_file_actions_destroy(&actions);
  }
  ~Server() { Stop(); }

  // Waits for the bound port; empty if the child exited first.
  std::string Address() {
    for (int i = 0; i < 200; ++i) {
      const std::string text = Slurp(port_file_);
      if (!text.empty() && text.back() == '\n') return "127.0.0.1:" + text.substr(0, text.size() - 1);
      int status = 0;
      if (pid_ <= 0 || waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return "";
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    return "";
  }
  int Stop() {
    if (pid_ <= 0) return -1;
    kill(pid_, SIGTERM);
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string log() const { return Slurp(log_); }

 private:
  fs::path port_file_;
  fs::path log_;
  pid_t pid_ = -1;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("frag_cli_" + std::to_string(getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  void Keys() {
    ASSERT_EQ(Frag({"keygen", "--out", dir_.string(), "--seed", "5"}).code, 0);
  }

  fs::path dir_;
};

TEST_F(CliTest, KeygenIsDeterministicAndPrivate) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  fs::create_directories(a);
  fs::create_directories(b);
  ASSERT_EQ(Frag({"keygen", "--out", a.string(), "--seed", "9"}).code, 0);
  ASSERT_EQ(Frag({"keygen", "--out", b.string(), "--seed", "9"}).code, 0);
  EXPECT_EQ(ReadFile((a / "pk.bin").string()), ReadFile((b / "pk.bin").string()));
  EXPECT_EQ(ReadFile((a / "sk.bin").string()), ReadFile((b / "sk.bin").string()));
  const Bytes pk = ReadFile((a / "pk.bin").string());
  EXPECT_TRUE(std::equal(he::kPublicKeyMagic.begin(), he::kPublicKeyMagic.end(), pk.begin()));
  const Bytes sk = ReadFile((a / "sk.bin").string());
  EXPECT_TRUE(std::equal(he::kSecretKeyMagic.begin(), he::kSecretKeyMagic.end(), sk.begin()));
  struct stat st {};
  ASSERT_EQ(stat((a / "sk.bin").c_str(), &st), 0);
  EXPECT_EQ(st.st_mode & 0777, 0600u);

  const Result missing = Frag({"keygen", "--out", P("nope/deeper"), "--seed", "9"});
  EXPECT_EQ(missing.code, kExitFailure);
  EXPECT_NE(missing.err.find("IO_ERROR"), std::string::npos) << missing.err;
}

TEST_F(CliTest, IngestContracts) {
  Keys();
  WriteText(dir_ / "toy.csv", "# id,values\n10,0.5,-0.5\n11,0.25,0.25\n\n12,0,1\n");
  const Result ok = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("toy.csv"), "--out", P("s.bin")});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const he::PublicKey pk = he::DeserializePublicKey(ReadFile(P("pk.bin")));
  const vecdb::VectorStore store = vecdb::Load(P("s.bin"), pk.context());
  EXPECT_EQ(store.size(), 3u);
  EXPECT_EQ(store.dim(), 2u);
  EXPECT_TRUE(store.contains(12));

  WriteText(dir_ / "ragged.csv", "1,0.5,0.5\n2,0.5\n");
  const Result ragged = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("ragged.csv"), "--out", P("r.bin")});
  EXPECT_EQ(ragged.code, kExitFailure);
  EXPECT_NE(ragged.err.find("DIM_MISMATCH"), std::string::npos) << ragged.err;
  EXPECT_NE(ragged.err.find("ragged.csv:2"), std::string::npos) << ragged.err;

  WriteText(dir_ / "big.csv", "1,0.5\n2,20000\n");
  const Result big = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("big.csv"), "--out", P("b.bin"),
                        "--pivots", "4"});
  EXPECT_EQ(big.code, kExitFailure);
  EXPECT_NE(big.err.find("REPRESENTATION_OVERFLOW"), std::string::npos) << big.err;
  EXPECT_NE(big.err.find("row 1"), std::string::npos) << big.err;

  const Result range = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("big.csv"), "--out", P("b.bin")});
  EXPECT_NE(range.err.find("PLAINTEXT_OUT_OF_RANGE"), std::string::npos) << range.err;
  WriteText(dir_ / "dup.csv", "1,0.5\n1,0.25\n");
  const Result dup = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("dup.csv"), "--out", P("d.bin")});
  EXPECT_NE(dup.err.find("DUPLICATE_ID"), std::string::npos) << dup.err;
  WriteText(dir_ / "bad.csv", "1,0.5\n2,zero\n");
  const Result bad = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("bad.csv"), "--out", P("d.bin")});
  EXPECT_NE(bad.err.find("MALFORMED_FILE"), std::string::npos) << bad.err;
}

TEST_F(CliTest, CachedIngestSplitAndStats) {
  ASSERT_EQ(Frag({"keygen", "--out", dir_.string(), "--seed", "5", "--cache", "--zero-pool", "8",
                  "--pivots", "12"})
                .code,
            0);
  const Result fresh = Frag({"stats", "--cache-file", P("cache.bin")});
  ASSERT_EQ(fresh.code, 0);
  EXPECT_EQ(fresh.out, "pivots,frac_bits,zero_pool,hits,misses,evictions,pool_refills\n12,10,8,0,0,0,0\n");

  WriteText(dir_ / "toy.csv", "1,0.5,0.5,0\n2,0.25,-1,0.125\n");
  const Result ok = Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("toy.csv"), "--out", P("s.bin"),
                       "--cache-file", P("cache.bin"), "--split", "3", "--seed", "2"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const he::PublicKey pk = he::DeserializePublicKey(ReadFile(P("pk.bin")));
  for (int j = 1; j <= 3; ++j) {
    const auto table = fed::LoadShareTable(P("s.bin.share" + std::to_string(j)), pk.context());
    EXPECT_EQ(table.party, j);
    EXPECT_EQ(table.records.size(), 2u);
  }
  const Result after = Frag({"stats", "--cache-file", P("cache.bin")});
  std::istringstream rows(after.out);
  std::string header, values;
  std::getline(rows, header);
  std::getline(rows, values);
  // Six draws from a pool of 8 cross the half-full mark once.
  EXPECT_EQ(values, "12,10,8,0,0,0,1");
}

TEST_F(CliTest, UsageAndExitCodes) {
  EXPECT_EQ(Frag({}).code, kExitUsage);
  EXPECT_EQ(Frag({"--bogus"}).code, kExitUsage);
  EXPECT_EQ(Frag({"query", "--help"}).code, kExitOk);
  const Result help = Frag({"bench", "--help"});
  EXPECT_NE(help.out.find("median_s,p10_s,p90_s"), std::string::npos);
  Keys();
  const Result k0 = Frag({"query", "--pk", P("pk.bin"), "--sk", P("sk.bin"), "--nodes", "127.0.0.1:9",
                       "--vector", "0.5", "--k", "0"});
  EXPECT_EQ(k0.code, kExitUsage);
  EXPECT_NE(k0.err.find("USAGE"), std::string::npos);
  const Result suite = Frag({"bench", "--suite", "gpu", "--pk", P("pk.bin"), "--sk", P("sk.bin")});
  EXPECT_EQ(suite.code, kExitUsage);
  EXPECT_NE(suite.err.find("UNKNOWN_SUITE"), std::string::npos);

  // A port nobody listens on.
  std::uint16_t dead = 0;
  {
    fed::FrameServer probe(fed::Address{"127.0.0.1", 0}, [](ByteSpan) { return Bytes{}; });
    dead = probe.port();
  }
  const Result down = Frag({"query", "--pk", P("pk.bin"), "--sk", P("sk.bin"), "--nodes",
                         "127.0.0.1:" + std::to_string(dead), "--vector", "0.5"});
  EXPECT_EQ(down.code, kExitNetwork);
  EXPECT_NE(down.err.find("NODE_UNREACHABLE"), std::string::npos) << down.err;
  EXPECT_NE(down.err.find("node 1"), std::string::npos) << down.err;
  EXPECT_EQ(ExitCodeFor(ErrorCode::kContractViolation), kExitContract);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kParamsMismatch), kExitFailure);
}

TEST_F(CliTest, ServeAndQueryLoopback) {
  Keys();
  // Ids 4 and 7 carry the same vector: an exact score tie.
  const std::vector<vecdb::PlainVector> rows = {{3, {0.5, 0.25, -0.5}},
                                                {4, {0.125, 0.75, 0.5}},
                                                {7, {0.125, 0.75, 0.5}},
                                                {9, {-0.5, -0.5, 0.25}},
                                                {12, {1.0, 0.0, 0.0}}};
  std::string csv;
  for (const auto& r : rows) {
    csv += std::to_string(r.id);
    for (double v : r.values) csv += "," + std::to_string(v);
    csv += "\n";
  }
  WriteText(dir_ / "c.csv", csv);
  ASSERT_EQ(Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("c.csv"), "--out", P("s.bin"), "--split",
                  "2"})
                .code,
            0);
  Server n1(dir_, "n1", {"--pk", P("pk.bin"), "--store", P("s.bin"), "--shares", P("s.bin.share1"),
                         "--listen", "127.0.0.1:0", "--node-id", "1"});
  Server n2(dir_, "n2", {"--pk", P("pk.bin"), "--shares", P("s.bin.share2"), "--listen",
                         "127.0.0.1:0", "--node-id", "2"});
  const std::string a1 = n1.Address(), a2 = n2.Address();
  ASSERT_FALSE(a1.empty()) << n1.log();
  ASSERT_FALSE(a2.empty()) << n2.log();

  const std::vector<double> q = {0.25, 0.5, 0.5};
  std::vector<std::pair<std::uint64_t, double>> scored;
  for (const auto& r : rows) scored.emplace_back(r.id, oracle::Dot(r.values, q));
  const auto want = oracle::TopK(scored, 3);
  std::string expected = "rank,id,score\n";
  for (std::size_t i = 0; i < want.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof(line), "%zu,%llu,%.6f\n", i + 1,
                  static_cast<unsigned long long>(want[i].first), want[i].second);
    expected += line;
  }
  ASSERT_EQ(want[0].first, 4u);  // tie resolved to the lower id
  ASSERT_EQ(want[1].first, 7u);

  const Result local = Frag({"query", "--pk", P("pk.bin"), "--sk", P("sk.bin"), "--nodes", a1, "--k", "3",
                          "--vector", "0.25,0.5,0.5"});
  ASSERT_EQ(local.code, 0) << local.err;
  EXPECT_EQ(local.out, expected);

  WriteText(dir_ / "fed.conf", "pk=" + P("pk.bin") + "\nsk=" + P("sk.bin") + "\nnodes=" + a1 + "," + a2 +
                                   "\nmode=split\nk=3\n");
  WriteText(dir_ / "q.csv", "0,0.25,0.5,0.5\n");
  const Result split = Frag({"query", "--config", P("fed.conf"), "--query", P("q.csv"), "--audit-csv",
                          P("audit.csv")});
  ASSERT_EQ(split.code, 0) << split.err;
  EXPECT_EQ(split.out, expected);
  const std::string audit = Slurp(dir_ / "audit.csv");
  EXPECT_EQ(audit.substr(0, audit.find('\n')), fed::kAuditCsvHeader);
  EXPECT_NE(audit.find(",SHARE_SPLIT,2,3,2,4,4,"), std::string::npos) << audit;

  const Result extra = Frag({"query", "--config", P("fed.conf"), "--vector", "0.25,0.5,0.5",
                          "--inject-extra-round"});
  EXPECT_EQ(extra.code, kExitContract);
  EXPECT_NE(extra.err.find("CONTRACT_VIOLATION"), std::string::npos);

  // Standalone aggregator in front of both nodes.
  Server agg(dir_, "agg", {"--pk", P("pk.bin"), "--role", "aggregator", "--nodes", a1 + "," + a2,
                           "--listen", "127.0.0.1:0"});
  const std::string a3 = agg.Address();
  ASSERT_FALSE(a3.empty()) << agg.log();
  const Result relayed = Frag({"query", "--config", P("fed.conf"), "--aggregator", a3, "--vector",
                            "0.25,0.5,0.5"});
  ASSERT_EQ(relayed.code, 0) << relayed.err;
  EXPECT_EQ(relayed.out, expected);

  // Foreign parameters are answered with an ERROR frame.
  fed::Connection conn = fed::Connection::Open(fed::ParseAddress(a1));
  fed::Hello foreign{};
  foreign.params_id[5] = 0x42;
  conn.WriteFrame(fed::EncodeFrame(fed::Encode(foreign)));
  const fed::Frame reply = fed::DecodeFrame(conn.ReadFrame());
  ASSERT_EQ(reply.type, fed::MsgType::kError);
  EXPECT_EQ(fed::DecodeError(reply).code, ErrorCode::kParamsMismatch);
  conn.Close();

  // The port is taken: a second server on it fails with a network exit code.
  Server dup(dir_, "dup", {"--pk", P("pk.bin"), "--store", P("s.bin"), "--listen", a1});
  EXPECT_TRUE(dup.Address().empty());
  EXPECT_NE(dup.log().find("BIND_FAILURE"), std::string::npos) << dup.log();

  EXPECT_EQ(n1.Stop(), 0);
  EXPECT_EQ(agg.Stop(), 0);
  EXPECT_NE(n1.log().find("mode=SHARE_SPLIT m=3 round=2"), std::string::npos) << n1.log();
  EXPECT_NE(n1.log().find("mode=LOCAL_SCORE"), std::string::npos);
  EXPECT_NE(agg.log().find("audit=ok"), std::string::npos) << agg.log();
}

TEST_F(CliTest, DoubleBindExitCode) {
  Keys();
  WriteText(dir_ / "c.csv", "1,0.5\n");
  ASSERT_EQ(Frag({"ingest", "--pk", P("pk.bin"), "--csv", P("c.csv"), "--out", P("s.bin")}).code, 0);
  Server first(dir_, "first", {"--pk", P("pk.bin"), "--store", P("s.bin"), "--listen", "127.0.0.1:0"});
  const std::string addr = first.Address();
  ASSERT_FALSE(addr.empty());
  const std::string cmd = std::string(FRAG_BINARY) + " serve --pk " + P("pk.bin") + " --store " +
                          P("s.bin") + " --listen " + addr + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitNetwork);
}

TEST_F(CliTest, BenchWritesCsv) {
  Keys();
  const Result r = Frag({"bench", "--suite", "pivots", "--reps", "20", "--pk", P("pk.bin"), "--sk",
                      P("sk.bin"), "--out", P("p.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(Slurp(dir_ / "p.csv"));
  std::string line;
  int data_rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    if (!header) {
      EXPECT_EQ(line.rfind("suite,operation,axis,axis_value", 0), 0u);
      header = true;
      continue;
    }
    EXPECT_EQ(line.rfind("pivots,cache_enc,pivots,", 0), 0u) << line;
    ++data_rows;
  }
  EXPECT_EQ(data_rows, 5);
  const Result floor = Frag({"bench", "--suite", "mc", "--samples", "4", "--pk", P("pk.bin"), "--sk",
                          P("sk.bin")});
  EXPECT_EQ(floor.code, kExitFailure);
  EXPECT_NE(floor.err.find("INVALID_CONFIG"), std::string::npos);
}

}  // namespace
}  // namespace frag::cli
