#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scalelab/datapipe.hpp"
#include "scalelab/io.hpp"

using namespace scalelab;
using datapipe::CyclePolicy;
using datapipe::DomainStream;
using datapipe::tokens_seen;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

DomainStream toy_stream(const std::string& name, int n_seqs, int seq_len,
                        uint16_t base) {
  DomainStream s;
  s.name = name;
  for (int i = 0; i < n_seqs; ++i) {
    std::vector<uint16_t> seq;
    for (int j = 0; j < seq_len; ++j)
      seq.push_back(static_cast<uint16_t>(base + i * seq_len + j));
    s.sequences.push_back(std::move(seq));
  }
  return s;
}

} // namespace

TEST_CASE("token budget split") {
  auto t = tokens_seen(0.01, 1800, 32, 1024);
  CHECK(t.total == 58982400);
  CHECK(t.pt == 589824);
  CHECK(t.ft == 58392576);

  auto none = tokens_seen(0.0, 100, 32, 1024);
  CHECK(none.pt == 0);
  CHECK(none.ft == none.total);
  auto all = tokens_seen(1.0, 100, 32, 1024);
  CHECK(all.pt == all.total);
  CHECK(all.ft == 0);

  // Half of an odd total rounds to nearest, away from zero on the tie.
  auto tie = tokens_seen(0.5, 1, 1, 3);
  CHECK(tie.total == 3);
  CHECK(tie.pt == 2);
  CHECK(tie.ft == 1);

  for (double p : {0.0, 0.007, 0.3, 0.99, 1.0}) {
    auto v = tokens_seen(p, 1800, 32, 1024);
    CHECK(v.ft + v.pt == v.total);
  }
  CHECK_THROWS_AS(tokens_seen(-0.1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(tokens_seen(1.1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("mask bit packing is a bijection") {
  for (uint32_t id = 0; id < 0x8000; ++id) {
    auto tok = static_cast<uint16_t>(id);
    auto [id0, m0] = datapipe::unpack_masked(datapipe::pack_masked(tok, false));
    auto [id1, m1] = datapipe::unpack_masked(datapipe::pack_masked(tok, true));
    if (id0 != tok || m0 || id1 != tok || !m1) {
      CAPTURE(id);
      REQUIRE(false);
    }
  }
  CHECK(datapipe::pack_masked(0x7CFF, true) == 0xFCFF);
  CHECK_THROWS_AS(datapipe::pack_masked(0x8000, false), std::invalid_argument);
}

TEST_CASE("masked positions") {
  std::vector<uint16_t> seq{
      datapipe::pack_masked(5, false), datapipe::pack_masked(6, true),
      datapipe::pack_masked(7, false), datapipe::pack_masked(8, true)};
  CHECK(datapipe::masked_positions(seq) == std::vector<size_t>{1, 3});
}

TEST_CASE("domain stream file round-trip") {
  DomainStream s = toy_stream("wiki", 3, 5, 100);
  s.unique_token_budget = 12;
  s.cycle_policy = CyclePolicy::stream_once_then_repeat;

  TempFile tokens("dp_stream.tokens");
  TempFile manifest("dp_stream.json");
  datapipe::write_domain_stream(s, tokens.path, manifest.path);

  DomainStream back = datapipe::read_domain_stream(manifest.path);
  CHECK(back.name == s.name);
  CHECK(back.sequences == s.sequences);
  REQUIRE(back.unique_token_budget.has_value());
  CHECK(*back.unique_token_budget == 12);
  CHECK(back.cycle_policy == CyclePolicy::stream_once_then_repeat);

  // Tokens are raw little-endian u16 in sequence order.
  std::ifstream raw(tokens.path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(raw)),
                    std::istreambuf_iterator<char>());
  REQUIRE(bytes.size() == 30);
  CHECK(static_cast<unsigned char>(bytes[0]) == 100);
  CHECK(static_cast<unsigned char>(bytes[1]) == 0);
}

TEST_CASE("stream size mismatch is a parse error") {
  DomainStream s = toy_stream("wiki", 2, 4, 0);
  TempFile tokens("dp_bad.tokens");
  TempFile manifest("dp_bad.json");
  datapipe::write_domain_stream(s, tokens.path, manifest.path);

  // Truncate the token file behind the manifest's back.
  std::ofstream(tokens.path, std::ios::binary).write("\0\0", 2);
  CHECK_THROWS_AS(datapipe::read_domain_stream(manifest.path), io::ParseError);
}

TEST_CASE("mixture endpoints are exact") {
  DomainStream ft = toy_stream("ft", 2, 3, 0);
  DomainStream pt = toy_stream("pt", 3, 3, 1000);

  auto pure_ft = datapipe::sample_mixture(ft, pt, 0.0, 42, 5);
  REQUIRE(pure_ft.size() == 5);
  for (uint64_t i = 0; i < 5; ++i) {
    CHECK(pure_ft[i].step == i);
    CHECK(pure_ft[i].source == 0);
  }
  // Rows walk the two-sequence source in order, wrapping.
  std::vector<uint64_t> rows;
  for (const auto& pk : pure_ft) rows.push_back(pk.row);
  CHECK(rows == std::vector<uint64_t>{0, 1, 0, 1, 0});

  auto pure_pt = datapipe::sample_mixture(ft, pt, 1.0, 42, 4);
  for (const auto& pk : pure_pt) CHECK(pk.source == 1);

  // An empty source only matters when a pick lands on it.
  DomainStream empty;
  empty.name = "empty";
  CHECK_NOTHROW(datapipe::sample_mixture(ft, empty, 0.0, 42, 3));
  CHECK_THROWS_AS(datapipe::sample_mixture(ft, empty, 1.0, 42, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(datapipe::sample_mixture(ft, pt, 1.5, 42, 3),
                  std::invalid_argument);
}

TEST_CASE("mixture draws are addressed per pick") {
  DomainStream ft = toy_stream("ft", 2, 3, 0);
  DomainStream pt = toy_stream("pt", 3, 3, 1000);
  // The pick at emission index 3 sees uniform 0.33861315239289258 under
  // seed 42, so thresholds on either side of it flip only that source.
  auto below = datapipe::sample_mixture(ft, pt, 0.33, 42, 5);
  auto above = datapipe::sample_mixture(ft, pt, 0.34, 42, 5);
  CHECK(below[3].source == 0);
  CHECK(above[3].source == 1);

  auto again = datapipe::sample_mixture(ft, pt, 0.34, 42, 5);
  for (size_t i = 0; i < 5; ++i) {
    CHECK(again[i].source == above[i].source);
    CHECK(again[i].row == above[i].row);
  }
}

TEST_CASE("mixture fraction stays inside the binomial band") {
  DomainStream ft = toy_stream("ft", 2, 3, 0);
  DomainStream pt = toy_stream("pt", 3, 3, 1000);
  const double p = 0.01;
  const uint64_t n = 1000000;
  auto picks = datapipe::sample_mixture(ft, pt, p, 42, n);
  uint64_t hits = 0;
  for (const auto& pk : picks) hits += pk.source == 1;
  double fraction = static_cast<double>(hits) / static_cast<double>(n);
  CHECK(fraction > 0.009701503768868015);
  CHECK(fraction < 0.010298496231131986);
}

TEST_CASE("mixture manifest replay is byte exact") {
  DomainStream ft = toy_stream("ft", 2, 3, 0);
  DomainStream pt = toy_stream("pt", 3, 3, 1000);
  auto picks = datapipe::sample_mixture(ft, pt, 0.4, 7, 64);

  TempFile first("dp_mix1.csv");
  TempFile second("dp_mix2.csv");
  datapipe::write_mixture_manifest(first.path, picks);
  auto replay = datapipe::read_mixture_manifest(first.path);
  REQUIRE(replay.size() == picks.size());
  for (size_t i = 0; i < picks.size(); ++i) {
    CHECK(replay[i].step == picks[i].step);
    CHECK(replay[i].row == picks[i].row);
    CHECK(replay[i].source == picks[i].source);
  }
  datapipe::write_mixture_manifest(second.path, replay);
  CHECK(io::read_file(first.path) == io::read_file(second.path));

  std::string head = io::read_file(first.path);
  CHECK(head.rfind("step,row,source\n", 0) == 0);
}

TEST_CASE("mixture manifest rejects malformed rows") {
  TempFile bad("dp_mix_bad.csv");
  io::write_file(bad.path, "step,row,source\n0,0,xx\n");
  CHECK_THROWS_AS(datapipe::read_mixture_manifest(bad.path), io::ParseError);
  io::write_file(bad.path, "wrong\n");
  CHECK_THROWS_AS(datapipe::read_mixture_manifest(bad.path), io::ParseError);
}

TEST_CASE("flatten applies the unique token budget") {
  DomainStream s = toy_stream("wiki", 2, 4, 0);
  auto flat = datapipe::flatten(s);
  CHECK(flat.tokens.size() == 8);
  CHECK(flat.wrap_len == 8);
  CHECK(!flat.count_epochs);

  s.unique_token_budget = 5;
  auto budgeted = datapipe::flatten(s);
  CHECK(budgeted.wrap_len == 5);
  CHECK(budgeted.count_epochs);

  s.unique_token_budget = 0;
  CHECK_THROWS_AS(datapipe::flatten(s), std::invalid_argument);
  DomainStream empty;
  empty.name = "empty";
  CHECK_THROWS_AS(datapipe::flatten(empty), std::invalid_argument);
}

TEST_CASE("batches wrap inside the budget prefix") {
  DomainStream s;
  s.name = "tiny";
  s.sequences = {{1, 2, 3}, {4, 5}};
  s.unique_token_budget = 5;
  auto flat = datapipe::flatten(s);

  datapipe::StreamCursor cur;
  auto b1 = datapipe::next_epoch_batch(flat, cur, 1, 3);
  CHECK(b1 == std::vector<uint16_t>{1, 2, 3});
  CHECK(cur.epoch == 0);
  auto b2 = datapipe::next_epoch_batch(flat, cur, 1, 3);
  CHECK(b2 == std::vector<uint16_t>{4, 5, 1});
  CHECK(cur.epoch == 1);
  auto b3 = datapipe::next_epoch_batch(flat, cur, 1, 3);
  CHECK(b3 == std::vector<uint16_t>{2, 3, 4});
  CHECK(cur.epoch == 1);

  CHECK_THROWS_AS(datapipe::next_epoch_batch(flat, cur, 0, 3),
                  std::invalid_argument);
}

TEST_CASE("epoch counter follows the token ratio") {
  // 300 sequences of 1000 tokens with a 300000 budget; one optimizer step
  // consumes 32 * 1024 tokens, so after k steps the epoch counter must
  // read floor(32768 k / 300000).
  DomainStream s;
  s.name = "budget";
  for (int i = 0; i < 300; ++i)
    s.sequences.push_back(std::vector<uint16_t>(1000, uint16_t(i)));
  s.unique_token_budget = 300000;
  auto flat = datapipe::flatten(s);

  datapipe::StreamCursor cur;
  for (uint64_t k = 1; k <= 40; ++k) {
    datapipe::next_epoch_batch(flat, cur, 32, 1024);
    CHECK(cur.epoch == (32768 * k) / 300000);
  }
}
