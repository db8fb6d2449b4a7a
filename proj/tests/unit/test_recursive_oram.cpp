#include "doctest.h"
#include "oramlab/recursive_oram.hpp"
#include "oramlab/stats.hpp"

using namespace oramlab;

namespace {

OramConfig tree(unsigned L, unsigned Z, std::uint64_t seed, std::uint64_t blocks = 0) {
  OramConfig c;
  c.levels = L;
  c.bucket_size = Z;
  c.seed = seed;
  c.num_blocks = blocks;
  return c;
}

LogicalTrace sequential(std::uint64_t n, std::uint64_t space) {
  WorkloadSpec s;
  s.kind = WorkloadKind::Sequential;
  s.length = n;
  s.addr_space = space;
  return generate(s);
}

LogicalTrace uniform(std::uint64_t n, std::uint64_t space, std::uint64_t seed) {
  WorkloadSpec s;
  s.kind = WorkloadKind::UniformRandom;
  s.length = n;
  s.addr_space = space;
  s.seed = seed;
  return generate(s);
}

}  // namespace

TEST_CASE("plb lru semantics") {
  Plb plb(2);
  CHECK(plb.lookup(1, 0) == nullptr);
  CHECK(!plb.insert(1, 0, Block{100, 0, {}}));
  CHECK(plb.lookup(1, 0) != nullptr);
  plb.insert(1, 1, Block{101, 0, {}});
  const auto victim = plb.insert(1, 2, Block{102, 0, {}});
  REQUIRE(victim);
  CHECK(victim->first == PosmapKey{1, 0});
  CHECK(plb.lookup(1, 0) == nullptr);
}

TEST_CASE("depth 0 matches path oram exactly") {
  auto cfg = tree(6, 4, 33);
  cfg.stash_capacity = 60;
  cfg.eviction = EvictionKind::Background;
  PathOram p(cfg);
  RecursiveOram r(cfg, RecursionConfig{});
  for (const auto& a : uniform(3000, 64, 4)) {
    const auto x = p.access(a.op, a.addr);
    const auto y = r.access(a.op, a.addr);
    REQUIRE(x.emitted == y.emitted);
  }
  CHECK(p.background_evict() == r.background_evict());
}

TEST_CASE("depth 1 without plb emits two accesses per request") {
  RecursionConfig rc;
  rc.depth = 1;
  rc.entries_per_block = 8;
  RecursiveOram r(tree(7, 4, 5), rc);
  for (const auto& a : uniform(500, 128, 6)) {
    const auto out = r.access(a.op, a.addr);
    CHECK(out.emitted.size() == 2);
  }
  CHECK(r.check_consistency());
  CHECK(r.onchip_entries() == 16);
}

TEST_CASE("emission count is depth + 1") {
  for (unsigned depth = 0; depth <= 3; ++depth) {
    RecursionConfig rc;
    rc.depth = depth;
    rc.entries_per_block = 4;
    RecursiveOram r(tree(8, 4, depth), rc);
    for (const auto& a : uniform(200, 256, 1)) CHECK(r.access(a.op, a.addr).emitted.size() == depth + 1);
    CHECK(r.check_consistency());
  }
}

TEST_CASE("recursive reads return written data") {
  for (bool unified : {false, true}) {
    for (std::size_t plb : {std::size_t{0}, std::size_t{4}}) {
      for (std::uint64_t sb : {1, 4}) {
        RecursionConfig rc;
        rc.depth = 2;
        rc.entries_per_block = 4;
        rc.plb_capacity = plb;
        rc.unified = unified;
        rc.superblock_size = sb;
        RecursiveOram r(tree(7, 4, 17), rc);
        Rng rng(3);
        std::vector<Payload> mirror(128);
        for (int i = 0; i < 3000; ++i) {
          const BlockAddr a = uniform_below(rng, 128);
          if (rng() % 3 == 0) {
            const auto p = Payload::from_u64(rng());
            CHECK(r.access(Op::Write, a, p).payload == mirror[a]);
            mirror[a] = p;
          } else {
            CHECK(r.access(Op::Read, a).payload == mirror[a]);
          }
          if (i % 500 == 0) REQUIRE(r.check_consistency());
        }
        CHECK(r.check_consistency());
      }
    }
  }
}

TEST_CASE("plb saves position-map accesses under locality") {
  RecursionConfig rc;
  rc.depth = 1;
  rc.entries_per_block = 4;
  rc.plb_capacity = 16;
  auto run = [&](const LogicalTrace& t) {
    RecursiveOram r(tree(12, 4, 8), rc);
    for (const auto& a : t) r.access(a.op, a.addr);
    CHECK(r.check_consistency());
    return r.recursion_counters().tree_accesses.at(1);
  };
  const auto seq = run(sequential(10000, 4096));
  const auto rnd = run(uniform(10000, 4096, 2));
  CHECK(static_cast<double>(seq) < 0.5 * static_cast<double>(rnd));
}

TEST_CASE("plb does not bias observed leaves") {
  RecursionConfig rc;
  rc.depth = 1;
  rc.entries_per_block = 4;
  rc.plb_capacity = 8;
  rc.unified = true;
  RecursiveOram r(tree(6, 4, 12), rc);
  std::vector<std::uint64_t> counts(64, 0);
  for (const auto& a : sequential(40000, 64))
    for (const auto& e : r.access(a.op, a.addr).emitted) ++counts[e.leaf];
  CHECK(stats::uniformity(counts).p > 0.001);
  CHECK(r.recursion_counters().plb_hits > 0);
}

TEST_CASE("super blocks share a leaf and prefetch") {
  RecursionConfig rc;
  rc.superblock_size = 4;
  RecursiveOram r(tree(6, 4, 2), rc);
  const auto seq = sequential(64, 64);
  std::size_t tree_accesses = 0;
  for (const auto& a : seq) tree_accesses += r.access(a.op, a.addr).emitted.size();
  // One ORAM access per super block; the three siblings hit the buffer.
  CHECK(tree_accesses == 16);
  CHECK(r.recursion_counters().prefetch_hits == 48);
  CHECK(r.check_consistency());

  // Writes always go to the ORAM.
  const auto w = r.access(Op::Write, 1, Payload::from_u64(5));
  CHECK(w.emitted.size() == 1);
  CHECK(r.access(Op::Read, 1).payload == Payload::from_u64(5));
}

TEST_CASE("recursion with background eviction stays consistent") {
  auto cfg = tree(6, 2, 44);
  cfg.stash_capacity = 40;
  cfg.eviction = EvictionKind::Background;
  RecursionConfig rc;
  rc.depth = 1;
  rc.entries_per_block = 4;
  for (bool unified : {false, true}) {
    rc.unified = unified;
    RecursiveOram r(cfg, rc);
    std::uint64_t dummies = 0;
    for (const auto& a : uniform(5000, 64, 9))
      for (const auto& e : r.access(a.op, a.addr).emitted) dummies += e.hidden_kind == AccessKind::Dummy;
    CHECK(dummies == r.counters().dummy_accesses);
    CHECK(r.counters().overflow_events == 0);
    CHECK(r.check_consistency());
  }
}

TEST_CASE("recursion config validation") {
  RecursionConfig rc;
  rc.depth = 1;
  rc.entries_per_block = 3;
  CHECK_THROWS_AS(RecursiveOram(tree(4, 4, 1), rc), ConfigError);
  rc.entries_per_block = 32;
  CHECK_THROWS_AS(RecursiveOram(tree(4, 4, 1), rc), ConfigError);
  rc.entries_per_block = 4;
  rc.superblock_size = 3;
  CHECK_THROWS_AS(RecursiveOram(tree(4, 4, 1), rc), ConfigError);
}
