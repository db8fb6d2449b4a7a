#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "oramlab/stats.hpp"
#include "oramlab/trace_model.hpp"

using namespace oramlab;

namespace {

std::vector<BlockAddr> addrs(const LogicalTrace& t) {
  std::vector<BlockAddr> out;
  for (const auto& a : t) out.push_back(a.addr);
  return out;
}

WorkloadSpec spec(WorkloadKind kind, std::uint64_t len, std::uint64_t space, std::uint64_t seed = 1) {
  WorkloadSpec s;
  s.kind = kind;
  s.length = len;
  s.addr_space = space;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("sequential workload") {
  CHECK(addrs(generate(spec(WorkloadKind::Sequential, 4, 8))) == std::vector<BlockAddr>{0, 1, 2, 3});
  CHECK(addrs(generate(spec(WorkloadKind::Sequential, 5, 4))) == std::vector<BlockAddr>{0, 1, 2, 3, 0});
}

TEST_CASE("uniform workload passes chi-squared uniformity") {
  const auto t = generate(spec(WorkloadKind::UniformRandom, 100000, 64, 42));
  std::vector<std::uint64_t> counts(64, 0);
  for (const auto& a : t) ++counts[a.addr];
  CHECK(stats::uniformity(counts).p > 0.001);
}

TEST_CASE("mixed with locality 1 equals sequential") {
  auto m = spec(WorkloadKind::Mixed, 100, 16, 9);
  m.locality_fraction = 1.0;
  CHECK(addrs(generate(m)) == addrs(generate(spec(WorkloadKind::Sequential, 100, 16, 9))));
}

TEST_CASE("strided and zipf workloads") {
  auto s = spec(WorkloadKind::Strided, 6, 8);
  s.stride = 3;
  CHECK(addrs(generate(s)) == std::vector<BlockAddr>{0, 3, 6, 1, 4, 7});

  auto z = spec(WorkloadKind::Zipf, 20000, 64, 3);
  z.zipf_exponent = 1.2;
  std::vector<std::uint64_t> counts(64, 0);
  for (const auto& a : generate(z)) ++counts[a.addr];
  CHECK(counts[0] > counts[1]);
  CHECK(counts[1] > counts[10]);
}

TEST_CASE("workloads are deterministic and write fraction does not move addresses") {
  auto a = spec(WorkloadKind::UniformRandom, 500, 256, 77);
  CHECK(generate(a) == generate(a));
  auto b = a;
  b.write_fraction = 0.5;
  const auto tb = generate(b);
  CHECK(addrs(tb) == addrs(generate(a)));
  const auto writes = std::count_if(tb.begin(), tb.end(), [](const auto& x) { return x.op == Op::Write; });
  CHECK(writes > 150);
  CHECK(writes < 350);
}

TEST_CASE("workload validation") {
  CHECK_THROWS_AS(generate(spec(WorkloadKind::Sequential, 4, 0)), ConfigError);
  CHECK_THROWS_AS(generate(spec(WorkloadKind::Sequential, 4, 6)), ConfigError);
  WorkloadSpec unbounded = spec(WorkloadKind::Sequential, 1, 8);
  unbounded.length.reset();
  CHECK_THROWS_AS(generate(unbounded), ConfigError);
  CHECK(generate_prefix(unbounded, 3).size() == 3);
}

TEST_CASE("trace input replays prefixes") {
  WorkloadSpec u = spec(WorkloadKind::UniformRandom, 1, 1024, 5);
  u.length.reset();
  const auto in = TraceInput::from_workload(u);
  CHECK(!in.length());
  const auto p10 = in.prefix(10);
  const auto p20 = in.prefix(20);
  CHECK(std::equal(p10.begin(), p10.end(), p20.begin()));
  auto c = in.cursor();
  for (const auto& a : p20) CHECK(*c.next() == a);

  const auto fin = TraceInput::from_trace({{Op::Read, 1, {}}, {Op::Read, 2, {}}});
  CHECK(*fin.length() == 2);
  CHECK(fin.prefix(5).size() == 2);
}

TEST_CASE("llc filter") {
  LlcConfig cfg;
  cfg.enabled = true;
  SUBCASE("sequential sweep twice over the cache size") {
    auto t = generate(spec(WorkloadKind::Sequential, 16, 8));
    const auto m = llc_filter(t, cfg);
    CHECK(m.size() == 8);
    CHECK(addrs(m) == std::vector<BlockAddr>{0, 1, 2, 3, 4, 5, 6, 7});
  }
  SUBCASE("repeated address") {
    cfg.capacity_blocks = 1;
    cfg.associativity = 1;
    const LogicalTrace t{{Op::Read, 4, {}}, {Op::Read, 4, {}}, {Op::Read, 4, {}}};
    CHECK(llc_filter(t, cfg).size() == 1);
  }
  SUBCASE("random stream almost always misses") {
    const auto t = generate(spec(WorkloadKind::UniformRandom, 10000, 1 << 16, 8));
    CHECK(static_cast<double>(llc_filter(t, cfg).size()) / 10000.0 > 0.99);
  }
  SUBCASE("set conflicts") {
    cfg.capacity_blocks = 4;
    cfg.associativity = 2;  // 2 sets
    // 0,2,4 all map to set 0; 0 is evicted by 4.
    const LogicalTrace t{{Op::Read, 0, {}}, {Op::Read, 2, {}}, {Op::Read, 4, {}}, {Op::Read, 0, {}}, {Op::Read, 4, {}}};
    CHECK(addrs(llc_filter(t, cfg)) == std::vector<BlockAddr>{0, 2, 4, 0});
  }
  SUBCASE("disabled or invalid") {
    cfg.enabled = false;
    CHECK_THROWS_AS(llc_filter({}, cfg), ConfigError);
    cfg.enabled = true;
    cfg.capacity_blocks = 6;
    cfg.associativity = 4;
    CHECK_THROWS_AS(llc_filter({}, cfg), ConfigError);
  }
}

TEST_CASE("trace parsing") {
  std::istringstream in("# comment\nR,5\nW,3,deadbeef\n\nH\n");
  const auto t = parse_trace(in);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == LogicalAccess{Op::Read, 5, {}});
  CHECK(t[1].op == Op::Write);
  CHECK(t[1].data == Payload::from_hex("deadbeef"));
  CHECK(t[2].op == Op::Halt);

  std::istringstream bad("R,1\nX,1\n");
  try {
    parse_trace(bad);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream range("R,9\n");
  CHECK_THROWS_AS(parse_trace(range, 8), RangeError);
  std::istringstream after("H,0\nR,1\n");
  CHECK_THROWS_AS(parse_trace(after), ParseError);
  std::istringstream noaddr("R\n");
  CHECK_THROWS_AS(parse_trace(noaddr), ParseError);
}

TEST_CASE("trace file round trip") {
  auto s = spec(WorkloadKind::UniformRandom, 200, 1024, 11);
  s.write_fraction = 0.3;
  auto t = generate(s);
  t.push_back({Op::Halt, 0, {}});
  const auto path = std::filesystem::temp_directory_path() / "oramlab_roundtrip.trace";
  write_trace_file(t, path);
  CHECK(read_trace_file(path) == t);
  std::filesystem::remove(path);
}
