#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "oramlab/cli.hpp"
#include "oramlab/distinguisher.hpp"

namespace py = pybind11;
using namespace oramlab;

namespace {

Op parse_op(const std::string& s) {
  if (s == "R" || s == "read") return Op::Read;
  if (s == "W" || s == "write") return Op::Write;
  if (s == "H" || s == "halt") return Op::Halt;
  throw ConfigError("op must be R, W or H, got '" + s + "'");
}

std::string op_name(Op op) { return op == Op::Read ? "R" : op == Op::Write ? "W" : "H"; }

OramConfig make_config(unsigned levels, unsigned bucket_size, std::optional<std::size_t> stash_capacity,
                       const std::string& eviction, std::uint64_t num_blocks, std::uint64_t seed) {
  OramConfig c;
  c.levels = levels;
  c.bucket_size = bucket_size;
  c.stash_capacity = stash_capacity;
  if (eviction == "background") {
    c.eviction = EvictionKind::Background;
  } else if (eviction != "none") {
    throw ConfigError("eviction must be none or background");
  }
  c.num_blocks = num_blocks;
  c.seed = seed;
  c.validate();
  return c;
}

py::list trace_list(const ObservedTrace& t) {
  py::list out;
  for (const auto& a : t) out.append(py::make_tuple(a.tick, a.leaf, std::string(to_string(a.hidden_kind))));
  return out;
}

py::dict outcome(const AccessOutcome& r) {
  py::dict d;
  d["payload"] = r.payload.to_hex();
  d["emitted"] = trace_list(r.emitted);
  d["overflow"] = r.overflow;
  return d;
}

py::dict counters(const Oram& o) {
  const auto& c = o.counters();
  py::dict d;
  d["real_accesses"] = c.real_accesses;
  d["dummy_accesses"] = c.dummy_accesses;
  d["stash_peak"] = c.stash_peak;
  d["overflow_events"] = c.overflow_events;
  return d;
}

py::int_ big(const BigUint& v) { return py::int_(py::str(v.str())); }

WorkloadKind kind_of(const std::string& s) {
  if (s == "sequential") return WorkloadKind::Sequential;
  if (s == "random") return WorkloadKind::UniformRandom;
  if (s == "strided") return WorkloadKind::Strided;
  if (s == "zipf") return WorkloadKind::Zipf;
  if (s == "mixed") return WorkloadKind::Mixed;
  throw ConfigError("unknown workload kind '" + s + "'");
}

WorkloadSpec workload(const std::string& kind, std::optional<std::uint64_t> length, std::uint64_t space,
                      std::uint64_t seed) {
  WorkloadSpec w;
  w.kind = kind_of(kind);
  w.length = length;
  w.addr_space = space;
  w.seed = seed;
  w.validate();
  return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic ORAM simulation lab";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
  py::register_exception<LivelockError>(m, "LivelockError", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  py::class_<PathOram>(m, "PathOram")
      .def(py::init([](unsigned levels, unsigned bucket_size, std::optional<std::size_t> stash_capacity,
                       const std::string& eviction, std::uint64_t num_blocks, std::uint64_t seed) {
             return std::make_unique<PathOram>(
                 make_config(levels, bucket_size, stash_capacity, eviction, num_blocks, seed));
           }),
           py::arg("levels") = 10, py::arg("bucket_size") = 4, py::arg("stash_capacity") = py::none(),
           py::arg("eviction") = "none", py::arg("num_blocks") = 0, py::arg("seed") = 0)
      .def(
          "access",
          [](PathOram& o, const std::string& op, BlockAddr addr, const std::string& data_hex) {
            return outcome(o.access(parse_op(op), addr, data_hex.empty() ? Payload{} : Payload::from_hex(data_hex)));
          },
          py::arg("op"), py::arg("addr"), py::arg("data_hex") = "")
      .def("background_evict", [](PathOram& o) { return trace_list(o.background_evict()); })
      .def("check_invariant", &PathOram::check_invariant)
      .def("dump_state", &PathOram::dump_state)
      .def("position", &PathOram::position)
      .def_property_readonly("stash_size", &PathOram::stash_size)
      .def_property_readonly("counters", [](const PathOram& o) { return counters(o); });

  py::class_<RecursiveOram>(m, "RecursiveOram")
      .def(py::init([](unsigned levels, unsigned bucket_size, std::optional<std::size_t> stash_capacity,
                       const std::string& eviction, std::uint64_t num_blocks, std::uint64_t seed, unsigned depth,
                       unsigned entries_per_block, std::size_t plb_capacity, bool unified,
                       std::uint64_t superblock_size) {
             RecursionConfig rc;
             rc.depth = depth;
             rc.entries_per_block = entries_per_block;
             rc.plb_capacity = plb_capacity;
             rc.unified = unified;
             rc.superblock_size = superblock_size;
             rc.validate();
             return std::make_unique<RecursiveOram>(
                 make_config(levels, bucket_size, stash_capacity, eviction, num_blocks, seed), rc);
           }),
           py::arg("levels") = 10, py::arg("bucket_size") = 4, py::arg("stash_capacity") = py::none(),
           py::arg("eviction") = "none", py::arg("num_blocks") = 0, py::arg("seed") = 0, py::arg("depth") = 1,
           py::arg("entries_per_block") = 8, py::arg("plb_capacity") = 0, py::arg("unified") = false,
           py::arg("superblock_size") = 1)
      .def(
          "access",
          [](RecursiveOram& o, const std::string& op, BlockAddr addr, const std::string& data_hex) {
            return outcome(o.access(parse_op(op), addr, data_hex.empty() ? Payload{} : Payload::from_hex(data_hex)));
          },
          py::arg("op"), py::arg("addr"), py::arg("data_hex") = "")
      .def("check_consistency", &RecursiveOram::check_consistency)
      .def_property_readonly("stash_size", &RecursiveOram::stash_size)
      .def_property_readonly("counters", [](const RecursiveOram& o) { return counters(o); });

  m.def(
      "generate_trace",
      [](const std::string& kind, std::uint64_t length, std::uint64_t space, std::uint64_t seed) {
        py::list out;
        for (const auto& a : generate(workload(kind, length, space, seed))) out.append(py::make_tuple(op_name(a.op), a.addr));
        return out;
      },
      py::arg("kind"), py::arg("length"), py::arg("space") = 1024, py::arg("seed") = 0,
      "Synthetic logical trace as (op, addr) tuples.");

  m.def(
      "bogus_length",
      [](const std::vector<std::pair<std::string, BlockAddr>>& records, unsigned addr_bits) {
        LogicalTrace t;
        for (const auto& [op, addr] : records) t.push_back({parse_op(op), addr, {}});
        return big(bogus_wrap(pass_through, t, BogusConfig{addr_bits}).total_length);
      },
      py::arg("records"), py::arg("addr_bits") = 2, "Total padded length x of a bogus ORAM run.");

  m.def(
      "timing_leakage",
      [](std::uint64_t epochs, std::uint64_t rates, double lmax_bits, unsigned g) {
        const auto r = timing_leakage(epochs, rates, lmax_bits, g);
        py::dict d;
        d["timing_bits"] = r.timing_bits;
        d["termination_bits"] = r.termination_bits;
        d["total_bits"] = r.total_bits;
        return d;
      },
      py::arg("epochs"), py::arg("rates"), py::arg("lmax_bits"), py::arg("round_bits"));
  m.def("termination_leakage", &termination_leakage, py::arg("lmax"), py::arg("round_bits"));

  m.def(
      "periodic_ticks",
      [](unsigned levels, Tick o_int, std::uint64_t slots, double arrival_rate, std::uint64_t requests,
         std::uint64_t seed) {
        auto c = make_config(levels, 4, 100, "background", 0, seed);
        PathOram o(c);
        const auto reqs =
            poisson_arrivals(arrival_rate, requests, workload("random", std::nullopt, c.blocks(), seed), seed);
        return trace_list(run_periodic(o, reqs, PeriodicConfig{o_int}, slots));
      },
      py::arg("levels"), py::arg("o_int"), py::arg("slots"), py::arg("arrival_rate"), py::arg("requests"),
      py::arg("seed") = 0, "Static periodic run over Poisson arrivals; returns (tick, leaf, kind) tuples.");

  m.def(
      "truncation_test",
      [](unsigned levels, unsigned bucket_size, const std::string& kind_a, const std::string& kind_b,
         std::uint64_t n, std::uint64_t samples, std::uint64_t seed) {
        OramConfig c = make_config(levels, bucket_size, std::nullopt, "none", 0, 0);
        ExperimentSpec s;
        s.construction = make_path_oram(c);
        s.a1 = TraceInput::from_workload(workload(kind_a, std::nullopt, c.blocks(), 1));
        s.a2 = TraceInput::from_workload(workload(kind_b, std::nullopt, c.blocks(), 2));
        s.n = n;
        s.samples = samples;
        s.master_seed = seed;
        DistinguisherReport r;
        {
          py::gil_scoped_release release;
          r = test_def2(s);
        }
        py::dict d;
        d["verdict"] = std::string(to_string(r.verdict));
        d["p"] = r.p;
        return d;
      },
      py::arg("levels") = 6, py::arg("bucket_size") = 4, py::arg("kind_a") = "sequential",
      py::arg("kind_b") = "random", py::arg("n") = 64, py::arg("samples") = 200, py::arg("seed") = 0,
      "Truncation test of Path ORAM on two workloads.");

  m.def("praxen_alloc", &praxen::alloc, py::arg("configs"), "Slot frame for a vector of config weights.");

  m.def(
      "cli_main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "oramlab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(rc, out.str(), err.str());
      },
      py::arg("args"), "Runs the oramlab CLI in-process; returns (exit code, stdout, stderr).");
}
