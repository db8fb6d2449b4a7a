#include "oramlab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oramlab/distinguisher.hpp"

namespace oramlab::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kWorkloadFields{"kind",     "file",         "length",   "space",
                                               "stride",   "zipf_exponent", "locality", "write_fraction",
                                               "seed"};

void add_section(std::vector<std::string>& s, const std::string& prefix, const std::vector<std::string>& fields) {
  for (const auto& f : fields) s.push_back(prefix + "." + f);
}

std::vector<std::string> common_keys() {
  std::vector<std::string> s{"construction", "seed", "output.dir", "output.prefix"};
  add_section(s, "oram", {"levels", "bucket_size", "stash_capacity", "eviction", "eviction_threshold", "num_blocks"});
  add_section(s, "recursion", {"depth", "entries_per_block", "plb_capacity", "unified", "superblock_size"});
  return s;
}

void add_construction_keys(std::vector<std::string>& s) {
  add_section(s, "bogus", {"addr_bits", "include_data", "max_output"});
  add_section(s, "periodic", {"inner", "mode", "o_int", "slots", "arrival_rate", "epoch_slots", "rates", "watermark",
                              "mean_interarrival"});
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

WorkloadKind parse_kind(const std::string& s) {
  if (s == "sequential") return WorkloadKind::Sequential;
  if (s == "random") return WorkloadKind::UniformRandom;
  if (s == "strided") return WorkloadKind::Strided;
  if (s == "zipf") return WorkloadKind::Zipf;
  if (s == "mixed") return WorkloadKind::Mixed;
  throw ConfigError("unknown workload kind '" + s + "' (sequential, random, strided, zipf, mixed, file)");
}

/// Where a config-driven subcommand writes: output.dir (or --out-dir) and output.prefix.
struct Outputs {
  fs::path dir;
  std::string prefix;
  fs::path file(const std::string& suffix) const { return dir / (prefix + "_" + suffix); }
};

Outputs outputs_from(const ConfigFile& cfg, const std::string& override_dir, const std::string& default_prefix) {
  return {override_dir.empty() ? fs::path(cfg.get("output.dir", ".")) : fs::path(override_dir),
          cfg.get("output.prefix", default_prefix)};
}

LogicalTrace finite_trace(const ConfigFile& cfg, const std::string& prefix, const fs::path& base) {
  const auto input = input_from(cfg, prefix, base);
  if (!input.length()) throw ConfigError(prefix + ".length is required");
  auto trace = input.prefix(*input.length());
  if (cfg.get_bool("llc.enabled", false)) {
    LlcConfig llc;
    llc.enabled = true;
    llc.capacity_blocks = cfg.get_u64("llc.capacity_blocks", llc.capacity_blocks);
    llc.associativity = cfg.get_u64("llc.associativity", llc.associativity);
    llc.validate();
    trace = llc_filter(trace, llc);
  }
  return trace;
}

std::unique_ptr<Oram> make_oram(const std::string& kind, const ConfigFile& cfg, std::uint64_t seed) {
  auto oc = oram_from(cfg);
  oc.seed = seed;
  if (kind == "path") return std::make_unique<PathOram>(oc);
  auto rc = recursion_from(cfg);
  if (kind == "unified_plb") {
    rc.unified = true;
    if (!cfg.has("recursion.plb_capacity")) rc.plb_capacity = 8;
    if (rc.depth == 0) rc.depth = 1;
  } else if (kind != "recursive") {
    throw ConfigError("construction '" + kind + "' is not a tree ORAM (path, recursive, unified_plb)");
  }
  return std::make_unique<RecursiveOram>(oc, rc);
}

void write_observed(const ObservedTrace& trace, std::ostream& out) {
  out << "tick,location,kind\n";
  for (const auto& a : trace) out << a.tick << ',' << a.leaf << ',' << to_string(a.hidden_kind) << '\n';
}

void write_counters(const std::vector<std::pair<std::string, std::string>>& rows, std::ostream& out) {
  out << "counter,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

std::vector<std::pair<std::string, std::string>> oram_counters(const Oram& oram) {
  const auto& c = oram.counters();
  std::vector<std::pair<std::string, std::string>> rows{
      {"real_accesses", std::to_string(c.real_accesses)},
      {"dummy_accesses", std::to_string(c.dummy_accesses)},
      {"stash_peak", std::to_string(c.stash_peak)},
      {"overflow_events", std::to_string(c.overflow_events)},
      {"stash_final", std::to_string(oram.stash_size())},
  };
  if (const auto* r = dynamic_cast<const RecursiveOram*>(&oram)) {
    const auto& rc = r->recursion_counters();
    for (std::size_t i = 0; i < rc.tree_accesses.size(); ++i)
      rows.emplace_back("tree_accesses_level_" + std::to_string(i), std::to_string(rc.tree_accesses[i]));
    rows.emplace_back("plb_lookups", std::to_string(rc.plb_lookups));
    rows.emplace_back("plb_hits", std::to_string(rc.plb_hits));
    rows.emplace_back("posmap_accesses_saved", std::to_string(rc.posmap_accesses_saved));
    rows.emplace_back("prefetch_lookups", std::to_string(rc.prefetch_lookups));
    rows.emplace_back("prefetch_hits", std::to_string(rc.prefetch_hits));
  }
  return rows;
}

std::vector<TimedRequest> timed(const LogicalTrace& trace, double rate, std::uint64_t seed) {
  WorkloadSpec ticks;
  ticks.length = trace.size();
  ticks.addr_space = 2;
  auto reqs = poisson_arrivals(rate, trace.size(), ticks, seed);
  for (std::size_t i = 0; i < reqs.size(); ++i) reqs[i].access = trace[i];
  return reqs;
}

int cmd_praxen(const ConfigFile& cfg, const Outputs& o, std::ostream& out);

int cmd_run(const ConfigFile& cfg, const fs::path& base, const Outputs& o, std::ostream& out) {
  const auto kind = cfg.require("construction");
  const auto seed = cfg.get_u64("seed", 0);
  if (kind == "praxen") return cmd_praxen(cfg, o, out);
  const auto trace = finite_trace(cfg, "workload", base);
  ObservedTrace observed;
  std::vector<std::pair<std::string, std::string>> counters{{"logical_accesses", std::to_string(trace.size())}};

  if (kind == "bogus") {
    const auto bc = bogus_from(cfg);
    const auto plan = bogus_wrap(pass_through, trace, bc);
    observed = bogus_prefix(plan, cfg.get_u64("bogus.max_output", 4096));
    counters.emplace_back("x", plan.x.str());
    counters.emplace_back("total_length", plan.total_length.str());
    counters.emplace_back("real_length", std::to_string(plan.inner_trace.size()));
    counters.emplace_back("padding_length", plan.padding_length().str());
    counters.emplace_back("emitted", std::to_string(observed.size()));
  } else if (kind == "periodic") {
    auto oram = make_oram(cfg.get("periodic.inner", "path"), cfg, seed);
    const auto reqs = timed(trace, cfg.get_double("periodic.arrival_rate", 0.05), derive_seed(seed, 0xA, 0));
    const auto mode = cfg.get("periodic.mode", "static");
    std::uint64_t slots = 0;
    if (mode == "static") {
      PeriodicConfig pc{cfg.get_u64("periodic.o_int", 10)};
      slots = cfg.get_u64("periodic.slots", 10000);
      observed = run_periodic(*oram, reqs, pc, slots);
    } else if (mode == "dynamic") {
      const auto epochs = cfg.get_u64_list("periodic.epoch_slots", {1000, 1000, 1000, 1000});
      const auto rates = cfg.get_u64_list("periodic.rates", {10, 20, 40, 80});
      auto r = run_dynamic(*oram, reqs, epochs, std::vector<Tick>(rates.begin(), rates.end()),
                           occupancy_selector(cfg.get_double("periodic.watermark", 4.0)));
      observed = std::move(r.trace);
      for (auto e : epochs) slots += e;
      auto f = open_out(o.file("epochs.csv"));
      write_epoch_csv(r.epochs, f);
    } else {
      throw ConfigError("periodic.mode must be static or dynamic, got '" + mode + "'");
    }
    std::uint64_t dummy = 0;
    for (const auto& a : observed) dummy += a.hidden_kind != AccessKind::Real;
    counters.emplace_back("slots", std::to_string(slots));
    counters.emplace_back("slot_real", std::to_string(observed.size() - dummy));
    counters.emplace_back("slot_dummy", std::to_string(dummy));
    for (auto& row : oram_counters(*oram)) counters.push_back(std::move(row));
  } else {
    auto oram = make_oram(kind, cfg, seed);
    for (const auto& a : trace) {
      if (a.op == Op::Halt) break;
      auto r = oram->access(a.op, a.addr, a.data);
      observed.insert(observed.end(), r.emitted.begin(), r.emitted.end());
    }
    for (auto& row : oram_counters(*oram)) counters.push_back(std::move(row));
  }

  {
    auto f = open_out(o.file("observed.csv"));
    write_observed(observed, f);
  }
  {
    auto f = open_out(o.file("counters.csv"));
    write_counters(counters, f);
  }
  out << "wrote " << o.file("observed.csv").string() << " (" << observed.size() << " accesses)\n";
  return 0;
}

int cmd_distinguish(const ConfigFile& cfg, const fs::path& base, const Outputs& o, std::ostream& out) {
  ExperimentSpec spec;
  spec.construction = construction_from(cfg);
  spec.a1 = input_from(cfg, "workload_a", base);
  spec.a2 = input_from(cfg, "workload_b", base);
  spec.label = cfg.get("experiment.label",
                       cfg.get("workload_a.kind", "a") + "-vs-" + cfg.get("workload_b.kind", "b"));
  spec.n = cfg.get_u64("experiment.n", spec.n);
  spec.samples = cfg.get_u64("experiment.samples", spec.samples);
  spec.alpha = cfg.get_double("experiment.alpha", spec.alpha);
  spec.master_seed = cfg.get_u64("seed", 0);
  spec.workers = static_cast<unsigned>(cfg.get_u64("experiment.workers", 1));
  spec.full_trace_cap = cfg.get_u64("experiment.full_trace_cap", spec.full_trace_cap);
  spec.validate();

  const auto def = cfg.get("experiment.definition", "truncation");
  std::vector<DistinguisherReport> reports;
  if (def == "truncation" || def == "all") reports.push_back(test_def2(spec));
  if (def == "finite" || def == "all") reports.push_back(test_def1(spec));
  if (def == "strong" || (def == "all" && spec.a1.length() && spec.a1.length() == spec.a2.length()))
    reports.push_back(test_strong_def(spec));
  if (reports.empty())
    throw ConfigError("experiment.definition must be truncation, finite, strong or all, got '" + def + "'");

  {
    auto f = open_out(o.file("report.csv"));
    write_report_csv(reports, f);
  }
  auto f = open_out(o.file("summary.txt"));
  write_report_summary(reports, f);
  if (const auto checks = cfg.get_u64("experiment.causality_checks", 0)) {
    std::vector<std::uint64_t> ns;
    for (std::uint64_t i = 1; i <= checks; ++i) ns.push_back(i);
    const auto c = test_causality(*spec.construction, spec.a1, ns, spec.master_seed);
    f << "causality: " << (c.causal ? "causal" : "NOT causal") << " (" << c.checked << " prefix checks";
    if (c.first_failure) f << ", first failure at n=" << *c.first_failure;
    f << ")\n";
  }
  write_report_summary(reports, out);
  return 0;
}

int cmd_stash(const ConfigFile& cfg, const fs::path& base, const Outputs& o, std::ostream& out) {
  const auto oc = oram_from(cfg);
  const auto rc = recursion_from(cfg);
  const auto first = cfg.get_u64("stash.first_seed", 1);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < cfg.get_u64("stash.seeds", 10); ++i) seeds.push_back(first + i);
  const auto g = stash_growth(oc, rc, input_from(cfg, "workload_a", base), input_from(cfg, "workload_b", base),
                              cfg.get_u64("stash.window", 10000), seeds);
  auto f = open_out(o.file("growth.csv"));
  f << "seed,rate_seq,rate_rand\n";
  for (std::size_t i = 0; i < seeds.size(); ++i)
    f << seeds[i] << ',' << fmt(g.rate_seq[i]) << ',' << fmt(g.rate_rand[i]) << '\n';
  f << "mean," << fmt(g.mean_seq) << ',' << fmt(g.mean_rand) << '\n';
  out << "mean rate_seq " << fmt(g.mean_seq) << ", mean rate_rand " << fmt(g.mean_rand) << '\n';
  return 0;
}

int cmd_praxen(const ConfigFile& cfg, const Outputs& o, std::ostream& out) {
  const auto [pc, threads] = praxen_from(cfg);
  auto oc = oram_from(cfg);
  oc.seed = derive_seed(pc.seed, 0xB, 0);
  PathOram oram(oc);
  const praxen::DefaultPolicy policy(pc.alphabet, pc.watermark, pc.epoch_length);
  const auto r = praxen::run_praxen(threads, oram, pc, policy);
  {
    auto f = open_out(o.file("decisions.csv"));
    praxen::write_decisions_csv(r.hist, pc.delta, f);
  }
  {
    auto f = open_out(o.file("service.csv"));
    praxen::write_service_csv(r.service, f);
  }
  {
    auto f = open_out(o.file("ledger.csv"));
    praxen::write_ledger_csv(r.hist, r.ledger, f);
  }
  out << "decisions " << r.hist.entries().size() << ", dummy slots " << r.dummy_slots << ", ledger total "
      << fmt(r.ledger.total()) << " bits, choices outside C " << praxen::choice_violations(r.hist).size()
      << ", phase-2 replay " << (praxen::phase2_replay_matches(policy, r.hist) ? "ok" : "MISMATCH") << '\n';
  return 0;
}

struct LeakageFlags {
  double lmax_bits = 62;
  unsigned round_bits = 30;
  std::optional<std::uint64_t> epochs;
  std::optional<std::uint64_t> rates;
  std::string history;
  std::string out;
};

int cmd_leakage(const LeakageFlags& fl, std::ostream& out) {
  if (!fl.epochs && !fl.rates && fl.history.empty())
    throw ConfigError("leakage-report needs --epochs/--rates or --history");
  std::ostringstream s;
  s << "source,item,bits\n";
  if (fl.epochs || fl.rates) {
    if (!fl.epochs || !fl.rates) throw ConfigError("--epochs and --rates go together");
    const auto r = timing_leakage(*fl.epochs, *fl.rates, fl.lmax_bits, fl.round_bits);
    s << "periodic,timing," << fmt(r.timing_bits) << '\n'
      << "periodic,termination," << fmt(r.termination_bits) << '\n'
      << "periodic,total," << fmt(r.total_bits) << '\n';
  }
  if (!fl.history.empty()) {
    std::ifstream in(fl.history);
    if (!in) throw ConfigError("cannot open history file " + fl.history);
    const auto bits = ledger_from_decisions(in);
    double total = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      s << "praxen,thread_" << i << ',' << fmt(bits[i]) << '\n';
      total += bits[i];
    }
    s << "praxen,total," << fmt(total) << '\n';
  }
  if (fl.out.empty()) {
    out << s.str();
  } else {
    auto f = open_out(fl.out);
    f << s.str();
  }
  return 0;
}

struct GenFlags {
  std::string kind = "sequential";
  std::uint64_t length = 1000;
  std::uint64_t space = 1024;
  std::uint64_t seed = 0;
  std::uint64_t stride = 1;
  double zipf = 1.0;
  double locality = 0.5;
  double write_fraction = 0.0;
  std::uint64_t llc_capacity = 0;
  std::uint64_t llc_assoc = 8;
  bool halt = false;
  std::string out;
};

int cmd_gen(const GenFlags& g, std::ostream& out) {
  WorkloadSpec w;
  w.kind = parse_kind(g.kind);
  w.length = g.length;
  w.addr_space = g.space;
  w.seed = g.seed;
  w.stride = g.stride;
  w.zipf_exponent = g.zipf;
  w.locality_fraction = g.locality;
  w.write_fraction = g.write_fraction;
  auto trace = generate(w);
  if (g.llc_capacity) {
    LlcConfig llc{g.llc_capacity, g.llc_assoc, true};
    llc.validate();
    trace = llc_filter(trace, llc);
  }
  if (g.halt) trace.push_back({Op::Halt, 0, {}});
  if (g.out.empty()) {
    write_trace(trace, out);
  } else {
    if (fs::path(g.out).has_parent_path()) fs::create_directories(fs::path(g.out).parent_path());
    write_trace_file(trace, g.out);
  }
  return 0;
}

}  // namespace

std::vector<std::string> schema_for(std::string_view command) {
  auto s = common_keys();
  if (command == "run") {
    add_construction_keys(s);
    add_section(s, "workload", kWorkloadFields);
    add_section(s, "llc", {"enabled", "capacity_blocks", "associativity"});
    for (auto k : schema_for("praxen-sim"))
      if (k.rfind("praxen.", 0) == 0 || k.rfind("thread.", 0) == 0) s.push_back(k);
  } else if (command == "distinguish") {
    add_construction_keys(s);
    add_section(s, "workload_a", kWorkloadFields);
    add_section(s, "workload_b", kWorkloadFields);
    add_section(s, "experiment",
                {"definition", "label", "n", "samples", "alpha", "workers", "full_trace_cap", "causality_checks"});
  } else if (command == "stash-analyze") {
    add_section(s, "workload_a", kWorkloadFields);
    add_section(s, "workload_b", kWorkloadFields);
    add_section(s, "stash", {"window", "seeds", "first_seed"});
  } else if (command == "praxen-sim") {
    add_section(s, "praxen",
                {"alphabet", "watermark", "epoch_length", "delta", "slot_interval", "sim_ticks", "slot_policy"});
    add_section(s, "thread.#",
                {"arrival_rate", "saturated", "initial_config", "initial_allowed", "first_decision", "kind", "space",
                 "stride", "zipf_exponent", "locality", "write_fraction"});
  } else {
    throw ConfigError("no config schema for '" + std::string(command) + "'");
  }
  return s;
}

OramConfig oram_from(const ConfigFile& cfg) {
  OramConfig c;
  c.levels = static_cast<unsigned>(cfg.get_u64("oram.levels", c.levels));
  c.bucket_size = static_cast<unsigned>(cfg.get_u64("oram.bucket_size", c.bucket_size));
  if (cfg.has("oram.stash_capacity")) c.stash_capacity = cfg.get_u64("oram.stash_capacity", 0);
  const auto ev = cfg.get("oram.eviction", "none");
  if (ev == "background") {
    c.eviction = EvictionKind::Background;
  } else if (ev != "none") {
    throw ConfigError("oram.eviction must be none or background, got '" + ev + "'");
  }
  if (cfg.has("oram.eviction_threshold")) c.eviction_threshold = cfg.get_u64("oram.eviction_threshold", 0);
  c.num_blocks = cfg.get_u64("oram.num_blocks", 0);
  c.seed = cfg.get_u64("seed", 0);
  c.validate();
  return c;
}

RecursionConfig recursion_from(const ConfigFile& cfg) {
  RecursionConfig r;
  r.depth = static_cast<unsigned>(cfg.get_u64("recursion.depth", r.depth));
  r.entries_per_block = static_cast<unsigned>(cfg.get_u64("recursion.entries_per_block", r.entries_per_block));
  r.plb_capacity = cfg.get_u64("recursion.plb_capacity", r.plb_capacity);
  r.unified = cfg.get_bool("recursion.unified", r.unified);
  r.superblock_size = cfg.get_u64("recursion.superblock_size", r.superblock_size);
  r.validate();
  return r;
}

BogusConfig bogus_from(const ConfigFile& cfg) {
  BogusConfig b;
  b.addr_bits = static_cast<unsigned>(cfg.get_u64("bogus.addr_bits", b.addr_bits));
  b.include_data = cfg.get_bool("bogus.include_data", b.include_data);
  b.validate();
  return b;
}

WorkloadSpec workload_from(const ConfigFile& cfg, const std::string& prefix) {
  WorkloadSpec w;
  w.kind = parse_kind(cfg.get(prefix + ".kind", "sequential"));
  if (cfg.has(prefix + ".length")) w.length = cfg.get_u64(prefix + ".length", 0);
  w.addr_space = cfg.get_u64(prefix + ".space", w.addr_space);
  w.stride = cfg.get_u64(prefix + ".stride", w.stride);
  w.zipf_exponent = cfg.get_double(prefix + ".zipf_exponent", w.zipf_exponent);
  w.locality_fraction = cfg.get_double(prefix + ".locality", w.locality_fraction);
  w.write_fraction = cfg.get_double(prefix + ".write_fraction", w.write_fraction);
  w.seed = cfg.get_u64(prefix + ".seed", 0);
  w.validate();
  return w;
}

TraceInput input_from(const ConfigFile& cfg, const std::string& prefix, const fs::path& base) {
  if (cfg.get(prefix + ".kind", "") == "file") {
    fs::path p = cfg.require(prefix + ".file");
    if (p.is_relative()) p = base / p;
    return TraceInput::from_trace(read_trace_file(p));
  }
  if (cfg.has(prefix + ".file")) throw ConfigError(prefix + ".file needs " + prefix + ".kind = file");
  return TraceInput::from_workload(workload_from(cfg, prefix));
}

std::shared_ptr<Construction> construction_from(const ConfigFile& cfg) {
  const auto kind = cfg.require("construction");
  if (kind == "bogus") return make_bogus(bogus_from(cfg));
  if (kind == "periodic") {
    const auto inner = cfg.get("periodic.inner", "path");
    make_oram(inner, cfg, 0);  // validates eagerly
    PeriodicSessionConfig pc;
    pc.o_int = cfg.get_u64("periodic.o_int", pc.o_int);
    pc.mean_interarrival = cfg.get_double("periodic.mean_interarrival", pc.mean_interarrival);
    return make_periodic(pc, [cfg, inner](std::uint64_t seed) { return make_oram(inner, cfg, seed); }, inner);
  }
  if (kind == "praxen") throw ConfigError("construction praxen is driven by praxen-sim, not a single-input session");
  make_oram(kind, cfg, 0);
  return make_oram_construction(kind, [cfg, kind](std::uint64_t seed) { return make_oram(kind, cfg, seed); });
}

std::pair<praxen::PraxenConfig, std::vector<praxen::ThreadSpec>> praxen_from(const ConfigFile& cfg) {
  praxen::PraxenConfig pc;
  const auto alphabet = cfg.get_u64_list("praxen.alphabet", {1, 2, 4, 8});
  pc.alphabet.assign(alphabet.begin(), alphabet.end());
  pc.watermark = cfg.get_double("praxen.watermark", pc.watermark);
  pc.epoch_length = cfg.get_u64("praxen.epoch_length", pc.epoch_length);
  pc.delta = cfg.get_u64("praxen.delta", pc.delta);
  pc.slot_interval = cfg.get_u64("praxen.slot_interval", pc.slot_interval);
  pc.sim_ticks = cfg.get_u64("praxen.sim_ticks", pc.sim_ticks);
  const auto policy = cfg.get("praxen.slot_policy", "strict");
  if (policy == "work_conserving") {
    pc.slot_policy = praxen::SlotPolicy::WorkConserving;
  } else if (policy != "strict") {
    throw ConfigError("praxen.slot_policy must be strict or work_conserving, got '" + policy + "'");
  }
  pc.seed = cfg.get_u64("seed", 0);
  pc.validate();

  std::vector<praxen::ThreadSpec> threads;
  const auto ids = cfg.indices("thread");
  if (ids.empty()) throw ConfigError("praxen-sim needs at least one thread.<i>.* section");
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] != i) throw ConfigError("thread indices must be 0, 1, 2, ... without gaps");
  for (const auto i : ids) {
    const auto p = "thread." + std::to_string(i);
    praxen::ThreadSpec t;
    t.arrival_rate = cfg.get_double(p + ".arrival_rate", t.arrival_rate);
    t.saturated = cfg.get_bool(p + ".saturated", false);
    t.initial_config = static_cast<praxen::Config>(cfg.get_u64(p + ".initial_config", pc.alphabet.front()));
    const auto allowed = cfg.get_u64_list(p + ".initial_allowed", {t.initial_config});
    t.initial_allowed.assign(allowed.begin(), allowed.end());
    if (cfg.has(p + ".first_decision")) t.first_decision = cfg.get_u64(p + ".first_decision", 0);
    t.workload = workload_from(cfg, p);
    threads.push_back(std::move(t));
  }
  return {pc, threads};
}

std::vector<double> ledger_from_decisions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("thread,t,config,allowed_size", 0) != 0)
    throw ParseError(1, "expected a decisions CSV header");
  std::vector<double> bits;
  std::vector<std::size_t> prev;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) throw ParseError(no, "expected at least 4 columns");
    std::size_t thread = 0, size = 0;
    try {
      thread = std::stoul(cells[0]);
      size = std::stoul(cells[3]);
    } catch (const std::logic_error&) {
      throw ParseError(no, "bad thread or allowed_size");
    }
    if (size == 0) throw ParseError(no, "allowed_size must be positive");
    if (thread >= bits.size()) {
      bits.resize(thread + 1, 0.0);
      prev.resize(thread + 1, 0);
    }
    if (prev[thread]) bits[thread] += std::log2(static_cast<double>(prev[thread]));
    prev[thread] = size;
  }
  return bits;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic ORAM simulation lab", "oramlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "oramlab 0.1.0");

  GenFlags gen;
  auto* g = app.add_subcommand("gen-trace", "Write a synthetic logical trace (op,addr[,data] per line)");
  g->add_option("--kind", gen.kind, "sequential, random, strided, zipf or mixed")->capture_default_str();
  g->add_option("--len", gen.length, "Number of accesses")->capture_default_str();
  g->add_option("--space", gen.space, "Address space in blocks (power of two)")->capture_default_str();
  g->add_option("--seed", gen.seed, "Workload seed")->capture_default_str();
  g->add_option("--stride", gen.stride, "Stride for the strided kind")->capture_default_str();
  g->add_option("--zipf", gen.zipf, "Zipf exponent")->capture_default_str();
  g->add_option("--locality", gen.locality, "Mixed kind: probability the next address is previous + 1")
      ->capture_default_str();
  g->add_option("--write-fraction", gen.write_fraction, "Fraction of writes")->capture_default_str();
  g->add_option("--llc-capacity", gen.llc_capacity, "Filter through an LRU cache of this many blocks (0: off)")
      ->capture_default_str();
  g->add_option("--llc-assoc", gen.llc_assoc, "Cache associativity")->capture_default_str();
  g->add_flag("--halt", gen.halt, "Append a Halt record");
  g->add_option("-o,--out", gen.out, "Output file (default stdout)");

  std::string config_path, out_dir;
  auto config_cmd = [&](const char* name, const char* help) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("config", config_path, "Config file (key = value, '#' comments)")->required();
    c->add_option("--out-dir", out_dir, "Override output.dir");
    std::string keys = "Config keys (see docs/FORMATS.md):";
    std::size_t col = keys.size();
    for (auto k : schema_for(name)) {
      for (auto p = k.find('#'); p != std::string::npos; p = k.find('#')) k.replace(p, 1, "<i>");
      if (col + k.size() + 1 > 78) {
        keys += "\n ";
        col = 1;
      }
      keys += " " + k;
      col += k.size() + 1;
    }
    c->footer(keys);
    return c;
  };
  auto* run_cmd = config_cmd("run", "Run one construction; writes <prefix>_observed.csv and <prefix>_counters.csv");
  auto* dist_cmd = config_cmd("distinguish", "Distinguisher experiment; writes <prefix>_report.csv and _summary.txt");
  auto* stash_cmd = config_cmd("stash-analyze", "Stash growth per logical access; writes <prefix>_growth.csv");
  auto* praxen_cmd =
      config_cmd("praxen-sim", "PRAXEN simulation; writes <prefix>_decisions.csv, _service.csv, _ledger.csv");

  LeakageFlags lf;
  auto* leak = app.add_subcommand("leakage-report", "Leakage bounds as CSV (source,item,bits)");
  leak->add_option("--lmax-bits", lf.lmax_bits, "log2 of the maximum run length L_max")->capture_default_str();
  leak->add_option("--round-bits", lf.round_bits, "Termination rounding g (lengths rounded to 2^g)")
      ->capture_default_str();
  leak->add_option("--epochs", lf.epochs, "Number of rate epochs |E|");
  leak->add_option("--rates", lf.rates, "Number of allowed rates |R|");
  leak->add_option("--history", lf.history, "PRAXEN decisions CSV to charge");
  leak->add_option("-o,--out", lf.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (leak->parsed()) return cmd_leakage(lf, out);
    const std::pair<CLI::App*, std::string> cmds[] = {
        {run_cmd, "run"}, {dist_cmd, "distinguish"}, {stash_cmd, "stash-analyze"}, {praxen_cmd, "praxen-sim"}};
    for (const auto& [cmd, name] : cmds) {
      if (!cmd->parsed()) continue;
      const auto cfg = ConfigFile::load(config_path, schema_for(name));
      const auto base = fs::path(config_path).parent_path();
      const auto o = outputs_from(cfg, out_dir, "oramlab");
      if (name == "run") return cmd_run(cfg, base, o, out);
      if (name == "distinguish") return cmd_distinguish(cfg, base, o, out);
      if (name == "stash-analyze") return cmd_stash(cfg, base, o, out);
      return cmd_praxen(cfg, o, out);
    }
  } catch (const ParseError& e) {
    err << "error: " << (config_path.empty() ? lf.history : config_path) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace oramlab::cli
