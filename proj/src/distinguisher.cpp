#include "oramlab/distinguisher.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <mutex>
#include <thread>

namespace oramlab {

namespace {

// Feeding this many requests without reaching n outputs on an unbounded input
// means the construction only emits at end of input.
constexpr std::uint64_t kMaxSilentFeeds = std::uint64_t{1} << 26;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (!construction) throw ConfigError("experiment needs a construction");
  if (samples == 0) throw ConfigError("samples must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (workers == 0) throw ConfigError("workers must be at least 1");
}

Sample run_sample(const Construction& c, const TraceInput& input, std::uint64_t seed, std::uint64_t n,
                  bool need_length) {
  if (need_length && !input.length()) throw ConfigError("total lengths need a finite input");
  auto session = c.start(seed);
  ObservedTrace out;
  auto cursor = input.cursor();
  bool failed = false;
  std::optional<BigUint> total;
  std::uint64_t feeds = 0;
  try {
    while (need_length || out.size() < n) {
      auto a = cursor.next();
      if (!a) {
        total = session->finish(out, out.size() < n ? n - out.size() : 0);
        break;
      }
      session->feed(*a, out);
      if (++feeds > kMaxSilentFeeds && out.empty())
        throw ConfigError(c.name() + " produced no output on an unbounded input");
    }
  } catch (const StashOverflow&) {
    failed = true;
  } catch (const LivelockError&) {
    failed = true;
  }

  Sample s;
  s.prefix.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i < out.size())
      s.prefix.push_back({out[i].tick, static_cast<std::int64_t>(out[i].leaf)});
    else
      s.prefix.push_back({0, failed ? kFail : kEnd});
  }
  if (need_length) s.length = failed ? LengthObs{true, 0} : LengthObs{false, *total};
  return s;
}

std::pair<std::vector<Sample>, std::vector<Sample>> sample_truncations(const ExperimentSpec& spec, bool need_length) {
  spec.validate();
  std::vector<Sample> s[2];
  s[0].resize(spec.samples);
  s[1].resize(spec.samples);
  const TraceInput* inputs[2] = {&spec.a1, &spec.a2};
  const std::uint64_t jobs = 2 * spec.samples;

  // Each job writes only its own slot, so the merge is independent of scheduling.
  auto work = [&](unsigned w) {
    for (std::uint64_t job = w; job < jobs; job += spec.workers) {
      const std::uint64_t i = job / spec.samples, j = job % spec.samples;
      s[i][j] = run_sample(*spec.construction, *inputs[i], derive_seed(spec.master_seed, i, j), spec.n, need_length);
    }
  };
  if (spec.workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex m;
    for (unsigned w = 0; w < spec.workers; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          std::lock_guard lock(m);
          if (!error) error = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  return {std::move(s[0]), std::move(s[1])};
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Indistinguishable: return "Indistinguishable";
    case Verdict::Distinguished: return "Distinguished";
    case Verdict::VacuouslySatisfied: return "VacuouslySatisfied";
  }
  return "?";
}

std::vector<TestRow> trace_tests(const std::vector<Sample>& s1, const std::vector<Sample>& s2, std::uint64_t positions,
                                 double& p) {
  std::vector<double> per;
  per.reserve(positions);
  TestRow worst{"per_position", {}, 1.0};
  std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> marginal;
  for (std::uint64_t pos = 0; pos < positions; ++pos) {
    std::map<Symbol, std::pair<std::uint64_t, std::uint64_t>> cells;
    for (const auto& s : s1) {
      ++cells[s.prefix[pos]].first;
      ++marginal[s.prefix[pos].leaf].first;
    }
    for (const auto& s : s2) {
      ++cells[s.prefix[pos]].second;
      ++marginal[s.prefix[pos].leaf].second;
    }
    const auto chi = stats::two_sample(cells);
    if (per.empty() || chi.p < *std::min_element(per.begin(), per.end())) worst.chi = chi;
    per.push_back(chi.p);
  }
  worst.p = stats::bonferroni(per);
  TestRow marg{"leaf_marginal", stats::two_sample(marginal), 1.0};
  marg.p = marg.chi.p;
  p = std::min(1.0, 2.0 * std::min(worst.p, marg.p));
  return {worst, marg};
}

TestRow length_test(const std::vector<Sample>& s1, const std::vector<Sample>& s2) {
  std::vector<LengthObs> a, b;
  for (const auto& s : s1) a.push_back(s.length.value());
  for (const auto& s : s2) b.push_back(s.length.value());
  TestRow r{"total_length", stats::two_sample_ordinal(std::move(a), std::move(b)), 1.0};
  r.p = r.chi.p;
  return r;
}

namespace {

DistinguisherReport base_report(const ExperimentSpec& spec, std::string def) {
  DistinguisherReport r;
  r.construction = spec.construction->name();
  r.definition = std::move(def);
  r.workload_pair = spec.label;
  r.n = spec.n;
  r.samples = spec.samples;
  r.alpha = spec.alpha;
  return r;
}

Verdict judge(double p, double alpha) { return p < alpha ? Verdict::Distinguished : Verdict::Indistinguishable; }

}  // namespace

DistinguisherReport test_def2(const ExperimentSpec& spec) {
  auto r = base_report(spec, "truncation");
  const auto [s1, s2] = sample_truncations(spec, false);
  r.tests = trace_tests(s1, s2, spec.n, r.p);
  r.verdict = judge(r.p, spec.alpha);
  return r;
}

DistinguisherReport test_def1(const ExperimentSpec& spec) {
  if (!spec.a1.length() || !spec.a2.length()) throw ConfigError("the finite-length test needs finite inputs");
  auto cap = spec;
  cap.n = spec.full_trace_cap;
  auto r = base_report(spec, "finite");
  const auto [s1, s2] = sample_truncations(cap, true);
  const auto len = length_test(s1, s2);
  r.tests.push_back(len);
  if (len.p < spec.alpha) {
    r.p = len.p;
    r.verdict = Verdict::VacuouslySatisfied;
    return r;
  }
  BigUint longest = 0;
  for (const auto* side : {&s1, &s2})
    for (const auto& s : *side)
      if (!s.length->failed && s.length->length > longest) longest = s.length->length;
  const std::uint64_t positions =
      longest < spec.full_trace_cap ? static_cast<std::uint64_t>(longest) : spec.full_trace_cap;
  r.n = positions;
  double p = 1.0;
  auto rows = trace_tests(s1, s2, positions, p);
  r.tests.insert(r.tests.end(), rows.begin(), rows.end());
  r.p = p;
  r.verdict = judge(p, spec.alpha);
  return r;
}

DistinguisherReport test_strong_def(const ExperimentSpec& spec) {
  if (!spec.a1.length() || !spec.a2.length() || *spec.a1.length() != *spec.a2.length())
    throw ConfigError("the strong test needs two finite inputs of equal length");
  auto r = base_report(spec, "strong");
  const auto [s1, s2] = sample_truncations(spec, true);
  const auto len = length_test(s1, s2);
  double p_trace = 1.0;
  auto rows = trace_tests(s1, s2, spec.n, p_trace);
  r.tests.push_back(len);
  r.tests.insert(r.tests.end(), rows.begin(), rows.end());
  r.p = std::min(1.0, 2.0 * std::min(len.p, p_trace));
  r.verdict = judge(r.p, spec.alpha);
  return r;
}

namespace {

ObservedTrace full_run(const Construction& c, const LogicalTrace& input, std::uint64_t seed, std::uint64_t cap) {
  auto session = c.start(seed);
  ObservedTrace out;
  for (const auto& a : input) {
    session->feed(a, out);
    if (out.size() >= cap) break;
  }
  if (out.size() < cap) session->finish(out, cap - out.size());
  if (out.size() > cap) out.resize(cap);
  return out;
}

}  // namespace

CausalityResult test_causality(const Construction& c, const TraceInput& a, const std::vector<std::uint64_t>& n_list,
                               std::uint64_t seed, std::uint64_t cap) {
  CausalityResult res;
  for (const auto n : n_list) {
    const auto short_in = a.prefix(n);
    const auto long_in = a.length() ? a.prefix(*a.length()) : a.prefix(2 * n + 16);
    const auto x = adversary_projection(full_run(c, short_in, seed, cap));
    const auto y = adversary_projection(full_run(c, long_in, seed, cap));
    ++res.checked;
    const bool ok = x.size() <= y.size() && std::equal(x.begin(), x.end(), y.begin());
    if (!ok) {
      res.causal = false;
      if (!res.first_failure) res.first_failure = n;
    }
  }
  return res;
}

StashGrowth stash_growth(const OramConfig& cfg, const RecursionConfig& rc, const TraceInput& a_seq,
                         const TraceInput& a_rand, std::uint64_t window, const std::vector<std::uint64_t>& seeds) {
  StashGrowth g;
  auto rate = [&](const TraceInput& in, std::uint64_t seed) {
    if (window == 0) return 0.0;
    auto c = cfg;
    c.seed = seed;
    RecursiveOram o(c, rc);
    auto cur = in.cursor();
    std::uint64_t done = 0;
    while (done < window) {
      auto a = cur.next();
      if (!a) break;
      if (a->op == Op::Halt) continue;
      o.access(a->op, a->addr, a->data);
      ++done;
    }
    if (done < window) throw ConfigError("stash-growth input shorter than the window");
    return static_cast<double>(o.stash_size()) / static_cast<double>(window);
  };
  for (const auto s : seeds) {
    g.rate_seq.push_back(rate(a_seq, s));
    g.rate_rand.push_back(rate(a_rand, s));
  }
  if (!seeds.empty()) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      g.mean_seq += g.rate_seq[i];
      g.mean_rand += g.rate_rand[i];
    }
    g.mean_seq /= static_cast<double>(seeds.size());
    g.mean_rand /= static_cast<double>(seeds.size());
  }
  return g;
}

std::vector<SuiteEntry> implication_violations(const std::vector<SuiteEntry>& suite) {
  std::vector<SuiteEntry> bad;
  for (const auto& e : suite)
    if (e.causal && e.strong == Verdict::Indistinguishable && e.def2 != Verdict::Indistinguishable) bad.push_back(e);
  return bad;
}

void write_report_csv(const std::vector<DistinguisherReport>& reports, std::ostream& out) {
  out << "construction,definition,workload_pair,n,samples,alpha,test,statistic,dof,p,verdict\n";
  for (const auto& r : reports) {
    const std::string head = r.construction + ',' + r.definition + ',' + r.workload_pair + ',' + std::to_string(r.n) +
                             ',' + std::to_string(r.samples) + ',' + fmt("%g", r.alpha) + ',';
    for (const auto& t : r.tests)
      out << head << t.test << ',' << fmt("%.6f", t.chi.statistic) << ',' << t.chi.dof << ',' << fmt("%.6e", t.p)
          << ",\n";
    out << head << "overall,,," << fmt("%.6e", r.p) << ',' << to_string(r.verdict) << '\n';
  }
}

void write_report_summary(const std::vector<DistinguisherReport>& reports, std::ostream& out) {
  for (const auto& r : reports) {
    out << r.construction << " [" << r.definition << "] " << r.workload_pair << " n=" << r.n
        << " samples=" << r.samples << ": " << to_string(r.verdict) << " (p=" << fmt("%.3g", r.p)
        << ", alpha=" << fmt("%g", r.alpha) << ")\n";
    for (const auto& t : r.tests)
      out << "  " << t.test << ": chi2=" << fmt("%.3f", t.chi.statistic) << " dof=" << t.chi.dof
          << " p=" << fmt("%.3g", t.p) << '\n';
  }
}

}  // namespace oramlab
