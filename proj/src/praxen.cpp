#include "oramlab/praxen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

namespace oramlab::praxen {

void PastHist::append(DecisionPoint dp) {
  if (!entries_.empty()) {
    const auto& last = entries_.back();
    if (dp.t < last.t || (dp.t == last.t && dp.thread < last.thread))
      throw ContractViolation("decision points must be appended in (time, thread) order");
  }
  entries_.push_back(std::move(dp));
}

std::vector<DecisionPoint> PastHist::of_thread(unsigned thread) const {
  std::vector<DecisionPoint> out;
  for (const auto& e : entries_)
    if (e.thread == thread) out.push_back(e);
  return out;
}

std::vector<DecisionPoint> PastHist::latest() const {
  std::vector<DecisionPoint> out;
  for (const auto& e : entries_) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& x) { return x.thread == e.thread; });
    if (it == out.end())
      out.push_back(e);
    else
      *it = e;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.thread < b.thread; });
  return out;
}

std::optional<std::pair<Tick, unsigned>> next_decision_point(const PastHist& hist, Tick t) {
  std::optional<std::pair<Tick, unsigned>> best;
  for (const auto& e : hist.latest()) {
    if (e.next < t) continue;
    if (!best || std::pair{e.next, e.thread} < *best) best = std::pair{e.next, e.thread};
  }
  return best;
}

DefaultPolicy::DefaultPolicy(std::vector<Config> alphabet, double watermark, Tick epoch_length)
    : alphabet_(std::move(alphabet)), watermark_(watermark), epoch_(epoch_length) {
  if (alphabet_.empty()) throw ConfigError("config alphabet must not be empty");
  std::sort(alphabet_.begin(), alphabet_.end());
  if (std::adjacent_find(alphabet_.begin(), alphabet_.end()) != alphabet_.end())
    throw ConfigError("config alphabet has duplicates");
  if (epoch_ == 0) throw ConfigError("epoch length must be positive");
}

Config DefaultPolicy::choose(const std::vector<DecisionPoint>& hist_i, Tick, const PerfInd& perf) const {
  const auto& allowed = hist_i.back().allowed;
  if (perf.mean_queue > watermark_) return *std::max_element(allowed.begin(), allowed.end());
  return *std::min_element(allowed.begin(), allowed.end());
}

std::pair<std::vector<Config>, Tick> DefaultPolicy::plan(const std::vector<DecisionPoint>&, Tick decision_time,
                                                         Config chosen) const {
  const auto it = std::find(alphabet_.begin(), alphabet_.end(), chosen);
  if (it == alphabet_.end()) throw ContractViolation("chosen config is not in the alphabet");
  std::vector<Config> next;
  if (it != alphabet_.begin()) next.push_back(*(it - 1));
  next.push_back(*it);
  if (it + 1 != alphabet_.end()) next.push_back(*(it + 1));
  return {next, decision_time + epoch_};
}

void LeakageLedger::resize(std::size_t threads) {
  bits.resize(threads, 0.0);
  product.resize(threads, 1);
  lambdas.resize(threads);
}

void LeakageLedger::charge(unsigned thread, std::size_t allowed_size) {
  if (allowed_size == 0) throw ContractViolation("empty allowed set");
  if (thread >= bits.size()) resize(thread + 1);
  const double lambda = std::log2(static_cast<double>(allowed_size));
  lambdas[thread].push_back(lambda);
  bits[thread] += lambda;
  product[thread] *= allowed_size;
}

double LeakageLedger::total() const { return std::accumulate(bits.begin(), bits.end(), 0.0); }

DecisionPoint scheduler_step(const Policy& policy, PastHist& hist, LeakageLedger& ledger, unsigned thread,
                             Tick decision_time, const PerfInd& perf) {
  const auto hist_i = hist.of_thread(thread);
  if (hist_i.empty()) throw ContractViolation("thread has no initial decision point");
  const auto& prev = hist_i.back();
  if (prev.next != decision_time) throw ContractViolation("decision time does not match the pending t'");
  const Config c = policy.choose(hist_i, decision_time, perf);
  if (std::find(prev.allowed.begin(), prev.allowed.end(), c) == prev.allowed.end())
    throw ContractViolation("chosen config " + std::to_string(c) + " is outside the allowed set");
  auto [allowed, next] = policy.plan(hist_i, decision_time, c);
  if (allowed.empty()) throw ContractViolation("policy produced an empty allowed set");
  if (next <= decision_time) throw ContractViolation("next decision time must be later");
  DecisionPoint dp{thread, c, decision_time, std::move(allowed), next};
  ledger.charge(thread, prev.allowed.size());
  hist.append(dp);
  return dp;
}

std::vector<unsigned> alloc(const std::vector<Config>& configs) {
  std::vector<unsigned> frame;
  std::uint64_t g = 0;
  for (const auto c : configs) g = std::gcd(g, std::uint64_t{c});
  for (unsigned i = 0; i < configs.size(); ++i) {
    const std::uint64_t share = g == 0 ? 1 : configs[i] / g;
    frame.insert(frame.end(), share, i);
  }
  return frame;
}

void PraxenConfig::validate() const {
  if (alphabet.empty()) throw ConfigError("config alphabet must not be empty");
  if (epoch_length == 0) throw ConfigError("epoch length must be positive");
  if (slot_interval == 0) throw ConfigError("slot interval must be positive");
}

namespace {

struct Request {
  Tick arrival;
  LogicalAccess access;
};

struct ThreadState {
  std::deque<Request> queue;
  Config config = 0;
  Rng arrivals{0};
  double next_arrival = 0;
  std::optional<WorkloadGenerator> addresses;
  // Perf accumulators since the thread's last decision.
  double queue_sum = 0;
  std::uint64_t queue_samples = 0;
  std::uint64_t served = 0;
  double latency_sum = 0;
};

}  // namespace

PraxenResult run_praxen(const std::vector<ThreadSpec>& threads, Oram& oram, const PraxenConfig& cfg,
                        const Policy& policy) {
  cfg.validate();
  if (threads.empty()) throw ConfigError("at least one thread is required");
  PraxenResult res;
  res.traces.resize(threads.size());
  res.service.resize(threads.size());
  res.ledger.resize(threads.size());

  std::vector<ThreadState> st(threads.size());
  for (unsigned i = 0; i < threads.size(); ++i) {
    const auto& th = threads[i];
    if (th.initial_allowed.empty()) throw ConfigError("initial allowed set must not be empty");
    if (!th.saturated && !(th.arrival_rate > 0)) throw ConfigError("arrival rate must be positive");
    st[i].config = th.initial_config;
    st[i].arrivals.seed(derive_seed(cfg.seed, i, 1));
    auto w = th.workload;
    w.length.reset();
    w.seed = derive_seed(cfg.seed, i, 2);
    st[i].addresses.emplace(w);
    if (!th.saturated) st[i].next_arrival = -std::log1p(-uniform_unit(st[i].arrivals)) / th.arrival_rate;
    if (th.first_decision) res.hist.append({i, th.initial_config, 0, th.initial_allowed, *th.first_decision});
  }

  auto configs = [&] {
    std::vector<Config> c;
    for (const auto& s : st) c.push_back(s.config);
    return c;
  };
  std::vector<unsigned> frame = alloc(configs());
  std::uint64_t pos = 0;
  res.segments.push_back({0, frame.size() * cfg.slot_interval});
  std::vector<std::tuple<Tick, unsigned, Config>> pending;  // (apply tick, thread, config)
  const auto space = oram.address_space();

  auto next_request = [&](unsigned i, Tick arrival) {
    auto a = *st[i].addresses->next();
    a.addr %= space;
    return Request{arrival, a};
  };

  for (Tick t = 0; t < cfg.sim_ticks; ++t) {
    // Decision points due now, lowest thread first.
    while (true) {
      const auto nd = next_decision_point(res.hist, t);
      if (!nd || nd->first != t) break;
      const unsigned i = nd->second;
      auto& s = st[i];
      PerfInd perf;
      perf.mean_queue = s.queue_samples ? s.queue_sum / static_cast<double>(s.queue_samples) : 0.0;
      perf.served = s.served;
      perf.mean_latency = s.served ? s.latency_sum / static_cast<double>(s.served) : 0.0;
      const auto dp = scheduler_step(policy, res.hist, res.ledger, i, t, perf);
      pending.emplace_back(t + cfg.delta, i, dp.config);
      s.queue_sum = 0;
      s.queue_samples = 0;
      s.served = 0;
      s.latency_sum = 0;
    }

    // Configuration changes take effect delta ticks after their decision.
    bool changed = false;
    std::sort(pending.begin(), pending.end());
    while (!pending.empty() && std::get<0>(pending.front()) == t) {
      const auto [at, i, c] = pending.front();
      pending.erase(pending.begin());
      st[i].config = c;
      res.applications.emplace_back(at, i);
      changed = true;
    }
    if (changed) {
      frame = alloc(configs());
      pos = 0;
      res.segments.push_back({t, frame.size() * cfg.slot_interval});
    }

    for (unsigned i = 0; i < threads.size(); ++i) {
      auto& s = st[i];
      if (threads[i].saturated) continue;
      while (s.next_arrival <= static_cast<double>(t)) {
        s.queue.push_back(next_request(i, t));
        s.next_arrival += -std::log1p(-uniform_unit(s.arrivals)) / threads[i].arrival_rate;
      }
    }

    if (t % cfg.slot_interval != 0) continue;

    for (unsigned i = 0; i < threads.size(); ++i) {
      if (threads[i].saturated && st[i].queue.empty()) st[i].queue.push_back(next_request(i, t));
      st[i].queue_sum += static_cast<double>(st[i].queue.size());
      ++st[i].queue_samples;
    }

    unsigned owner = frame[pos % frame.size()];
    ++pos;
    if (st[owner].queue.empty() && cfg.slot_policy == SlotPolicy::WorkConserving) {
      for (unsigned k = 1; k < threads.size(); ++k) {
        const unsigned j = (owner + k) % threads.size();
        if (!st[j].queue.empty()) {
          owner = j;
          break;
        }
      }
    }
    auto& s = st[owner];
    if (s.queue.empty()) {
      oram.background_evict();
      ++res.dummy_slots;
      continue;
    }
    const Request r = s.queue.front();
    s.queue.pop_front();
    auto out = oram.access(r.access.op, r.access.addr, r.access.data);
    for (auto& e : out.emitted) {
      e.tick = t;
      res.traces[owner].push_back(e);
    }
    res.service[owner].push_back({t, t - r.arrival});
    ++s.served;
    s.latency_sum += static_cast<double>(t - r.arrival);
  }
  return res;
}

std::vector<DecisionPoint> choice_violations(const PastHist& hist) {
  std::vector<DecisionPoint> bad;
  std::set<unsigned> threads;
  for (const auto& e : hist.entries()) threads.insert(e.thread);
  for (const auto i : threads) {
    const auto h = hist.of_thread(i);
    for (std::size_t j = 1; j < h.size(); ++j) {
      const auto& prev = h[j - 1].allowed;
      if (std::find(prev.begin(), prev.end(), h[j].config) == prev.end() || h[j].t != h[j - 1].next)
        bad.push_back(h[j]);
    }
  }
  return bad;
}

bool phase2_replay_matches(const Policy& policy, const PastHist& hist) {
  std::set<unsigned> threads;
  for (const auto& e : hist.entries()) threads.insert(e.thread);
  for (const auto i : threads) {
    const auto h = hist.of_thread(i);
    for (std::size_t j = 1; j < h.size(); ++j) {
      const std::vector<DecisionPoint> before(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(j));
      const auto [allowed, next] = policy.plan(before, h[j].t, h[j].config);
      if (allowed != h[j].allowed || next != h[j].next) return false;
    }
  }
  return true;
}

std::vector<Tick> aperiodic_windows(const std::vector<Service>& service, const std::vector<Segment>& segments,
                                    Tick end) {
  std::vector<Tick> bad;
  for (std::size_t w = 0; w < segments.size(); ++w) {
    const Tick lo = segments[w].start, p = segments[w].period;
    const Tick hi = w + 1 < segments.size() ? segments[w + 1].start : end;
    std::set<Tick> in;
    for (const auto& x : service)
      if (x.tick >= lo && x.tick < hi) in.insert(x.tick);
    for (const auto x : in)
      if ((x + p < hi && !in.count(x + p)) || (x >= lo + p && !in.count(x - p))) {
        bad.push_back(lo);
        break;
      }
  }
  return bad;
}

void write_decisions_csv(const PastHist& hist, Tick delta, std::ostream& out) {
  out << "thread,t,config,allowed_size,lambda_bits,next_t,applied_at\n";
  std::vector<std::size_t> prev_size;
  for (const auto& e : hist.entries()) {
    if (prev_size.size() <= e.thread) prev_size.resize(e.thread + 1, 0);
    const bool initial = prev_size[e.thread] == 0;
    const double lambda = initial ? 0.0 : std::log2(static_cast<double>(prev_size[e.thread]));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", lambda);
    out << e.thread << ',' << e.t << ',' << e.config << ',' << e.allowed.size() << ',' << buf << ',' << e.next << ','
        << (initial ? e.t : e.t + delta) << '\n';
    prev_size[e.thread] = e.allowed.size();
  }
}

void write_service_csv(const std::vector<std::vector<Service>>& service, std::ostream& out) {
  out << "thread,tick,latency\n";
  for (std::size_t i = 0; i < service.size(); ++i)
    for (const auto& s : service[i]) out << i << ',' << s.tick << ',' << s.latency << '\n';
}

void write_ledger_csv(const PastHist& hist, const LeakageLedger& ledger, std::ostream& out) {
  out << "thread,decisions,bits\n";
  for (std::size_t i = 0; i < ledger.bits.size(); ++i) {
    if (hist.of_thread(static_cast<unsigned>(i)).empty()) continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", ledger.bits[i]);
    out << i << ',' << ledger.lambdas[i].size() << ',' << buf << '\n';
  }
}

}  // namespace oramlab::praxen
