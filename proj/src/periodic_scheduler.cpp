#include "oramlab/periodic_scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace oramlab {

std::vector<TimedRequest> poisson_arrivals(double rate_per_tick, std::uint64_t count, const WorkloadSpec& workload,
                                           std::uint64_t seed) {
  if (!(rate_per_tick > 0.0)) throw ConfigError("arrival rate must be positive");
  Rng rng(seed);
  WorkloadGenerator gen(workload);
  std::vector<TimedRequest> out;
  out.reserve(count);
  double t = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto a = gen.next();
    if (!a) break;
    t += -std::log1p(-uniform_unit(rng)) / rate_per_tick;
    out.push_back({static_cast<Tick>(std::ceil(t)), *a});
  }
  return out;
}

ObservedAccess PeriodicScheduler::slot(Tick tick) {
  if (backlog_.empty() && !queue_.empty()) {
    const LogicalAccess a = queue_.front();
    queue_.pop_front();
    auto r = oram_->access(a.op, a.addr, a.data);
    backlog_.assign(r.emitted.begin(), r.emitted.end());
    ++served_;
  }
  ObservedAccess out;
  if (!backlog_.empty()) {
    out = backlog_.front();
    backlog_.pop_front();
  } else {
    out = oram_->background_evict().front();
  }
  out.tick = tick;
  return out;
}

void PeriodicConfig::validate() const {
  if (o_int == 0) throw ConfigError("o_int must be at least 1 tick");
}

ObservedTrace run_periodic(Oram& oram, const std::vector<TimedRequest>& requests, const PeriodicConfig& cfg,
                           std::uint64_t slots) {
  cfg.validate();
  PeriodicScheduler sched(oram);
  ObservedTrace out;
  out.reserve(slots);
  std::size_t next = 0;
  for (std::uint64_t k = 1; k <= slots; ++k) {
    const Tick t = k * cfg.o_int;
    while (next < requests.size() && requests[next].arrival <= t) sched.enqueue(requests[next++].access);
    out.push_back(sched.slot(t));
  }
  return out;
}

RateSelector occupancy_selector(double watermark) {
  return [watermark](const SelectorInput& in, const std::vector<Tick>& rates) -> std::size_t {
    const EpochStats& e = in.finished;
    const double elapsed = static_cast<double>(e.slots) * static_cast<double>(e.rate);
    const double arrivals_per_tick = elapsed > 0 ? static_cast<double>(e.arrivals) / elapsed : 0.0;
    // Tree accesses needed per request, as observed; at least one.
    const double per_request = e.served > 0 ? std::max(1.0, static_cast<double>(e.real) / e.served) : 1.0;
    const double n = static_cast<double>(in.next_epoch_slots);

    std::vector<std::size_t> order(rates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });
    for (const std::size_t i : order) {
      // Net queue growth per slot in requests, then the mean over a linear ramp.
      const double growth = arrivals_per_tick * static_cast<double>(rates[i]) - 1.0 / per_request;
      const double end = std::max(0.0, static_cast<double>(e.end_queue) + growth * n);
      const double mean = (static_cast<double>(e.end_queue) + end) / 2.0;
      if (mean <= watermark) return i;
    }
    return order.back();
  };
}

DynamicResult run_dynamic(Oram& oram, const std::vector<TimedRequest>& requests,
                          const std::vector<std::uint64_t>& epoch_slots, const std::vector<Tick>& rates,
                          const RateSelector& selector) {
  if (rates.empty()) throw ConfigError("rate set must not be empty");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] == 0) throw ConfigError("rates must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (rates[i] == rates[j]) throw ConfigError("rates must be distinct");
  }
  for (const auto s : epoch_slots)
    if (s == 0) throw ConfigError("epoch lengths must be positive");

  DynamicResult res;
  PeriodicScheduler sched(oram);
  std::size_t next = 0;
  Tick t = 0;
  std::size_t choice = static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin());
  for (std::size_t e = 0; e < epoch_slots.size(); ++e) {
    if (e > 0) {
      choice = selector(SelectorInput{res.epochs.back(), epoch_slots[e]}, rates);
      if (choice >= rates.size()) throw ContractViolation("selector returned an invalid rate index");
    }
    const Tick rate = rates[choice];
    res.chosen_rates.push_back(rate);
    EpochStats st;
    st.index = e;
    st.rate = rate;
    st.slots = epoch_slots[e];
    const auto served_before = sched.served();
    double queue_sum = 0;
    for (std::uint64_t k = 0; k < epoch_slots[e]; ++k) {
      t += rate;
      while (next < requests.size() && requests[next].arrival <= t) {
        sched.enqueue(requests[next++].access);
        ++st.arrivals;
      }
      queue_sum += static_cast<double>(sched.queue_size());
      const auto a = sched.slot(t);
      if (a.hidden_kind == AccessKind::Real) ++st.real; else ++st.dummy;
      res.trace.push_back(a);
    }
    st.served = sched.served() - served_before;
    st.mean_queue = queue_sum / static_cast<double>(epoch_slots[e]);
    st.end_queue = sched.queue_size();
    res.epochs.push_back(st);
  }
  return res;
}

void write_epoch_csv(const std::vector<EpochStats>& epochs, std::ostream& out) {
  out << "epoch,rate,slots,real,dummy,arrivals,served,mean_queue,end_queue\n";
  for (const auto& e : epochs) {
    char mq[32];
    std::snprintf(mq, sizeof mq, "%.6f", e.mean_queue);
    out << e.index << ',' << e.rate << ',' << e.slots << ',' << e.real << ',' << e.dummy << ',' << e.arrivals << ','
        << e.served << ',' << mq << ',' << e.end_queue << '\n';
  }
}

double termination_leakage_bits(double lmax_bits, unsigned g) {
  if (!(lmax_bits >= 0.0)) throw ConfigError("L_max must be at least 1");
  if (static_cast<double>(g) > lmax_bits) throw ConfigError("invalid granularity: 2^g exceeds L_max");
  return lmax_bits - static_cast<double>(g);
}

double termination_leakage(std::uint64_t lmax, unsigned g) {
  if (lmax == 0) throw ConfigError("L_max must be at least 1");
  if (g >= 64 || (std::uint64_t{1} << g) > lmax) throw ConfigError("invalid granularity: 2^g exceeds L_max");
  // Exact for powers of two.
  const bool pow2 = (lmax & (lmax - 1)) == 0;
  const double bits = pow2 ? static_cast<double>(std::bit_width(lmax) - 1) : std::log2(static_cast<double>(lmax));
  return bits - static_cast<double>(g);
}

TimingLeakageReport timing_leakage(std::uint64_t epochs, std::uint64_t rates, double lmax_bits, unsigned g) {
  if (epochs == 0 || rates == 0) throw ConfigError("|E| and |R| must be positive");
  TimingLeakageReport r;
  r.timing_bits = static_cast<double>(epochs) * std::log2(static_cast<double>(rates));
  r.termination_bits = termination_leakage_bits(lmax_bits, g);
  r.total_bits = r.timing_bits + r.termination_bits;
  return r;
}

}  // namespace oramlab
