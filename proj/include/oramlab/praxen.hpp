#pragma once

#include <iosfwd>

#include "oramlab/path_oram.hpp"

namespace oramlab::praxen {

using Config = std::uint32_t;  ///< resource weight

/// (i, c_i, t_i, C_i, t'_i): thread i switched to c_i at t_i, may next choose
/// from C_i, at time t'_i.
struct DecisionPoint {
  unsigned thread = 0;
  Config config = 0;
  Tick t = 0;
  std::vector<Config> allowed;
  Tick next = 0;
  friend bool operator==(const DecisionPoint&, const DecisionPoint&) = default;
};

/// Time-ordered decision log. Entry 0 of each thread's projection is its
/// initial state, which costs no leakage.
class PastHist {
 public:
  void append(DecisionPoint dp);
  const std::vector<DecisionPoint>& entries() const noexcept { return entries_; }
  std::vector<DecisionPoint> of_thread(unsigned thread) const;
  /// Latest entry of each thread that has one.
  std::vector<DecisionPoint> latest() const;

 private:
  std::vector<DecisionPoint> entries_;
};

/// min over pending t'_i >= t, lowest thread id on ties; nullopt when the
/// schedule is exhausted.
std::optional<std::pair<Tick, unsigned>> next_decision_point(const PastHist& hist, Tick t);

struct PerfInd {
  double mean_queue = 0;
  std::uint64_t served = 0;
  double mean_latency = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  /// Phase 1: pick c' from the thread's current allowed set.
  virtual Config choose(const std::vector<DecisionPoint>& hist_i, Tick decision_time, const PerfInd& perf) const = 0;
  /// Phase 2: next allowed set and decision time. Never sees performance data.
  virtual std::pair<std::vector<Config>, Tick> plan(const std::vector<DecisionPoint>& hist_i, Tick decision_time,
                                                    Config chosen) const = 0;
};

/// Phase 1: highest weight in C if the last epoch's mean queue exceeds the
/// watermark, else the lowest. Phase 2: C' = c' and its alphabet neighbours,
/// t'' = decision time + epoch length.
class DefaultPolicy final : public Policy {
 public:
  DefaultPolicy(std::vector<Config> alphabet, double watermark, Tick epoch_length);
  Config choose(const std::vector<DecisionPoint>& hist_i, Tick decision_time, const PerfInd& perf) const override;
  std::pair<std::vector<Config>, Tick> plan(const std::vector<DecisionPoint>& hist_i, Tick decision_time,
                                            Config chosen) const override;

 private:
  std::vector<Config> alphabet_;
  double watermark_;
  Tick epoch_;
};

/// Per-thread bound sum_j log2|C^(j-1)|. `product` keeps prod_j |C^(j-1)| so
/// the bound is exact when every set size is a power of two.
struct LeakageLedger {
  std::vector<double> bits;
  std::vector<BigUint> product;
  std::vector<std::vector<double>> lambdas;

  void resize(std::size_t threads);
  void charge(unsigned thread, std::size_t allowed_size);
  double total() const;
};

/// Records the step: checks c' in C (ContractViolation otherwise), runs phase
/// 2, appends the new decision point and charges log2|C|.
DecisionPoint scheduler_step(const Policy& policy, PastHist& hist, LeakageLedger& ledger, unsigned thread,
                             Tick decision_time, const PerfInd& perf);

/// Slot frame: weights divided by their gcd, thread ids repeated in id order.
/// All-zero weights give one slot each.
std::vector<unsigned> alloc(const std::vector<Config>& configs);

struct ThreadSpec {
  double arrival_rate = 0.05;  ///< requests per tick
  WorkloadSpec workload;       ///< addresses; length is ignored
  Config initial_config = 1;
  std::vector<Config> initial_allowed{1};
  /// First decision time; nullopt keeps the configuration fixed.
  std::optional<Tick> first_decision;
  /// Always has a request waiting (arrival_rate is ignored).
  bool saturated = false;
};

enum class SlotPolicy : std::uint8_t {
  Strict,          ///< an owner with nothing queued gets a dummy access
  WorkConserving,  ///< idle slots go to other threads (leaks; test control)
};

struct PraxenConfig {
  std::vector<Config> alphabet{1, 2, 4, 8};
  double watermark = 2.0;
  Tick epoch_length = 400;
  Tick delta = 1;
  Tick slot_interval = 4;  ///< ticks per controller slot
  Tick sim_ticks = 20000;
  SlotPolicy slot_policy = SlotPolicy::Strict;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Service {
  Tick tick = 0;
  Tick latency = 0;
};

/// Interval of static allocation: from `start` until the next segment, slot
/// ownership repeats every `period` ticks.
struct Segment {
  Tick start = 0;
  Tick period = 0;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct PraxenResult {
  std::vector<ObservedTrace> traces;          ///< ORAM accesses made for each thread
  std::vector<std::vector<Service>> service;  ///< per thread
  PastHist hist;
  LeakageLedger ledger;
  std::vector<std::pair<Tick, unsigned>> applications;  ///< (tick, thread) of config changes
  std::vector<Segment> segments;                        ///< one per allocation, starting at tick 0
  std::uint64_t dummy_slots = 0;
};

PraxenResult run_praxen(const std::vector<ThreadSpec>& threads, Oram& oram, const PraxenConfig& cfg,
                        const Policy& policy);

/// Every recorded c' lies in the thread's previous C. Returns violations.
std::vector<DecisionPoint> choice_violations(const PastHist& hist);
/// Recomputes every phase-2 output from history, time and c' alone.
bool phase2_replay_matches(const Policy& policy, const PastHist& hist);
/// Start ticks of the segments in which the service ticks are not invariant
/// under a shift by the segment period in either direction, within the segment.
std::vector<Tick> aperiodic_windows(const std::vector<Service>& service, const std::vector<Segment>& segments,
                                    Tick end);

void write_decisions_csv(const PastHist& hist, Tick delta, std::ostream& out);
void write_service_csv(const std::vector<std::vector<Service>>& service, std::ostream& out);
void write_ledger_csv(const PastHist& hist, const LeakageLedger& ledger, std::ostream& out);

}  // namespace oramlab::praxen
