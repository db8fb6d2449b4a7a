#pragma once

#include <deque>
#include <functional>
#include <iosfwd>

#include "oramlab/path_oram.hpp"

namespace oramlab {

struct TimedRequest {
  Tick arrival = 0;
  LogicalAccess access;
};

/// Requests with exponential inter-arrival gaps (mean 1/rate ticks), rounded
/// up to whole ticks, addresses from `workload`. Arrival ticks are
/// nondecreasing.
std::vector<TimedRequest> poisson_arrivals(double rate_per_tick, std::uint64_t count, const WorkloadSpec& workload,
                                           std::uint64_t seed);

/// Slot engine shared by the static and dynamic modes. Each slot emits exactly
/// one tree access: the next entry of the backlog left by the last ORAM call,
/// else a fresh ORAM access for the queue head, else a background eviction.
class PeriodicScheduler {
 public:
  explicit PeriodicScheduler(Oram& oram) : oram_(&oram) {}

  void enqueue(const LogicalAccess& a) { queue_.push_back(a); }
  ObservedAccess slot(Tick tick);

  /// Requests waiting, not counting the one whose accesses are in flight.
  std::size_t queue_size() const noexcept { return queue_.size(); }
  bool idle() const noexcept { return queue_.empty() && backlog_.empty(); }
  std::uint64_t served() const noexcept { return served_; }

 private:
  Oram* oram_;
  std::deque<LogicalAccess> queue_;
  std::deque<ObservedAccess> backlog_;
  std::uint64_t served_ = 0;
};

struct PeriodicConfig {
  Tick o_int = 10;
  void validate() const;
};

/// Static mode: slot k (1-based) fires at tick k*o_int. Requests with arrival
/// <= the slot tick are queued before the slot runs.
ObservedTrace run_periodic(Oram& oram, const std::vector<TimedRequest>& requests, const PeriodicConfig& cfg,
                           std::uint64_t slots);

struct EpochStats {
  std::size_t index = 0;
  Tick rate = 0;            ///< ticks per access in this epoch
  std::uint64_t slots = 0;
  std::uint64_t real = 0;   ///< slots carrying a request's tree access
  std::uint64_t dummy = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;  ///< requests whose ORAM access started
  double mean_queue = 0.0;   ///< queue length averaged over the epoch's slots
  std::uint64_t end_queue = 0;
};

/// Everything the rate selector may see: the finished epoch's aggregates and
/// the length of the coming epoch. Nothing else reaches it.
struct SelectorInput {
  EpochStats finished;
  std::uint64_t next_epoch_slots = 0;
};

/// Returns an index into the rate list.
using RateSelector = std::function<std::size_t(const SelectorInput&, const std::vector<Tick>& rates)>;

/// Slowest rate whose projected mean queue over the next epoch stays at or
/// below `watermark`; the fastest rate if none does.
RateSelector occupancy_selector(double watermark = 4.0);

struct DynamicResult {
  ObservedTrace trace;
  std::vector<Tick> chosen_rates;
  std::vector<EpochStats> epochs;
};

/// Epoch e runs epoch_slots[e] slots at its chosen interval. The first epoch
/// has no history and runs at the slowest rate.
DynamicResult run_dynamic(Oram& oram, const std::vector<TimedRequest>& requests,
                          const std::vector<std::uint64_t>& epoch_slots, const std::vector<Tick>& rates,
                          const RateSelector& selector);

void write_epoch_csv(const std::vector<EpochStats>& epochs, std::ostream& out);

struct TimingLeakageReport {
  double timing_bits = 0;
  double termination_bits = 0;
  double total_bits = 0;
};

/// log2(L_max) - g; requires 2^g <= L_max.
double termination_leakage(std::uint64_t lmax, unsigned g);
/// Same, with L_max given as its base-2 logarithm.
double termination_leakage_bits(double lmax_bits, unsigned g);

/// |E| * log2|R| + termination bits.
TimingLeakageReport timing_leakage(std::uint64_t epochs, std::uint64_t rates, double lmax_bits, unsigned g);

}  // namespace oramlab
