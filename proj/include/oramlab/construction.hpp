#pragma once

#include <functional>
#include <memory>

#include "oramlab/bogus_oram.hpp"
#include "oramlab/periodic_scheduler.hpp"
#include "oramlab/recursive_oram.hpp"

namespace oramlab {

/// Raised by a session when a finite stash overflows without background
/// eviction; harnesses record it as a distinct outcome.
class StashOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One run of a construction on one input, driven request by request.
class Session {
 public:
  virtual ~Session() = default;
  /// Processes the next logical request, appending what the adversary sees.
  virtual void feed(const LogicalAccess& a, ObservedTrace& out) = 0;
  /// End of input. Appends at most `budget` of the remaining accesses and
  /// returns the total observed length of the whole run.
  virtual BigUint finish(ObservedTrace& out, std::uint64_t budget) = 0;
};

class Construction {
 public:
  virtual ~Construction() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Session> start(std::uint64_t seed) const = 0;
};

using OramFactory = std::function<std::unique_ptr<Oram>(std::uint64_t seed)>;

/// Serves each request immediately; the seed replaces cfg.seed.
std::shared_ptr<Construction> make_oram_construction(std::string name, OramFactory factory);
std::shared_ptr<Construction> make_path_oram(const OramConfig& cfg);
std::shared_ptr<Construction> make_recursive_oram(const OramConfig& cfg, const RecursionConfig& rc);

/// Buffers the whole input, then emits the padded plan.
std::shared_ptr<Construction> make_bogus(const BogusConfig& cfg, InnerRam inner = pass_through);

struct PeriodicSessionConfig {
  Tick o_int = 10;
  /// Requests arrive with exponential gaps of this mean (ticks), drawn from a
  /// stream derived from the session seed, one gap per fed request.
  double mean_interarrival = 20.0;
};

/// Static periodic ORAM. Feeding a request first runs every slot strictly
/// before its arrival tick; finish runs slots until the queue drains.
std::shared_ptr<Construction> make_periodic(const PeriodicSessionConfig& cfg, OramFactory inner,
                                            std::string inner_name);

/// Negative control: holds each request back and lets the next request's
/// address flip the leaf it reports, so its output on a prefix is not a prefix
/// of its output on the longer input.
std::shared_ptr<Construction> make_future_peeking(const OramConfig& cfg);

}  // namespace oramlab
