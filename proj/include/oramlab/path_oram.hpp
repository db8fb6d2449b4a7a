#pragma once

#include "oramlab/oram_tree.hpp"
#include "oramlab/trace_model.hpp"

namespace oramlab {

enum class EvictionKind : std::uint8_t { None, Background };

struct OramConfig {
  unsigned levels = 10;                       ///< L; root is level 0, leaves level L
  unsigned bucket_size = 4;                   ///< Z
  std::optional<std::size_t> stash_capacity;  ///< nullopt: unbounded
  EvictionKind eviction = EvictionKind::None;
  /// Background eviction fires while stash occupancy >= threshold. Defaults to
  /// stash_capacity - Z*(L+1), which leaves room for one full path.
  std::optional<std::size_t> eviction_threshold;
  std::uint64_t num_blocks = 0;  ///< logical address space in blocks; 0 means 2^L
  std::uint64_t seed = 0;

  void validate() const;
  std::uint64_t blocks() const noexcept { return num_blocks ? num_blocks : (std::uint64_t{1} << levels); }
  std::size_t threshold() const;
};

struct OramCounters {
  std::uint64_t real_accesses = 0;
  std::uint64_t dummy_accesses = 0;
  std::uint64_t stash_peak = 0;
  std::uint64_t overflow_events = 0;
};

struct AccessOutcome {
  Payload payload;          ///< block contents before the access
  ObservedTrace emitted;    ///< dummies issued first, then the real path(s)
  bool overflow = false;    ///< stash exceeded its capacity after write-back
};

/// Common surface of every tree ORAM so schedulers and harnesses can drive
/// any of them.
class Oram {
 public:
  virtual ~Oram() = default;
  virtual AccessOutcome access(Op op, BlockAddr addr, const Payload& data = {}) = 0;
  /// One dummy path access (background eviction on a uniform path).
  virtual ObservedTrace background_evict() = 0;
  virtual const OramCounters& counters() const noexcept = 0;
  /// Stash occupancy summed over every tree the construction owns.
  virtual std::size_t stash_size() const noexcept = 0;
  virtual std::uint64_t address_space() const noexcept = 0;
};

/// Non-recursive Path ORAM with an on-chip position map.
///
/// Blocks come into existence on first access (read or write) with a zero
/// payload; their initial leaf is the one drawn at construction, so the
/// observable behaviour matches an ORAM whose whole address space was
/// preloaded.
class PathOram final : public Oram {
 public:
  explicit PathOram(const OramConfig& cfg);

  AccessOutcome access(Op op, BlockAddr addr, const Payload& data = {}) override;
  ObservedTrace background_evict() override;
  /// Runs background evictions while occupancy >= threshold. No-op when
  /// eviction is disabled. Throws LivelockError after 1000 consecutive
  /// evictions that fail to get below the threshold.
  ObservedTrace maybe_evict();

  /// Main invariant: every materialized block sits on the path named by the
  /// position map or in the stash, exactly once, and no bucket exceeds Z.
  bool check_invariant() const;

  /// Structured text dump of position map, stash and per-bucket occupancy.
  std::string dump_state() const;

  const OramCounters& counters() const noexcept override { return counters_; }
  std::size_t stash_size() const noexcept override { return tree_.stash_size(); }
  std::uint64_t address_space() const noexcept override { return cfg_.blocks(); }

  const OramConfig& config() const noexcept { return cfg_; }
  Leaf position(BlockAddr addr) const { return posmap_.at(addr); }
  const OramTree& tree() const noexcept { return tree_; }
  /// Mutable access for fault-injection fixtures.
  OramTree& tree_for_testing() noexcept { return tree_; }

 private:
  void emit(ObservedTrace& out, Leaf leaf, AccessKind kind);
  void after_write_back(bool& overflow);

  OramConfig cfg_;
  OramTree tree_;
  std::vector<Leaf> posmap_;
  std::vector<bool> materialized_;
  Rng rng_;
  Tick tick_ = 0;
  OramCounters counters_;
};

/// Shared livelock bound for background eviction loops.
inline constexpr int kMaxFutileEvictions = 1000;

}  // namespace oramlab
