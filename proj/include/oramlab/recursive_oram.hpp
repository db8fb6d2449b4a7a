#pragma once

#include "oramlab/lru_cache.hpp"
#include "oramlab/path_oram.hpp"

namespace oramlab {

struct RecursionConfig {
  unsigned depth = 0;                ///< number of position-map ORAMs; 0 is plain Path ORAM
  unsigned entries_per_block = 8;    ///< k leaf labels per position-map block, power of two in [2, 16]
  std::size_t plb_capacity = 0;      ///< position-map blocks cached on chip; 0 disables the PLB
  bool unified = false;              ///< position-map blocks share the data tree
  std::uint64_t superblock_size = 1; ///< power of two; 1 disables prefetching

  void validate() const;
};

/// Position-map block identity: (recursion level >= 1, block index at that level).
struct PosmapKey {
  unsigned level = 0;
  std::uint64_t index = 0;
  friend bool operator==(const PosmapKey&, const PosmapKey&) = default;
};

struct PosmapKeyHash {
  std::size_t operator()(const PosmapKey& k) const noexcept {
    return static_cast<std::size_t>(splitmix64(k.index ^ (std::uint64_t{k.level} << 56)));
  }
};

/// Position-map lookaside buffer: fully associative LRU over position-map
/// blocks held on chip. A resident block is out of its tree; it goes back to
/// the stash when evicted.
class Plb {
 public:
  explicit Plb(std::size_t capacity) : cache_(capacity) {}

  /// Hit promotes to most-recent and returns the cached block.
  Block* lookup(unsigned level, std::uint64_t index) { return cache_.lookup({level, index}); }
  /// Returns the evicted LRU block (or `block` itself when capacity is 0).
  std::optional<std::pair<PosmapKey, Block>> insert(unsigned level, std::uint64_t index, Block block);

  std::size_t capacity() const noexcept { return cache_.capacity(); }
  std::size_t size() const noexcept { return cache_.size(); }
  const Block* peek(unsigned level, std::uint64_t index) const { return cache_.peek({level, index}); }

 private:
  LruCache<PosmapKey, Block, PosmapKeyHash> cache_;
};

struct RecursiveCounters {
  std::vector<std::uint64_t> tree_accesses;  ///< real tree accesses per recursion level (0 = data)
  std::uint64_t posmap_accesses_saved = 0;   ///< position-map tree accesses skipped on PLB hits
  std::uint64_t plb_lookups = 0;
  std::uint64_t plb_hits = 0;
  std::uint64_t prefetch_lookups = 0;
  std::uint64_t prefetch_hits = 0;
};

/// Recursive Path ORAM. Level 0 holds data; level i >= 1 holds position-map
/// blocks whose k labels map level i-1 units. The last level's map lives on
/// chip. With super blocks, level-0 units are aligned groups of
/// superblock_size consecutive addresses that share one leaf.
///
/// Position-map blocks are created on first touch with freshly drawn uniform
/// labels, which is observationally the same as initializing them up front.
class RecursiveOram final : public Oram {
 public:
  RecursiveOram(const OramConfig& tree_cfg, const RecursionConfig& rc);

  AccessOutcome access(Op op, BlockAddr addr, const Payload& data = {}) override;
  /// Dummy access on a uniform path of the data tree (the only tree when unified).
  ObservedTrace background_evict() override;

  const OramCounters& counters() const noexcept override { return counters_; }
  std::size_t stash_size() const noexcept override;
  std::uint64_t address_space() const noexcept override { return cfg_.blocks(); }

  std::size_t tree_count() const noexcept { return trees_.size(); }
  const OramTree& tree(std::size_t i) const { return trees_.at(i); }
  std::size_t stash_size_of_level(unsigned level) const { return trees_.at(tree_of(level)).stash_size(); }
  const RecursiveCounters& recursion_counters() const noexcept { return rcounters_; }
  const RecursionConfig& recursion() const noexcept { return rc_; }
  std::uint64_t onchip_entries() const noexcept { return onchip_.size(); }

  /// Full-scan oracle: resolves every materialized block's leaf by walking the
  /// on-chip map and position-map blocks (without ORAM accesses) and checks
  /// that the block sits on that path, in its stash, or in the PLB; also checks
  /// bucket bounds and that super-block members share a leaf.
  bool check_consistency() const;

 private:
  std::size_t tree_of(unsigned level) const noexcept { return rc_.unified ? 0 : level; }
  BlockAddr tree_addr(unsigned level, std::uint64_t index) const noexcept;
  ObservedTrace maybe_evict(std::size_t tree);
  ObservedTrace evict_once(std::size_t tree);
  Leaf draw_leaf(std::size_t tree);
  void emit(ObservedTrace& out, Leaf leaf, AccessKind kind) { out.push_back({tick_++, leaf, kind}); }
  void note_stash(std::size_t tree, bool& overflow);
  Block fresh_posmap_block(unsigned level, std::uint64_t index, Leaf leaf);
  AccessOutcome serve(Op op, BlockAddr addr, const Payload& data);

  OramConfig cfg_;
  RecursionConfig rc_;
  std::vector<OramTree> trees_;
  std::vector<std::uint64_t> units_;   ///< units_[i]: number of level-i units
  std::vector<std::uint64_t> offset_;  ///< unified address offset of level i
  std::vector<Leaf> onchip_;
  std::vector<std::vector<bool>> created_;
  Plb plb_;
  LruCache<BlockAddr, Payload> prefetch_;
  Rng rng_;
  Tick tick_ = 0;
  OramCounters counters_;
  RecursiveCounters rcounters_;
};

}  // namespace oramlab
