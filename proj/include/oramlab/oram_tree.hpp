#pragma once

#include <unordered_map>

#include "oramlab/common.hpp"

namespace oramlab {

/// A real block as it travels between tree and stash. `leaf` is the path the
/// block is currently mapped to.
struct Block {
  BlockAddr addr = 0;
  Leaf leaf = 0;
  Payload data;
};

struct StashEntry {
  Block block;
  std::uint64_t inserted = 0;  ///< insertion sequence number; defines stash order
};

/// Binary tree of 2^(L+1)-1 buckets of Z slots each, plus the stash. Buckets
/// are stored heap-ordered: root is node 0, children of n are 2n+1 and 2n+2.
/// Dummies are implicit (empty slots).
class OramTree {
 public:
  OramTree(unsigned levels, unsigned bucket_size);

  unsigned levels() const noexcept { return levels_; }
  unsigned bucket_size() const noexcept { return z_; }
  std::size_t bucket_count() const noexcept { return fill_.size(); }
  std::uint64_t leaf_count() const noexcept { return std::uint64_t{1} << levels_; }

  /// Node index of the level-`level` bucket on path `leaf`.
  std::size_t node_on_path(Leaf leaf, unsigned level) const noexcept {
    return ((std::size_t{1} << level) - 1) + (static_cast<std::size_t>(leaf) >> (levels_ - level));
  }
  /// Level of heap node `node`.
  static unsigned node_level(std::size_t node) noexcept;
  /// True iff bucket `node` lies on path `leaf`.
  bool on_path(std::size_t node, Leaf leaf) const noexcept;

  std::span<const Block> bucket(std::size_t node) const noexcept {
    return {slots_.data() + node * z_, fill_[node]};
  }

  /// Moves every real block on path `leaf` into the stash, root first.
  void read_path(Leaf leaf);

  /// Greedy write-back: from the leaf bucket up to the root, each bucket takes
  /// up to Z stash blocks whose assigned leaf lies in its subtree, earliest
  /// inserted first. Returns the number of blocks written.
  std::size_t write_path(Leaf leaf);

  std::size_t stash_size() const noexcept { return stash_.size(); }
  Block* stash_find(BlockAddr addr);
  const Block* stash_find(BlockAddr addr) const;
  void stash_insert(Block block);
  std::optional<Block> stash_remove(BlockAddr addr);
  /// Stash contents in insertion order.
  std::vector<StashEntry> stash_entries() const;

  /// Puts a block directly into bucket `node`; false if the bucket is full.
  /// Used for snapshots and test fixtures; does not check path membership.
  bool place(std::size_t node, Block block);
  /// Removes and returns the block with `addr` from bucket `node`, if present.
  std::optional<Block> take(std::size_t node, BlockAddr addr);

 private:
  void stash_erase_at(std::size_t index);

  unsigned levels_;
  unsigned z_;
  std::vector<Block> slots_;
  std::vector<std::uint16_t> fill_;
  // Stash is kept unordered with swap-removal; `inserted` recovers the order.
  std::vector<StashEntry> stash_;
  std::unordered_map<BlockAddr, std::size_t> stash_index_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace oramlab
