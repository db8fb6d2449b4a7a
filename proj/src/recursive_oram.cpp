#include "oramlab/recursive_oram.hpp"

#include <unordered_map>

namespace oramlab {

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

void RecursionConfig::validate() const {
  if (depth > 8) throw ConfigError("recursion depth above 8 is not supported");
  if (depth >= 1 && (entries_per_block < 2 || entries_per_block > 16 || !is_power_of_two(entries_per_block)))
    throw ConfigError("entries per position-map block must be a power of two in [2, 16]");
  if (!is_power_of_two(superblock_size)) throw ConfigError("super-block size must be a power of two");
}

std::optional<std::pair<PosmapKey, Block>> Plb::insert(unsigned level, std::uint64_t index, Block block) {
  return cache_.insert({level, index}, std::move(block));
}

RecursiveOram::RecursiveOram(const OramConfig& tree_cfg, const RecursionConfig& rc)
    : cfg_(tree_cfg),
      rc_(rc),
      plb_(rc.depth >= 1 ? rc.plb_capacity : 0),
      prefetch_(rc.superblock_size > 1 ? 4 * rc.superblock_size : 0),
      rng_(tree_cfg.seed) {
  cfg_.validate();
  rc_.validate();

  units_.push_back(ceil_div(cfg_.blocks(), rc_.superblock_size));
  for (unsigned i = 1; i <= rc_.depth; ++i) units_.push_back(ceil_div(units_.back(), rc_.entries_per_block));

  offset_.assign(rc_.depth + 1, 0);
  std::uint64_t next = cfg_.blocks();
  for (unsigned i = 1; i <= rc_.depth; ++i) {
    offset_[i] = next;
    next += units_[i];
  }

  const std::size_t trees = rc_.unified ? 1 : rc_.depth + 1;
  for (std::size_t t = 0; t < trees; ++t) trees_.emplace_back(cfg_.levels, cfg_.bucket_size);

  created_.resize(rc_.depth + 1);
  created_[0].assign(cfg_.blocks(), false);
  for (unsigned i = 1; i <= rc_.depth; ++i) created_[i].assign(units_[i], false);

  const std::uint64_t top = units_[rc_.depth];
  onchip_.resize(top);
  for (auto& leaf : onchip_) leaf = draw_leaf(tree_of(rc_.depth));

  rcounters_.tree_accesses.assign(rc_.depth + 1, 0);
}

BlockAddr RecursiveOram::tree_addr(unsigned level, std::uint64_t index) const noexcept {
  if (level == 0) return index;
  return rc_.unified ? offset_[level] + index : index;
}

Leaf RecursiveOram::draw_leaf(std::size_t tree) {
  return static_cast<Leaf>(uniform_below(rng_, trees_[tree].leaf_count()));
}

std::size_t RecursiveOram::stash_size() const noexcept {
  std::size_t total = 0;
  for (const auto& t : trees_) total += t.stash_size();
  return total;
}

void RecursiveOram::note_stash(std::size_t tree, bool& overflow) {
  const std::size_t total = stash_size();
  if (total > counters_.stash_peak) counters_.stash_peak = total;
  if (cfg_.stash_capacity && trees_[tree].stash_size() > *cfg_.stash_capacity) {
    ++counters_.overflow_events;
    overflow = true;
  }
}

ObservedTrace RecursiveOram::evict_once(std::size_t tree) {
  ObservedTrace out;
  const Leaf leaf = draw_leaf(tree);
  emit(out, leaf, AccessKind::Dummy);
  trees_[tree].read_path(leaf);
  trees_[tree].write_path(leaf);
  ++counters_.dummy_accesses;
  bool ignored = false;
  note_stash(tree, ignored);
  return out;
}

ObservedTrace RecursiveOram::maybe_evict(std::size_t tree) {
  ObservedTrace out;
  if (cfg_.eviction != EvictionKind::Background) return out;
  const std::size_t threshold = cfg_.threshold();
  int futile = 0;
  while (trees_[tree].stash_size() >= threshold) {
    if (++futile > kMaxFutileEvictions)
      throw LivelockError("stash of tree " + std::to_string(tree) + " stuck at " +
                          std::to_string(trees_[tree].stash_size()) + " blocks after " +
                          std::to_string(kMaxFutileEvictions) + " background evictions");
    auto one = evict_once(tree);
    out.insert(out.end(), one.begin(), one.end());
  }
  return out;
}

ObservedTrace RecursiveOram::background_evict() { return evict_once(tree_of(0)); }

Block RecursiveOram::fresh_posmap_block(unsigned level, std::uint64_t index, Leaf leaf) {
  Block b{tree_addr(level, index), leaf, {}};
  const std::size_t child_tree = tree_of(level - 1);
  for (unsigned s = 0; s < rc_.entries_per_block; ++s) b.data.set_word(s, draw_leaf(child_tree));
  created_[level][index] = true;
  return b;
}

AccessOutcome RecursiveOram::access(Op op, BlockAddr addr, const Payload& data) {
  if (op == Op::Halt) throw std::invalid_argument("halt is not a memory access");
  if (addr >= cfg_.blocks())
    throw RangeError("address " + std::to_string(addr) + " outside ORAM of " + std::to_string(cfg_.blocks()) +
                     " blocks");
  return serve(op, addr, data);
}

AccessOutcome RecursiveOram::serve(Op op, BlockAddr addr, const Payload& data) {
  AccessOutcome out;
  const std::uint64_t sb = rc_.superblock_size;
  const unsigned depth = rc_.depth;
  const std::uint64_t k = rc_.entries_per_block;

  // Reads of prefetched blocks never reach the ORAM. Writes always do, and
  // refresh the buffered copy, so buffer and tree never disagree.
  if (sb > 1 && op == Op::Read) {
    ++rcounters_.prefetch_lookups;
    if (const Payload* p = prefetch_.lookup(addr)) {
      ++rcounters_.prefetch_hits;
      out.payload = *p;
      return out;
    }
  }

  std::vector<std::uint64_t> unit(depth + 1);
  unit[0] = addr / sb;
  for (unsigned i = 1; i <= depth; ++i) unit[i] = unit[i - 1] / k;

  // Lowest recursion level whose position-map block is on chip.
  unsigned start = depth + 1;
  Block* source = nullptr;
  if (plb_.capacity() > 0) {
    for (unsigned i = 1; i <= depth; ++i) {
      ++rcounters_.plb_lookups;
      if (Block* b = plb_.lookup(i, unit[i])) {
        ++rcounters_.plb_hits;
        start = i;
        source = b;
        break;
      }
    }
  }
  if (start <= depth) rcounters_.posmap_accesses_saved += depth + 1 - start;

  unsigned level = start - 1;
  auto evictions = maybe_evict(tree_of(level));
  out.emitted.insert(out.emitted.end(), evictions.begin(), evictions.end());

  Leaf old_leaf;
  Leaf new_leaf = draw_leaf(tree_of(level));
  if (source) {
    const auto slot = static_cast<std::size_t>(unit[level] % k);
    old_leaf = static_cast<Leaf>(source->data.word(slot));
    source->data.set_word(slot, new_leaf);
  } else {
    old_leaf = onchip_[unit[depth]];
    onchip_[unit[depth]] = new_leaf;
  }

  for (; level >= 1; --level) {
    const std::size_t t = tree_of(level);
    emit(out.emitted, old_leaf, AccessKind::Real);
    ++rcounters_.tree_accesses[level];
    trees_[t].read_path(old_leaf);

    const BlockAddr a = tree_addr(level, unit[level]);
    Block* b = trees_[t].stash_find(a);
    if (!b) {
      trees_[t].stash_insert(fresh_posmap_block(level, unit[level], new_leaf));
      b = trees_[t].stash_find(a);
    }
    b->leaf = new_leaf;
    const auto slot = static_cast<std::size_t>(unit[level - 1] % k);
    const Leaf child_old = static_cast<Leaf>(b->data.word(slot));
    const Leaf child_new = draw_leaf(tree_of(level - 1));
    b->data.set_word(slot, child_new);

    if (plb_.capacity() > 0) {
      auto victim = plb_.insert(level, unit[level], *trees_[t].stash_remove(a));
      if (victim) trees_[tree_of(victim->first.level)].stash_insert(std::move(victim->second));
    }
    trees_[t].write_path(old_leaf);
    note_stash(t, out.overflow);

    old_leaf = child_old;
    new_leaf = child_new;
    evictions = maybe_evict(tree_of(level - 1));
    out.emitted.insert(out.emitted.end(), evictions.begin(), evictions.end());
  }

  // Data level.
  const std::size_t t = tree_of(0);
  emit(out.emitted, old_leaf, AccessKind::Real);
  ++rcounters_.tree_accesses[0];
  trees_[t].read_path(old_leaf);

  const BlockAddr first = unit[0] * sb;
  const BlockAddr last = std::min<BlockAddr>(first + sb, cfg_.blocks());
  for (BlockAddr m = first; m < last; ++m)
    if (Block* g = trees_[t].stash_find(m)) g->leaf = new_leaf;

  Block* b = trees_[t].stash_find(addr);
  if (!b) {
    trees_[t].stash_insert({addr, new_leaf, {}});
    b = trees_[t].stash_find(addr);
    created_[0][addr] = true;
  }
  out.payload = b->data;
  if (op == Op::Write) b->data = data;

  if (sb > 1) {
    for (BlockAddr m = first; m < last; ++m) {
      const Block* g = trees_[t].stash_find(m);
      prefetch_.insert(m, g ? g->data : Payload{});
    }
  }
  trees_[t].write_path(old_leaf);
  ++counters_.real_accesses;
  note_stash(t, out.overflow);
  return out;
}

bool RecursiveOram::check_consistency() const {
  // (tree, addr) -> block, with duplicate detection.
  struct Where {
    const Block* block;
    int count;
  };
  std::vector<std::unordered_map<BlockAddr, Where>> found(trees_.size());
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const OramTree& tree = trees_[t];
    for (std::size_t node = 0; node < tree.bucket_count(); ++node) {
      const auto bucket = tree.bucket(node);
      if (bucket.size() > tree.bucket_size()) return false;
      for (const Block& b : bucket) {
        if (!tree.on_path(node, b.leaf)) return false;
        auto& w = found[t][b.addr];
        w.block = &b;
        ++w.count;
      }
    }
    for (const auto& e : tree.stash_entries()) {
      const Block* b = tree.stash_find(e.block.addr);
      auto& w = found[t][b->addr];
      w.block = b;
      ++w.count;
    }
  }

  std::size_t expected_blocks = 0;
  auto lookup = [&](unsigned level, std::uint64_t index) -> const Block* {
    if (level >= 1) {
      if (const Block* p = plb_.peek(level, index)) return p;
    }
    const auto& m = found[tree_of(level)];
    const auto it = m.find(tree_addr(level, index));
    if (it == m.end() || it->second.count != 1) return nullptr;
    return it->second.block;
  };
  auto label_of = [&](unsigned level, std::uint64_t index, Leaf& out) {
    if (level == rc_.depth) {
      out = onchip_[index];
      return true;
    }
    const Block* parent = lookup(level + 1, index / rc_.entries_per_block);
    if (!parent) return false;
    out = static_cast<Leaf>(parent->data.word(static_cast<std::size_t>(index % rc_.entries_per_block)));
    return true;
  };

  for (unsigned level = rc_.depth; level >= 1; --level) {
    for (std::uint64_t j = 0; j < units_[level]; ++j) {
      if (!created_[level][j]) continue;
      const Block* b = lookup(level, j);
      Leaf expect;
      if (!b || !label_of(level, j, expect) || b->leaf != expect) return false;
      if (!plb_.peek(level, j)) ++expected_blocks;
    }
  }
  for (BlockAddr a = 0; a < cfg_.blocks(); ++a) {
    if (!created_[0][a]) continue;
    const Block* b = lookup(0, a);
    Leaf expect;
    if (!b || !label_of(0, a / rc_.superblock_size, expect) || b->leaf != expect) return false;
    ++expected_blocks;
  }

  std::size_t total = 0;
  for (const auto& m : found) total += m.size();
  return total == expected_blocks;
}

}  // namespace oramlab
