#include "oramlab/oram_tree.hpp"

#include <algorithm>
#include <bit>

namespace oramlab {

OramTree::OramTree(unsigned levels, unsigned bucket_size) : levels_(levels), z_(bucket_size) {
  if (levels > 30) throw ConfigError("tree height above 30 levels is not supported");
  if (bucket_size == 0 || bucket_size > 0xFFFF) throw ConfigError("bucket size must be in [1, 65535]");
  const std::size_t buckets = (std::size_t{2} << levels) - 1;
  slots_.resize(buckets * z_);
  fill_.assign(buckets, 0);
}

unsigned OramTree::node_level(std::size_t node) noexcept {
  return static_cast<unsigned>(std::bit_width(node + 1) - 1);
}

bool OramTree::on_path(std::size_t node, Leaf leaf) const noexcept {
  const unsigned level = node_level(node);
  return level <= levels_ && node_on_path(leaf, level) == node;
}

void OramTree::read_path(Leaf leaf) {
  for (unsigned level = 0; level <= levels_; ++level) {
    const std::size_t node = node_on_path(leaf, level);
    Block* first = slots_.data() + node * z_;
    for (std::size_t i = 0; i < fill_[node]; ++i) stash_insert(std::move(first[i]));
    std::fill(first, first + fill_[node], Block{});
    fill_[node] = 0;
  }
}

std::size_t OramTree::write_path(Leaf leaf) {
  const unsigned L = levels_;
  // At most Z*(d+1) blocks whose deepest legal level is d can be placed, so
  // each group only needs its earliest Z*(L+1) members.
  const std::size_t keep = static_cast<std::size_t>(z_) * (L + 1);
  using Item = std::pair<std::uint64_t, std::size_t>;  // (inserted, stash index)
  std::vector<std::vector<Item>> groups(L + 1);

  for (std::size_t i = 0; i < stash_.size(); ++i) {
    const Leaf x = stash_[i].block.leaf ^ leaf;
    const unsigned deepest = x == 0 ? L : L - static_cast<unsigned>(std::bit_width(x));
    auto& g = groups[deepest];
    const Item item{stash_[i].inserted, i};
    if (g.size() < keep) {
      g.push_back(item);
      std::push_heap(g.begin(), g.end());
    } else if (item < g.front()) {
      std::pop_heap(g.begin(), g.end());
      g.back() = item;
      std::push_heap(g.begin(), g.end());
    }
  }

  std::vector<Item> pending;
  std::vector<Item> merged;
  std::vector<std::size_t> placed;
  for (unsigned level = L + 1; level-- > 0;) {
    auto& g = groups[level];
    std::sort(g.begin(), g.end());
    merged.clear();
    std::merge(pending.begin(), pending.end(), g.begin(), g.end(), std::back_inserter(merged));

    const std::size_t node = node_on_path(leaf, level);
    std::size_t taken = 0;
    while (taken < merged.size() && fill_[node] < z_) {
      const std::size_t idx = merged[taken].second;
      slots_[node * z_ + fill_[node]] = stash_[idx].block;
      ++fill_[node];
      placed.push_back(idx);
      ++taken;
    }
    pending.assign(merged.begin() + static_cast<std::ptrdiff_t>(taken), merged.end());
  }

  std::sort(placed.begin(), placed.end(), std::greater<>());
  for (const std::size_t idx : placed) stash_erase_at(idx);
  return placed.size();
}

Block* OramTree::stash_find(BlockAddr addr) {
  const auto it = stash_index_.find(addr);
  return it == stash_index_.end() ? nullptr : &stash_[it->second].block;
}

const Block* OramTree::stash_find(BlockAddr addr) const {
  const auto it = stash_index_.find(addr);
  return it == stash_index_.end() ? nullptr : &stash_[it->second].block;
}

void OramTree::stash_insert(Block block) {
  if (block.leaf >= leaf_count()) throw ContractViolation("block leaf outside tree");
  const auto [it, fresh] = stash_index_.emplace(block.addr, stash_.size());
  if (!fresh) throw ContractViolation("block " + std::to_string(block.addr) + " already in stash");
  stash_.push_back({std::move(block), next_seq_++});
}

std::optional<Block> OramTree::stash_remove(BlockAddr addr) {
  const auto it = stash_index_.find(addr);
  if (it == stash_index_.end()) return std::nullopt;
  Block out = std::move(stash_[it->second].block);
  stash_erase_at(it->second);
  return out;
}

void OramTree::stash_erase_at(std::size_t index) {
  stash_index_.erase(stash_[index].block.addr);
  const std::size_t last = stash_.size() - 1;
  if (index != last) {
    stash_[index] = std::move(stash_[last]);
    stash_index_[stash_[index].block.addr] = index;
  }
  stash_.pop_back();
}

std::vector<StashEntry> OramTree::stash_entries() const {
  std::vector<StashEntry> out(stash_.begin(), stash_.end());
  std::sort(out.begin(), out.end(), [](const StashEntry& a, const StashEntry& b) { return a.inserted < b.inserted; });
  return out;
}

bool OramTree::place(std::size_t node, Block block) {
  if (node >= fill_.size()) throw RangeError("bucket index out of range");
  if (fill_[node] >= z_) return false;
  slots_[node * z_ + fill_[node]] = std::move(block);
  ++fill_[node];
  return true;
}

std::optional<Block> OramTree::take(std::size_t node, BlockAddr addr) {
  if (node >= fill_.size()) throw RangeError("bucket index out of range");
  Block* first = slots_.data() + node * z_;
  for (std::size_t i = 0; i < fill_[node]; ++i) {
    if (first[i].addr != addr) continue;
    Block out = std::move(first[i]);
    first[i] = std::move(first[fill_[node] - 1]);
    first[fill_[node] - 1] = Block{};
    --fill_[node];
    return out;
  }
  return std::nullopt;
}

}  // namespace oramlab
