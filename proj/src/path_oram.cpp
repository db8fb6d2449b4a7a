#include "oramlab/path_oram.hpp"

#include <sstream>

namespace oramlab {

void OramConfig::validate() const {
  if (levels > 30) throw ConfigError("levels must be at most 30");
  if (bucket_size == 0) throw ConfigError("bucket size Z must be positive");
  if (stash_capacity && *stash_capacity == 0) throw ConfigError("stash capacity must be positive");
  if (blocks() > (std::uint64_t{1} << 32)) throw ConfigError("address space above 2^32 blocks is not supported");
  if (eviction == EvictionKind::Background) (void)threshold();
}

std::size_t OramConfig::threshold() const {
  if (eviction_threshold) {
    if (*eviction_threshold == 0) throw ConfigError("eviction threshold must be positive");
    if (stash_capacity && *eviction_threshold > *stash_capacity)
      throw ConfigError("eviction threshold exceeds stash capacity");
    return *eviction_threshold;
  }
  if (!stash_capacity) throw ConfigError("background eviction needs a stash capacity or an explicit threshold");
  const std::size_t path = static_cast<std::size_t>(bucket_size) * (levels + 1);
  if (*stash_capacity <= path)
    throw ConfigError("stash capacity must exceed Z*(L+1) = " + std::to_string(path) + " for the default threshold");
  return *stash_capacity - path;
}

PathOram::PathOram(const OramConfig& cfg)
    : cfg_(cfg), tree_((cfg.validate(), cfg.levels), cfg.bucket_size), rng_(cfg.seed) {
  const std::uint64_t leaves = tree_.leaf_count();
  posmap_.resize(cfg_.blocks());
  for (auto& leaf : posmap_) leaf = static_cast<Leaf>(uniform_below(rng_, leaves));
  materialized_.assign(cfg_.blocks(), false);
}

void PathOram::emit(ObservedTrace& out, Leaf leaf, AccessKind kind) { out.push_back({tick_++, leaf, kind}); }

void PathOram::after_write_back(bool& overflow) {
  const std::size_t occupancy = tree_.stash_size();
  if (occupancy > counters_.stash_peak) counters_.stash_peak = occupancy;
  if (cfg_.stash_capacity && occupancy > *cfg_.stash_capacity) {
    ++counters_.overflow_events;
    overflow = true;
  }
}

AccessOutcome PathOram::access(Op op, BlockAddr addr, const Payload& data) {
  if (op == Op::Halt) throw std::invalid_argument("halt is not a memory access");
  if (addr >= cfg_.blocks())
    throw RangeError("address " + std::to_string(addr) + " outside ORAM of " + std::to_string(cfg_.blocks()) +
                     " blocks");

  AccessOutcome out;
  out.emitted = maybe_evict();

  const Leaf old_leaf = posmap_[addr];
  const Leaf new_leaf = static_cast<Leaf>(uniform_below(rng_, tree_.leaf_count()));
  posmap_[addr] = new_leaf;

  emit(out.emitted, old_leaf, AccessKind::Real);
  tree_.read_path(old_leaf);
  Block* block = tree_.stash_find(addr);
  if (!block) {
    tree_.stash_insert({addr, new_leaf, {}});
    block = tree_.stash_find(addr);
    materialized_[addr] = true;
  }
  block->leaf = new_leaf;
  out.payload = block->data;
  if (op == Op::Write) block->data = data;
  tree_.write_path(old_leaf);

  ++counters_.real_accesses;
  after_write_back(out.overflow);
  return out;
}

ObservedTrace PathOram::background_evict() {
  ObservedTrace out;
  const Leaf leaf = static_cast<Leaf>(uniform_below(rng_, tree_.leaf_count()));
  emit(out, leaf, AccessKind::Dummy);
  tree_.read_path(leaf);
  tree_.write_path(leaf);
  ++counters_.dummy_accesses;
  bool ignored = false;
  after_write_back(ignored);
  return out;
}

ObservedTrace PathOram::maybe_evict() {
  ObservedTrace out;
  if (cfg_.eviction != EvictionKind::Background) return out;
  const std::size_t threshold = cfg_.threshold();
  int futile = 0;
  while (tree_.stash_size() >= threshold) {
    if (++futile > kMaxFutileEvictions)
      throw LivelockError("stash stuck at " + std::to_string(tree_.stash_size()) + " blocks (threshold " +
                          std::to_string(threshold) + ") after " + std::to_string(kMaxFutileEvictions) +
                          " background evictions");
    auto one = background_evict();
    out.insert(out.end(), one.begin(), one.end());
  }
  return out;
}

bool PathOram::check_invariant() const {
  std::vector<std::uint8_t> seen(cfg_.blocks(), 0);
  auto visit = [&](const Block& b) {
    if (b.addr >= cfg_.blocks() || !materialized_[b.addr]) return false;
    if (seen[b.addr]++) return false;
    return b.leaf == posmap_[b.addr];
  };

  for (std::size_t node = 0; node < tree_.bucket_count(); ++node) {
    const auto bucket = tree_.bucket(node);
    if (bucket.size() > tree_.bucket_size()) return false;
    for (const Block& b : bucket) {
      if (!visit(b) || !tree_.on_path(node, b.leaf)) return false;
    }
  }
  for (const auto& e : tree_.stash_entries())
    if (!visit(e.block)) return false;
  for (std::uint64_t a = 0; a < cfg_.blocks(); ++a)
    if (materialized_[a] && seen[a] != 1) return false;
  return true;
}

std::string PathOram::dump_state() const {
  std::ostringstream os;
  os << "levels " << cfg_.levels << " bucket_size " << cfg_.bucket_size << " blocks " << cfg_.blocks() << '\n';
  os << "counters real " << counters_.real_accesses << " dummy " << counters_.dummy_accesses << " stash_peak "
     << counters_.stash_peak << " overflow " << counters_.overflow_events << '\n';
  os << "[posmap]\n";
  for (std::uint64_t a = 0; a < posmap_.size(); ++a)
    if (materialized_[a]) os << a << ' ' << posmap_[a] << '\n';
  os << "[stash] " << tree_.stash_size() << '\n';
  for (const auto& e : tree_.stash_entries())
    os << e.block.addr << ' ' << e.block.leaf << ' ' << e.inserted << '\n';
  os << "[buckets]\n";
  for (std::size_t node = 0; node < tree_.bucket_count(); ++node)
    if (!tree_.bucket(node).empty()) os << node << ' ' << tree_.bucket(node).size() << '\n';
  return os.str();
}

}  // namespace oramlab
