#pragma once

#include <cstddef>
#include <list>
#include <optional>
#include <unordered_map>
#include <utility>

namespace oramlab {

/// Fully associative LRU map with a fixed entry budget. Capacity 0 holds nothing.
template <class Key, class Value, class Hash = std::hash<Key>>
class LruCache {
 public:
  using Entry = std::pair<Key, Value>;

  explicit LruCache(std::size_t capacity = 0) : capacity_(capacity) {}

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return order_.size(); }
  bool contains(const Key& k) const { return index_.count(k) != 0; }

  /// Hit promotes the entry to most-recently used.
  Value* lookup(const Key& k) {
    auto it = index_.find(k);
    if (it == index_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second);
    return &it->second->second;
  }

  /// Read without touching recency.
  const Value* peek(const Key& k) const {
    auto it = index_.find(k);
    return it == index_.end() ? nullptr : &it->second->second;
  }

  /// Inserts or overwrites as most-recent; returns the evicted LRU entry, if any.
  /// With capacity 0 the inserted entry itself comes straight back.
  std::optional<Entry> insert(const Key& k, Value v) {
    if (capacity_ == 0) return Entry{k, std::move(v)};
    if (auto it = index_.find(k); it != index_.end()) {
      it->second->second = std::move(v);
      order_.splice(order_.begin(), order_, it->second);
      return std::nullopt;
    }
    order_.emplace_front(k, std::move(v));
    index_[k] = order_.begin();
    if (order_.size() <= capacity_) return std::nullopt;
    Entry victim = std::move(order_.back());
    index_.erase(victim.first);
    order_.pop_back();
    return victim;
  }

  std::optional<Value> erase(const Key& k) {
    auto it = index_.find(k);
    if (it == index_.end()) return std::nullopt;
    Value v = std::move(it->second->second);
    order_.erase(it->second);
    index_.erase(it);
    return v;
  }

  /// Most-recent first.
  const std::list<Entry>& entries() const noexcept { return order_; }

 private:
  std::size_t capacity_;
  std::list<Entry> order_;
  std::unordered_map<Key, typename std::list<Entry>::iterator, Hash> index_;
};

}  // namespace oramlab
