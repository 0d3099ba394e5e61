#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace mdl {

inline std::size_t hash_mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xbf58476d1ce4e5b9ULL;
  return h ^ (h >> 31);
}

/// Weak hash-consing table. Nodes unregister themselves on destruction.
///
/// Node must derive from enable_shared_from_this and expose `hash_`,
/// `registered_` and `same_shape(const Node&)`.
template <class Node>
class InternTable {
 public:
  static InternTable& instance() {
    static auto* table = new InternTable;
    return *table;
  }

  std::shared_ptr<const Node> intern(Node&& proto) {
    Shard& shard = shards_[proto.hash_ % kShards];
    std::lock_guard lock(shard.mu);
    auto [lo, hi] = shard.nodes.equal_range(proto.hash_);
    for (auto it = lo; it != hi; ++it) {
      const Node* cand = it->second;
      if (!cand->same_shape(proto)) continue;
      if (auto alive = cand->weak_from_this().lock()) return alive;
    }
    std::shared_ptr<Node> fresh(new Node(std::move(proto)));
    fresh->registered_ = true;
    shard.nodes.emplace(fresh->hash_, fresh.get());
    return fresh;
  }

  void erase(const Node* node) {
    Shard& shard = shards_[node->hash_ % kShards];
    std::lock_guard lock(shard.mu);
    auto [lo, hi] = shard.nodes.equal_range(node->hash_);
    for (auto it = lo; it != hi; ++it) {
      if (it->second == node) {
        shard.nodes.erase(it);
        return;
      }
    }
  }

 private:
  static constexpr std::size_t kShards = 32;
  struct Shard {
    std::mutex mu;
    std::unordered_multimap<std::size_t, const Node*> nodes;
  };
  std::array<Shard, kShards> shards_;
};

}  // namespace mdl
