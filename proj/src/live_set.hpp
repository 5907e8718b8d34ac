#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace pairheap::detail {

// Set of ids with O(1) add/remove and O(1) uniform indexing (swap-remove).
class LiveSet {
 public:
  void add(std::uint64_t id) {
    index_[id] = items_.size();
    items_.push_back(id);
  }
  void remove(std::uint64_t id) {
    auto it = index_.find(id);
    std::size_t i = it->second;
    std::uint64_t back = items_.back();
    items_[i] = back;
    index_[back] = i;
    items_.pop_back();
    index_.erase(it);
  }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  std::uint64_t at(std::size_t i) const { return items_[i]; }

 private:
  std::vector<std::uint64_t> items_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

}  // namespace pairheap::detail
