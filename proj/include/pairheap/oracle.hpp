#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pairheap/replay.hpp"
#include "pairheap/trace.hpp"

namespace pairheap {

// Brute-force reference priority queue: one ordered multiset of (key, node)
// per heap, speaking trace ids natively. Mirrors the replayer's precondition
// checks in the same order so error outcomes line up. No pairing mechanics
// live here; on a tied minimum it only insists the key matches and, when
// asked, removes the handle the forest chose.
class OracleForest {
 public:
  ApplyOutcome apply(const Operation& op) { return apply(op, std::nullopt); }

  // preferred: the handle the co-replayed forest returned for this
  // find_min/extract_min. It is reported (and removed, for extract_min) when
  // it carries the minimum key; otherwise the oracle answers with its own
  // minimum and the caller sees the mismatch. With several key-tied minima
  // the forest's pairing history decides the handle, so the oracle only
  // insists on the key.
  ApplyOutcome apply(const Operation& op,
                     std::optional<std::uint64_t> preferred);

  bool heap_live(std::uint64_t h) const { return heaps_.count(h) != 0; }
  std::uint64_t heap_size(std::uint64_t h) const;
  // Sorted (key, node) pairs, for content comparisons in tests.
  std::vector<std::pair<double, std::uint64_t>> heap_contents(
      std::uint64_t h) const;

 private:
  using Item = std::pair<double, std::uint64_t>;  // (key, trace node id)
  struct HeapRec {
    std::multiset<Item> items;
  };

  HeapRec& live_heap(std::uint64_t h);

  std::map<std::uint64_t, HeapRec> heaps_;
  std::unordered_set<std::uint64_t> ever_heaps_, ever_nodes_;
  std::unordered_map<std::uint64_t, double> node_key_;         // live nodes
  std::unordered_map<std::uint64_t, std::uint64_t> node_home_; // node -> heap
};

struct DiffReport {
  bool equivalent = true;
  std::size_t first_divergence = 0;
  std::string detail;
};

// Co-replays the trace on a Forest and on the oracle, comparing returned
// (handle, key) pairs and error outcomes op by op.
DiffReport diff_run(const Trace& trace);

}  // namespace pairheap
