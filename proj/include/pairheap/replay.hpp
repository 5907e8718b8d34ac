#pragma once

#include <cstdint>
#include <unordered_map>

#include "pairheap/forest.hpp"
#include "pairheap/trace.hpp"

namespace pairheap {

// Outcome of applying one trace operation, reported in trace id space.
struct ApplyOutcome {
  bool ok = true;
  Errc error{};            // meaningful only when !ok
  bool has_value = false;  // find_min / extract_min
  std::uint64_t node = 0;  // trace node id of the returned element
  double key = 0.0;
};

// Drives a Forest from trace records, binding the trace's declared output
// ids to the forest's own handles. Errors never mutate the forest, so a
// failed op can simply be skipped.
//
// Precondition checks run in a fixed order mirrored by the oracle:
// meld aliasing, then heap ids, then node ids, then output-id freshness,
// then key/delta domain, then emptiness.
class ForestReplayer {
 public:
  ApplyOutcome apply(const Operation& op);

  Forest& forest() noexcept { return forest_; }
  const Forest& forest() const noexcept { return forest_; }

  // Id binding queries; 0 when unbound.
  HeapId forest_heap(std::uint64_t trace_heap) const;
  NodeId forest_node(std::uint64_t trace_node) const;
  std::uint64_t trace_heap(HeapId h) const;
  std::uint64_t trace_node(NodeId p) const;

 private:
  HeapId lookup_heap(std::uint64_t trace_heap) const;
  NodeId lookup_node(std::uint64_t trace_node) const;

  Forest forest_;
  std::unordered_map<std::uint64_t, HeapId> heap_fwd_;
  std::unordered_map<HeapId, std::uint64_t> heap_rev_;
  std::unordered_map<std::uint64_t, NodeId> node_fwd_;
  std::unordered_map<NodeId, std::uint64_t> node_rev_;
};

}  // namespace pairheap
