#include "pairheap/replay.hpp"

namespace pairheap {

HeapId ForestReplayer::forest_heap(std::uint64_t trace_heap) const {
  auto it = heap_fwd_.find(trace_heap);
  return it == heap_fwd_.end() ? 0 : it->second;
}

NodeId ForestReplayer::forest_node(std::uint64_t trace_node) const {
  auto it = node_fwd_.find(trace_node);
  return it == node_fwd_.end() ? 0 : it->second;
}

std::uint64_t ForestReplayer::trace_heap(HeapId h) const {
  auto it = heap_rev_.find(h);
  return it == heap_rev_.end() ? 0 : it->second;
}

std::uint64_t ForestReplayer::trace_node(NodeId p) const {
  auto it = node_rev_.find(p);
  return it == node_rev_.end() ? 0 : it->second;
}

HeapId ForestReplayer::lookup_heap(std::uint64_t trace_heap) const {
  auto it = heap_fwd_.find(trace_heap);
  if (it == heap_fwd_.end() || !forest_.heap_live(it->second))
    throw ForestError(Errc::invalid_heap, "stale or unknown heap id " +
                                              std::to_string(trace_heap));
  return it->second;
}

NodeId ForestReplayer::lookup_node(std::uint64_t trace_node) const {
  auto it = node_fwd_.find(trace_node);
  if (it == node_fwd_.end() || !forest_.node_live(it->second))
    throw ForestError(Errc::invalid_node, "stale or unknown node handle " +
                                              std::to_string(trace_node));
  return it->second;
}

ApplyOutcome ForestReplayer::apply(const Operation& op) {
  ApplyOutcome out;
  try {
    switch (op.kind) {
      case OpKind::make_heap: {
        if (heap_fwd_.count(op.heap_out))
          throw ForestError(Errc::invalid_heap, "heap id " +
                                                    std::to_string(op.heap_out) +
                                                    " reused");
        HeapId h = forest_.make_heap();
        heap_fwd_[op.heap_out] = h;
        heap_rev_[h] = op.heap_out;
        break;
      }
      case OpKind::insert: {
        HeapId h = lookup_heap(op.heap);
        if (node_fwd_.count(op.node_out))
          throw ForestError(Errc::invalid_node, "node handle " +
                                                    std::to_string(op.node_out) +
                                                    " reused");
        NodeId v = forest_.insert(h, op.key);
        node_fwd_[op.node_out] = v;
        node_rev_[v] = op.node_out;
        break;
      }
      case OpKind::meld: {
        if (op.heap == op.heap2)
          throw ForestError(Errc::aliased_meld,
                            "meld aliases heap " + std::to_string(op.heap));
        HeapId h1 = lookup_heap(op.heap);
        HeapId h2 = lookup_heap(op.heap2);
        if (heap_fwd_.count(op.heap_out))
          throw ForestError(Errc::invalid_heap, "heap id " +
                                                    std::to_string(op.heap_out) +
                                                    " reused");
        HeapId h = forest_.meld(h1, h2);
        heap_fwd_[op.heap_out] = h;
        heap_rev_[h] = op.heap_out;
        break;
      }
      case OpKind::find_min: {
        auto [p, key] = forest_.find_min(lookup_heap(op.heap));
        out.has_value = true;
        out.node = node_rev_.at(p);
        out.key = key;
        break;
      }
      case OpKind::extract_min: {
        auto [p, key] = forest_.extract_min(lookup_heap(op.heap));
        out.has_value = true;
        out.node = node_rev_.at(p);
        out.key = key;
        break;
      }
      case OpKind::decrease_key:
        forest_.decrease_key(lookup_heap(op.heap), lookup_node(op.node),
                             op.delta);
        break;
      case OpKind::erase:
        forest_.erase(lookup_heap(op.heap), lookup_node(op.node));
        break;
    }
  } catch (const ForestError& e) {
    out.ok = false;
    out.error = e.code();
  }
  return out;
}

std::vector<Violation> validate_trace(const Trace& trace) {
  std::vector<Violation> out;
  ForestReplayer rep;
  for (std::size_t i = 0; i < trace.ops.size(); ++i) {
    ApplyOutcome o = rep.apply(trace.ops[i]);
    if (!o.ok) {
      const Operation& op = trace.ops[i];
      std::string msg = to_string(o.error);
      switch (o.error) {
        case Errc::invalid_heap:
          msg = "stale or unknown heap id " +
                std::to_string(op.kind == OpKind::make_heap ? op.heap_out
                                                            : op.heap);
          break;
        case Errc::aliased_meld:
          msg = "meld aliases heap " + std::to_string(op.heap);
          break;
        case Errc::empty_heap:
          msg = "empty heap " + std::to_string(op.heap);
          break;
        case Errc::invalid_node:
          msg = "stale or unknown node handle " +
                std::to_string(op.kind == OpKind::insert ? op.node_out
                                                         : op.node);
          break;
        case Errc::wrong_heap:
          msg = "node " + std::to_string(op.node) + " not in heap " +
                std::to_string(op.heap);
          break;
        case Errc::negative_delta:
          msg = "negative delta";
          break;
        case Errc::nonfinite_key:
          msg = "non-finite key";
          break;
      }
      out.push_back(Violation{i, msg});
    }
  }
  return out;
}

}  // namespace pairheap
