#include "pairheap/oracle.hpp"

#include <cmath>

namespace pairheap {

OracleForest::HeapRec& OracleForest::live_heap(std::uint64_t h) {
  auto it = heaps_.find(h);
  if (it == heaps_.end())
    throw ForestError(Errc::invalid_heap,
                      "stale or unknown heap id " + std::to_string(h));
  return it->second;
}

std::uint64_t OracleForest::heap_size(std::uint64_t h) const {
  return const_cast<OracleForest*>(this)->live_heap(h).items.size();
}

std::vector<std::pair<double, std::uint64_t>> OracleForest::heap_contents(
    std::uint64_t h) const {
  auto& rec = const_cast<OracleForest*>(this)->live_heap(h);
  return {rec.items.begin(), rec.items.end()};
}

ApplyOutcome OracleForest::apply(const Operation& op,
                                 std::optional<std::uint64_t> preferred) {
  ApplyOutcome out;
  try {
    switch (op.kind) {
      case OpKind::make_heap: {
        if (!ever_heaps_.insert(op.heap_out).second)
          throw ForestError(Errc::invalid_heap, "heap id reused");
        heaps_.emplace(op.heap_out, HeapRec{});
        break;
      }
      case OpKind::insert: {
        HeapRec& rec = live_heap(op.heap);
        if (ever_nodes_.count(op.node_out))
          throw ForestError(Errc::invalid_node, "node handle reused");
        if (!std::isfinite(op.key))
          throw ForestError(Errc::nonfinite_key, "key must be finite");
        ever_nodes_.insert(op.node_out);
        rec.items.emplace(op.key, op.node_out);
        node_key_[op.node_out] = op.key;
        node_home_[op.node_out] = op.heap;
        break;
      }
      case OpKind::meld: {
        if (op.heap == op.heap2)
          throw ForestError(Errc::aliased_meld, "meld arguments alias");
        HeapRec& r1 = live_heap(op.heap);
        HeapRec& r2 = live_heap(op.heap2);
        if (!ever_heaps_.insert(op.heap_out).second)
          throw ForestError(Errc::invalid_heap, "heap id reused");
        HeapRec merged;
        // Move the smaller side into the larger one.
        HeapRec& big = r1.items.size() >= r2.items.size() ? r1 : r2;
        HeapRec& small = r1.items.size() >= r2.items.size() ? r2 : r1;
        merged.items = std::move(big.items);
        for (const Item& it : small.items) merged.items.insert(it);
        for (const Item& it : merged.items) node_home_[it.second] = op.heap_out;
        heaps_.erase(op.heap);
        heaps_.erase(op.heap2);
        heaps_.emplace(op.heap_out, std::move(merged));
        break;
      }
      case OpKind::find_min: {
        HeapRec& rec = live_heap(op.heap);
        if (rec.items.empty())
          throw ForestError(Errc::empty_heap, "find_min on empty heap");
        auto best = rec.items.begin();
        if (preferred) {
          auto it = rec.items.find(Item{best->first, *preferred});
          if (it != rec.items.end()) best = it;
        }
        out.has_value = true;
        out.key = best->first;
        out.node = best->second;
        break;
      }
      case OpKind::extract_min: {
        HeapRec& rec = live_heap(op.heap);
        if (rec.items.empty())
          throw ForestError(Errc::empty_heap, "extract_min on empty heap");
        auto victim = rec.items.begin();
        if (preferred) {
          auto it = rec.items.find(Item{victim->first, *preferred});
          if (it != rec.items.end()) victim = it;
        }
        out.has_value = true;
        out.key = victim->first;
        out.node = victim->second;
        node_key_.erase(victim->second);
        node_home_.erase(victim->second);
        rec.items.erase(victim);
        break;
      }
      case OpKind::decrease_key: {
        HeapRec& rec = live_heap(op.heap);
        auto key_it = node_key_.find(op.node);
        if (key_it == node_key_.end())
          throw ForestError(Errc::invalid_node, "stale or unknown node");
        if (node_home_.at(op.node) != op.heap)
          throw ForestError(Errc::wrong_heap, "node not in heap");
        if (!(op.delta >= 0.0) || !std::isfinite(op.delta))
          throw ForestError(Errc::negative_delta,
                            "delta must be finite and nonnegative");
        double new_key = key_it->second - op.delta;
        if (!std::isfinite(new_key))
          throw ForestError(Errc::nonfinite_key, "key would become non-finite");
        rec.items.erase(rec.items.find(Item{key_it->second, op.node}));
        rec.items.emplace(new_key, op.node);
        key_it->second = new_key;
        break;
      }
      case OpKind::erase: {
        HeapRec& rec = live_heap(op.heap);
        auto key_it = node_key_.find(op.node);
        if (key_it == node_key_.end())
          throw ForestError(Errc::invalid_node, "stale or unknown node");
        if (node_home_.at(op.node) != op.heap)
          throw ForestError(Errc::wrong_heap, "node not in heap");
        rec.items.erase(rec.items.find(Item{key_it->second, op.node}));
        node_key_.erase(key_it);
        node_home_.erase(op.node);
        break;
      }
    }
  } catch (const ForestError& e) {
    out.ok = false;
    out.error = e.code();
  }
  return out;
}

DiffReport diff_run(const Trace& trace) {
  DiffReport report;
  ForestReplayer rep;
  OracleForest oracle;
  for (std::size_t i = 0; i < trace.ops.size(); ++i) {
    const Operation& op = trace.ops[i];
    ApplyOutcome fo = rep.apply(op);
    std::optional<std::uint64_t> preferred;
    if ((op.kind == OpKind::extract_min || op.kind == OpKind::find_min) &&
        fo.ok)
      preferred = fo.node;
    ApplyOutcome oo = oracle.apply(op, preferred);

    auto diverge = [&](const std::string& detail) {
      report.equivalent = false;
      report.first_divergence = i;
      report.detail = "op " + std::to_string(i) + " (" + to_string(op.kind) +
                      "): " + detail;
    };
    if (fo.ok != oo.ok) {
      diverge(fo.ok ? "forest succeeded, oracle errored: " +
                          std::string(to_string(oo.error))
                    : "forest errored (" + std::string(to_string(fo.error)) +
                          "), oracle succeeded");
      return report;
    }
    if (!fo.ok) {
      if (fo.error != oo.error) {
        diverge(std::string("error kinds differ: forest ") +
                to_string(fo.error) + " vs oracle " + to_string(oo.error));
        return report;
      }
      continue;
    }
    if (fo.has_value) {
      if (fo.key != oo.key) {
        diverge("keys differ: forest " + format_double(fo.key) + " vs oracle " +
                format_double(oo.key));
        return report;
      }
      if (fo.node != oo.node) {
        diverge("handles differ: forest " + std::to_string(fo.node) +
                " vs oracle " + std::to_string(oo.node));
        return report;
      }
    }
  }
  return report;
}

}  // namespace pairheap
