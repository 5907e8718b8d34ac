#include "doctest.h"

#include <algorithm>
#include <map>

#include "pairheap/rng.hpp"

#include "pairheap/generator.hpp"
#include "pairheap/oracle.hpp"

using namespace pairheap;

TEST_CASE("oracle mirrors basic operation semantics") {
  OracleForest o;
  SUBCASE("insert then extract the minimum") {
    o.apply(Operation::make_heap(1));
    o.apply(Operation::insert(1, 3, 1));
    o.apply(Operation::insert(1, 1, 2));
    o.apply(Operation::insert(1, 2, 3));
    ApplyOutcome out = o.apply(Operation::extract_min(1));
    REQUIRE(out.ok);
    CHECK(out.key == 1);
    CHECK(out.node == 2);
  }
  SUBCASE("decrease_key subtracts the delta") {
    o.apply(Operation::make_heap(1));
    o.apply(Operation::insert(1, 3, 1));
    o.apply(Operation::decrease_key(1, 1, 3));
    ApplyOutcome out = o.apply(Operation::extract_min(1));
    CHECK(out.key == 0);
  }
  SUBCASE("meld unions the contents") {
    o.apply(Operation::make_heap(1));
    o.apply(Operation::insert(1, 1, 1));
    o.apply(Operation::insert(1, 5, 2));
    o.apply(Operation::make_heap(2));
    o.apply(Operation::insert(2, 2, 3));
    o.apply(Operation::meld(1, 2, 3));
    CHECK(o.apply(Operation::extract_min(3)).key == 1);
    CHECK(o.apply(Operation::extract_min(3)).key == 2);
    CHECK(o.apply(Operation::extract_min(3)).key == 5);
    CHECK(!o.apply(Operation::extract_min(3)).ok);
  }
  SUBCASE("errors mirror the forest") {
    CHECK(o.apply(Operation::insert(9, 1, 1)).error == Errc::invalid_heap);
    o.apply(Operation::make_heap(1));
    CHECK(o.apply(Operation::find_min(1)).error == Errc::empty_heap);
    CHECK(o.apply(Operation::meld(1, 1, 2)).error == Errc::aliased_meld);
    o.apply(Operation::insert(1, 1, 1));
    CHECK(o.apply(Operation::decrease_key(1, 7, 1)).error ==
          Errc::invalid_node);
    CHECK(o.apply(Operation::decrease_key(1, 1, -1)).error ==
          Errc::negative_delta);
  }
}

TEST_CASE("diff_run equivalence") {
  SUBCASE("empty trace") { CHECK(diff_run(Trace{}).equivalent); }
  SUBCASE("random traces across survivor mixes") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      GeneratorConfig cfg;
      cfg.op_count = 1500;
      cfg.seed = seed;
      cfg.survivor_target = static_cast<double>(seed % 3) * 0.3;
      DiffReport report = diff_run(generate_random_trace(cfg));
      REQUIRE_MESSAGE(report.equivalent, report.detail);
    }
  }
  SUBCASE("duplicate keys exercise the tie policy") {
    // Build tie-heavy traces by co-executing against a forest, so every
    // decrease_key/delete target is live despite tie-dependent extractions.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SplitMix64 rng(seed * 7919);
      ForestReplayer rep;
      Trace t;
      t.ops.push_back(Operation::make_heap(1));
      rep.apply(t.ops.back());
      std::vector<std::uint64_t> live;
      std::uint64_t next_node = 1;
      for (int i = 0; i < 1200; ++i) {
        double r = rng.uniform01();
        Operation op;
        if (r < 0.45 || live.empty()) {
          op = Operation::insert(1, static_cast<double>(rng.bounded(6)),
                                 next_node);
          live.push_back(next_node++);
        } else if (r < 0.7) {
          op = Operation::extract_min(1);
        } else if (r < 0.9) {
          op = Operation::decrease_key(1, live[rng.bounded(live.size())],
                                       static_cast<double>(rng.bounded(3)));
        } else {
          op = Operation::find_min(1);
        }
        ApplyOutcome out = rep.apply(op);
        REQUIRE(out.ok);
        if (op.kind == OpKind::extract_min)
          live.erase(std::find(live.begin(), live.end(), out.node));
        t.ops.push_back(op);
      }
      REQUIRE(validate_trace(t).empty());
      DiffReport report = diff_run(t);
      REQUIRE_MESSAGE(report.equivalent, report.detail);
    }
  }
}

namespace {

// A deliberately wrong pairing heap: the comparison is inverted, so it keeps
// the maximum at the root. Used to confirm the differential harness detects
// a broken heap implementation.
class InvertedHeap {
 public:
  ApplyOutcome apply(const Operation& op) {
    ApplyOutcome out;
    switch (op.kind) {
      case OpKind::make_heap:
        heaps_[op.heap_out];
        break;
      case OpKind::insert:
        heaps_[op.heap].push_back({op.key, op.node_out});
        break;
      case OpKind::extract_min: {
        auto& items = heaps_[op.heap];
        std::size_t best = 0;
        for (std::size_t i = 1; i < items.size(); ++i)
          if (items[i].first > items[best].first) best = i;  // inverted!
        out.has_value = true;
        out.key = items[best].first;
        out.node = items[best].second;
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(best));
        break;
      }
      case OpKind::find_min: {
        auto& items = heaps_[op.heap];
        std::size_t best = 0;
        for (std::size_t i = 1; i < items.size(); ++i)
          if (items[i].first > items[best].first) best = i;
        out.has_value = true;
        out.key = items[best].first;
        out.node = items[best].second;
        break;
      }
      default:
        break;
    }
    return out;
  }

 private:
  std::map<std::uint64_t, std::vector<std::pair<double, std::uint64_t>>> heaps_;
};

}  // namespace

TEST_CASE("an inverted pairing comparison diverges at the first extract") {
  Trace t;
  t.ops.push_back(Operation::make_heap(1));
  t.ops.push_back(Operation::insert(1, 1, 1));
  t.ops.push_back(Operation::insert(1, 2, 2));
  t.ops.push_back(Operation::extract_min(1));

  InvertedHeap broken;
  OracleForest oracle;
  std::size_t divergence = t.ops.size();
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    ApplyOutcome bo = broken.apply(t.ops[i]);
    std::optional<std::uint64_t> preferred;
    if (t.ops[i].kind == OpKind::extract_min && bo.ok) preferred = bo.node;
    ApplyOutcome oo = oracle.apply(t.ops[i], preferred);
    if (bo.ok != oo.ok || bo.node != oo.node || bo.key != oo.key) {
      divergence = i;
      break;
    }
  }
  CHECK(divergence == 3);  // the extract_min with two distinct keys
}

TEST_CASE("oracle contents match the forest node sets step by step") {
  GeneratorConfig cfg;
  cfg.op_count = 600;
  cfg.seed = 77;
  Trace t = generate_random_trace(cfg);
  ForestReplayer rep;
  OracleForest oracle;
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    const Operation& op = t.ops[i];
    ApplyOutcome fo = rep.apply(op);
    std::optional<std::uint64_t> preferred;
    if (op.kind == OpKind::extract_min && fo.ok) preferred = fo.node;
    oracle.apply(op, preferred);
    if (i % 37 != 0) continue;
    // Compare the touched heap's multiset of (key, handle) pairs.
    std::uint64_t th = op.kind == OpKind::meld ? op.heap_out : op.heap;
    if (op.kind == OpKind::make_heap) th = op.heap_out;
    if (!oracle.heap_live(th)) continue;
    auto expected = oracle.heap_contents(th);
    HeapId fh = rep.forest_heap(th);
    REQUIRE(rep.forest().heap_size(fh) == expected.size());
    std::vector<std::pair<double, std::uint64_t>> actual;
    std::vector<NodeId> stack;
    if (rep.forest().root_of(fh)) stack.push_back(rep.forest().root_of(fh));
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      actual.push_back({rep.forest().key_of(x), rep.trace_node(x)});
      for (NodeId c = rep.forest().node(x).left_child; c;
           c = rep.forest().node(c).right_sib)
        stack.push_back(c);
    }
    std::sort(actual.begin(), actual.end());
    CHECK(actual == expected);
  }
}
