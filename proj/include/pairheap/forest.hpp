#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pairheap {

using NodeId = std::uint64_t;  // stable node handle, 1-based, never reused
using HeapId = std::uint64_t;  // heap identifier, 1-based, never reused

enum class OpKind : std::uint8_t {
  make_heap,
  insert,
  meld,
  find_min,
  extract_min,
  decrease_key,
  erase,  // the interface's "delete"
};

const char* to_string(OpKind kind);

enum class Errc : std::uint8_t {
  invalid_heap,    // unknown or stale heap id
  aliased_meld,    // meld(h, h)
  empty_heap,      // find_min / extract_min on an empty heap
  invalid_node,    // unknown or stale node handle
  wrong_heap,      // node is live but not in the named heap
  negative_delta,  // decrease_key with delta < 0 (or non-finite)
  nonfinite_key,   // key would become NaN or infinite
};

const char* to_string(Errc code);

class ForestError : public std::runtime_error {
 public:
  ForestError(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Where inside an operation a pairing happened. extract_min tags its two
// passes; every pairing inside a delete (including the two-pass combine of
// the victim's children) is tagged erase.
enum class PairContext : std::uint8_t {
  first,
  second,
  meld,
  insert,
  decrease_key,
  erase,
};

const char* to_string(PairContext context);

struct PairingEvent {
  NodeId left = 0;   // the node the pairing is performed on
  NodeId right = 0;  // its right neighbour
  NodeId winner = 0;
  NodeId loser = 0;
  PairContext context = PairContext::first;
  std::uint64_t op_index = 0;
};

struct CostRecord {
  OpKind kind{};
  std::uint64_t op_index = 0;
  std::uint64_t pairings = 0;
  std::uint64_t actual_cost = 0;      // always pairings + 1
  std::uint64_t heap_size_after = 0;  // size of the touched heap after the op
};

struct EventLog {
  std::vector<PairingEvent> pairings;
  std::vector<CostRecord> costs;
};

// A forest of pairing heaps. Heaps are min-ordered general trees stored in
// the leftmost-child / right-sibling binary form; the pairing primitive
// attaches the root with the larger key as the other root's leftmost child,
// and on a key tie the node the pairing is performed on (the left one) wins.
//
// Every operation appends one CostRecord and zero or more PairingEvents to
// an internal log that drain_events() hands out. A Forest instance is
// single-threaded; distinct instances are independent.
class Forest {
 public:
  struct Node {
    double key = 0.0;
    NodeId left_child = 0;
    NodeId right_sib = 0;
    // Binary-representation parent: the general-tree parent when this node
    // is a leftmost child, otherwise the immediate left sibling.
    NodeId up = 0;
    bool live = false;
  };

  struct HeapRec {
    NodeId root = 0;  // 0 when empty
    std::uint64_t size = 0;
  };

  Forest();

  HeapId make_heap();
  NodeId insert(HeapId h, double key);
  HeapId meld(HeapId h1, HeapId h2);
  std::pair<NodeId, double> find_min(HeapId h);
  std::pair<NodeId, double> extract_min(HeapId h);
  void decrease_key(HeapId h, NodeId p, double delta);
  void erase(HeapId h, NodeId p);

  bool heap_live(HeapId h) const noexcept;
  std::uint64_t heap_size(HeapId h) const;
  NodeId root_of(HeapId h) const;
  const std::map<HeapId, HeapRec>& heaps() const noexcept { return heaps_; }

  bool node_live(NodeId p) const noexcept;
  const Node& node(NodeId p) const;
  // Unchecked access for traversal-heavy callers; p must be a valid id.
  const Node& raw_node(NodeId p) const noexcept { return nodes_[p]; }
  double key_of(NodeId p) const;
  HeapId heap_of(NodeId p) const;  // walks up to the root
  NodeId last_node_id() const noexcept { return nodes_.size() - 1; }

  std::uint64_t ops_executed() const noexcept { return op_index_; }

  // Returns and clears the log accumulated since the last drain.
  EventLog drain_events();

 private:
  HeapRec& live_heap(HeapId h);
  const HeapRec& live_heap(HeapId h) const;
  void require_live_node(NodeId p) const;
  NodeId walk_root(NodeId p) const;
  NodeId new_node(double key);
  NodeId pair(NodeId left, NodeId right, PairContext context);
  void detach(NodeId p);  // splice a non-root node out of its sibling chain
  NodeId combine_children(NodeId parent, PairContext first_ctx,
                          PairContext second_ctx);
  void rebind_root(HeapId h, HeapRec& rec, NodeId new_root);
  void finish_op(OpKind kind, std::size_t pairings_before,
                 std::uint64_t heap_size_after);

  std::map<HeapId, HeapRec> heaps_;               // live heaps
  std::unordered_map<NodeId, HeapId> root_heap_;  // root node -> its heap
  std::vector<Node> nodes_;                       // index 0 unused
  HeapId next_heap_ = 1;
  std::uint64_t op_index_ = 0;
  EventLog log_;
  std::vector<NodeId> scratch_;
};

}  // namespace pairheap
