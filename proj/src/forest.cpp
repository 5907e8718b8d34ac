#include "pairheap/forest.hpp"

#include <cmath>

namespace pairheap {

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::make_heap: return "make_heap";
    case OpKind::insert: return "insert";
    case OpKind::meld: return "meld";
    case OpKind::find_min: return "find_min";
    case OpKind::extract_min: return "extract_min";
    case OpKind::decrease_key: return "decrease_key";
    case OpKind::erase: return "delete";
  }
  return "?";
}

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_heap: return "invalid heap id";
    case Errc::aliased_meld: return "meld arguments alias";
    case Errc::empty_heap: return "empty heap";
    case Errc::invalid_node: return "invalid node handle";
    case Errc::wrong_heap: return "node not in heap";
    case Errc::negative_delta: return "negative delta";
    case Errc::nonfinite_key: return "non-finite key";
  }
  return "?";
}

const char* to_string(PairContext context) {
  switch (context) {
    case PairContext::first: return "first";
    case PairContext::second: return "second";
    case PairContext::meld: return "meld";
    case PairContext::insert: return "insert";
    case PairContext::decrease_key: return "decrease_key";
    case PairContext::erase: return "delete";
  }
  return "?";
}

Forest::Forest() { nodes_.emplace_back(); }

Forest::HeapRec& Forest::live_heap(HeapId h) {
  auto it = heaps_.find(h);
  if (it == heaps_.end())
    throw ForestError(Errc::invalid_heap,
                      "heap " + std::to_string(h) + " is not live");
  return it->second;
}

const Forest::HeapRec& Forest::live_heap(HeapId h) const {
  return const_cast<Forest*>(this)->live_heap(h);
}

void Forest::require_live_node(NodeId p) const {
  if (p == 0 || p >= nodes_.size() || !nodes_[p].live)
    throw ForestError(Errc::invalid_node,
                      "node " + std::to_string(p) + " is not live");
}

NodeId Forest::walk_root(NodeId p) const {
  while (nodes_[p].up != 0) p = nodes_[p].up;
  return p;
}

NodeId Forest::new_node(double key) {
  if (!std::isfinite(key))
    throw ForestError(Errc::nonfinite_key, "key must be finite");
  nodes_.push_back(Node{key, 0, 0, 0, true});
  return nodes_.size() - 1;
}

// Both arguments must be roots of detached trees. The loser becomes the
// winner's leftmost child; on a tie the left node wins.
NodeId Forest::pair(NodeId left, NodeId right, PairContext context) {
  NodeId w = nodes_[right].key < nodes_[left].key ? right : left;
  NodeId l = w == left ? right : left;
  Node& wn = nodes_[w];
  Node& ln = nodes_[l];
  ln.right_sib = wn.left_child;
  if (wn.left_child) nodes_[wn.left_child].up = l;
  wn.left_child = l;
  ln.up = w;
  log_.pairings.push_back(PairingEvent{left, right, w, l, context, op_index_});
  return w;
}

void Forest::detach(NodeId p) {
  Node& n = nodes_[p];
  NodeId up = n.up;
  NodeId rs = n.right_sib;
  if (nodes_[up].left_child == p)
    nodes_[up].left_child = rs;
  else
    nodes_[up].right_sib = rs;
  if (rs) nodes_[rs].up = up;
  n.up = 0;
  n.right_sib = 0;
}

// Two-pass combine of a node's children: adjacent pairs left to right (an
// odd count leaves the rightmost tree unpaired), then a right-to-left fold
// where each pairing is performed on the left tree. Returns the surviving
// root, 0 if there were no children.
NodeId Forest::combine_children(NodeId parent, PairContext first_ctx,
                                PairContext second_ctx) {
  scratch_.clear();
  for (NodeId c = nodes_[parent].left_child; c != 0;) {
    NodeId next = nodes_[c].right_sib;
    nodes_[c].right_sib = 0;
    nodes_[c].up = 0;
    scratch_.push_back(c);
    c = next;
  }
  nodes_[parent].left_child = 0;
  if (scratch_.empty()) return 0;

  std::size_t out = 0;
  std::size_t i = 0;
  for (; i + 1 < scratch_.size(); i += 2)
    scratch_[out++] = pair(scratch_[i], scratch_[i + 1], first_ctx);
  if (i < scratch_.size()) scratch_[out++] = scratch_[i];

  NodeId acc = scratch_[out - 1];
  for (std::size_t j = out - 1; j-- > 0;)
    acc = pair(scratch_[j], acc, second_ctx);
  return acc;
}

void Forest::rebind_root(HeapId h, HeapRec& rec, NodeId new_root) {
  if (rec.root) root_heap_.erase(rec.root);
  rec.root = new_root;
  if (new_root) root_heap_[new_root] = h;
}

void Forest::finish_op(OpKind kind, std::size_t pairings_before,
                       std::uint64_t heap_size_after) {
  std::uint64_t pairings = log_.pairings.size() - pairings_before;
  log_.costs.push_back(
      CostRecord{kind, op_index_, pairings, pairings + 1, heap_size_after});
  ++op_index_;
}

HeapId Forest::make_heap() {
  HeapId h = next_heap_++;
  heaps_.emplace(h, HeapRec{});
  finish_op(OpKind::make_heap, log_.pairings.size(), 0);
  return h;
}

NodeId Forest::insert(HeapId h, double key) {
  HeapRec& rec = live_heap(h);
  std::size_t before = log_.pairings.size();
  NodeId v = new_node(key);
  if (rec.root == 0) {
    rebind_root(h, rec, v);
  } else {
    // The pairing is performed on the new node, so it wins key ties.
    rebind_root(h, rec, pair(v, rec.root, PairContext::insert));
  }
  rec.size += 1;
  finish_op(OpKind::insert, before, rec.size);
  return v;
}

HeapId Forest::meld(HeapId h1, HeapId h2) {
  if (h1 == h2)
    throw ForestError(Errc::aliased_meld, "meld arguments must differ");
  HeapRec& r1 = live_heap(h1);
  HeapRec& r2 = live_heap(h2);
  std::size_t before = log_.pairings.size();
  NodeId root1 = r1.root;
  NodeId root2 = r2.root;
  std::uint64_t size = r1.size + r2.size;
  if (root1) root_heap_.erase(root1);
  if (root2) root_heap_.erase(root2);
  heaps_.erase(h1);
  heaps_.erase(h2);
  NodeId root;
  if (root1 && root2)
    root = pair(root1, root2, PairContext::meld);
  else
    root = root1 ? root1 : root2;
  HeapId h = next_heap_++;
  heaps_.emplace(h, HeapRec{root, size});
  if (root) root_heap_[root] = h;
  finish_op(OpKind::meld, before, size);
  return h;
}

std::pair<NodeId, double> Forest::find_min(HeapId h) {
  HeapRec& rec = live_heap(h);
  if (rec.root == 0)
    throw ForestError(Errc::empty_heap, "find_min on empty heap");
  finish_op(OpKind::find_min, log_.pairings.size(), rec.size);
  return {rec.root, nodes_[rec.root].key};
}

std::pair<NodeId, double> Forest::extract_min(HeapId h) {
  HeapRec& rec = live_heap(h);
  if (rec.root == 0)
    throw ForestError(Errc::empty_heap, "extract_min on empty heap");
  std::size_t before = log_.pairings.size();
  NodeId old_root = rec.root;
  double key = nodes_[old_root].key;
  NodeId survivor =
      combine_children(old_root, PairContext::first, PairContext::second);
  nodes_[old_root].live = false;
  rebind_root(h, rec, survivor);
  rec.size -= 1;
  finish_op(OpKind::extract_min, before, rec.size);
  return {old_root, key};
}

void Forest::decrease_key(HeapId h, NodeId p, double delta) {
  HeapRec& rec = live_heap(h);
  require_live_node(p);
  NodeId root = walk_root(p);
  if (root_heap_.at(root) != h)
    throw ForestError(Errc::wrong_heap,
                      "node " + std::to_string(p) + " is not in heap " +
                          std::to_string(h));
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw ForestError(Errc::negative_delta,
                      "delta must be finite and nonnegative");
  double new_key = nodes_[p].key - delta;
  if (!std::isfinite(new_key))
    throw ForestError(Errc::nonfinite_key, "key would become non-finite");
  std::size_t before = log_.pairings.size();
  nodes_[p].key = new_key;
  if (p != root) {
    // Break the subtree off and pair it with the root; the pairing is
    // performed on p, so p wins a tie against the root.
    detach(p);
    rebind_root(h, rec, pair(p, root, PairContext::decrease_key));
  }
  finish_op(OpKind::decrease_key, before, rec.size);
}

void Forest::erase(HeapId h, NodeId p) {
  HeapRec& rec = live_heap(h);
  require_live_node(p);
  NodeId root = walk_root(p);
  if (root_heap_.at(root) != h)
    throw ForestError(Errc::wrong_heap,
                      "node " + std::to_string(p) + " is not in heap " +
                          std::to_string(h));
  std::size_t before = log_.pairings.size();
  if (p == root) {
    NodeId survivor =
        combine_children(p, PairContext::erase, PairContext::erase);
    nodes_[p].live = false;
    rebind_root(h, rec, survivor);
  } else {
    detach(p);
    NodeId survivor =
        combine_children(p, PairContext::erase, PairContext::erase);
    nodes_[p].live = false;
    if (survivor) rebind_root(h, rec, pair(survivor, root, PairContext::erase));
  }
  rec.size -= 1;
  finish_op(OpKind::erase, before, rec.size);
}

bool Forest::heap_live(HeapId h) const noexcept { return heaps_.count(h) != 0; }

std::uint64_t Forest::heap_size(HeapId h) const { return live_heap(h).size; }

NodeId Forest::root_of(HeapId h) const { return live_heap(h).root; }

bool Forest::node_live(NodeId p) const noexcept {
  return p != 0 && p < nodes_.size() && nodes_[p].live;
}

const Forest::Node& Forest::node(NodeId p) const {
  require_live_node(p);
  return nodes_[p];
}

double Forest::key_of(NodeId p) const { return node(p).key; }

HeapId Forest::heap_of(NodeId p) const {
  require_live_node(p);
  return root_heap_.at(walk_root(p));
}

EventLog Forest::drain_events() {
  EventLog out = std::move(log_);
  log_ = EventLog{};
  return out;
}

}  // namespace pairheap
