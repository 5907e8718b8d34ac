#include "pairheap/audit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include "pairheap/replay.hpp"

namespace pairheap {

namespace {

// log2 over integers plus prefix sums sum_{j<=i} log2 j, grown on demand.
// Each audit owns one, so concurrent audits share nothing.
class Log2Table {
 public:
  double log2i(std::uint64_t i) {
    if (i < 2) return 0.0;
    extend(i);
    return log2_[i];
  }
  double logfact(std::uint64_t i) {
    if (i < 2) return 0.0;
    extend(i);
    return fact_[i];
  }
  // 8 - 36 * sum_{j=1}^{whites} log2 j
  double heap_term(std::uint64_t whites) { return 8.0 - 36.0 * logfact(whites); }

 private:
  void extend(std::uint64_t i) {
    while (log2_.size() <= i) {
      std::uint64_t k = log2_.size();
      log2_.push_back(std::log2(static_cast<double>(k)));
      fact_.push_back(fact_[k - 1] + log2_[k]);
    }
  }
  std::vector<double> log2_{0.0, 0.0};
  std::vector<double> fact_{0.0, 0.0};
};

// Walks one heap: fills s (white count of the binary-representation subtree)
// for every node of the tree and returns the nodes in an order where parents
// precede both binary children.
void collect_binary_order(const Forest& f, NodeId root,
                          std::vector<NodeId>& order) {
  order.clear();
  if (!root) return;
  order.push_back(root);
  for (std::size_t qi = 0; qi < order.size(); ++qi) {
    const Forest::Node& n = f.raw_node(order[qi]);
    if (n.left_child) order.push_back(n.left_child);
    if (n.right_sib) order.push_back(n.right_sib);
  }
}

void fill_s(const Forest& f, const Colors& colors,
            const std::vector<NodeId>& order, std::vector<std::uint64_t>& s) {
  for (std::size_t i = order.size(); i-- > 0;) {
    NodeId x = order[i];
    const Forest::Node& n = f.raw_node(x);
    s[x] = (colors.is_white(x) ? 1 : 0) + (n.left_child ? s[n.left_child] : 0) +
           (n.right_sib ? s[n.right_sib] : 0);
  }
}

struct VisitFrame {
  NodeId node;
  NodeId gparent;
  NodeId left_sib;
};

// Neumaier-compensated accumulator; keeps half a million potential updates
// from drifting measurably even at peak potentials around 1e8.
struct CompensatedSum {
  long double sum = 0, comp = 0;

  void add(long double x) {
    long double t = sum + x;
    if (std::fabs(static_cast<double>(sum)) >=
        std::fabs(static_cast<double>(x)))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return static_cast<double>(sum + comp); }
};

// Calls fn(node, gparent, left_sib) for every node of the tree.
template <typename Fn>
void visit_general(const Forest& f, NodeId root, std::vector<VisitFrame>& stack,
                   Fn&& fn) {
  stack.clear();
  if (!root) return;
  stack.push_back({root, 0, 0});
  while (!stack.empty()) {
    VisitFrame fr = stack.back();
    stack.pop_back();
    fn(fr.node, fr.gparent, fr.left_sib);
    NodeId prev = 0;
    for (NodeId c = f.raw_node(fr.node).left_child; c != 0;
         c = f.raw_node(c).right_sib) {
      stack.push_back({c, fr.node, prev});
      prev = c;
    }
  }
}

}  // namespace

Colors color_nodes(const Trace& trace) {
  ForestReplayer rep;
  std::vector<NodeId> removed;
  for (std::size_t i = 0; i < trace.ops.size(); ++i) {
    const Operation& op = trace.ops[i];
    ApplyOutcome out = rep.apply(op);
    if (!out.ok)
      throw std::invalid_argument("trace does not replay: op " +
                                  std::to_string(i) + ": " +
                                  to_string(out.error));
    if (op.kind == OpKind::extract_min)
      removed.push_back(rep.forest_node(out.node));
    else if (op.kind == OpKind::erase)
      removed.push_back(rep.forest_node(op.node));
  }
  Colors colors;
  colors.white.assign(rep.forest().last_node_id() + 1, 0);
  for (NodeId p : removed) colors.white[p] = 1;
  return colors;
}

PotentialSnapshot snapshot_potential(const Forest& forest,
                                     const Colors& colors) {
  Log2Table tab;
  PotentialSnapshot snap;
  std::vector<std::uint64_t> s(forest.last_node_id() + 1, 0);
  std::vector<NodeId> order;
  std::vector<VisitFrame> stack;
  long double node_sum = 0, heap_sum = 0;
  for (const auto& [h, rec] : forest.heaps()) {
    collect_binary_order(forest, rec.root, order);
    fill_s(forest, colors, order, s);
    std::uint64_t whites = rec.root ? s[rec.root] : 0;
    snap.heaps.push_back(HeapPotential{h, rec.size, whites,
                                       tab.heap_term(whites)});
    heap_sum += snap.heaps.back().pot;
    visit_general(forest, rec.root, stack,
                  [&](NodeId x, NodeId gp, NodeId ls) {
      const Forest::Node& n = forest.node(x);
      NodeAnnotation a;
      a.node = x;
      a.white = colors.is_white(x);
      a.s = s[x];
      a.captured = gp != 0 && !colors.is_white(gp);
      a.capture_pot = a.captured ? 0.0 : 6.0;
      if (a.white) {
        std::uint64_t left = n.left_child ? s[n.left_child] : 0;
        std::uint64_t right = n.right_sib ? s[n.right_sib] : 0;
        a.heavy = left >= right;
        a.weight_pot = a.heavy ? 0.0 : 6.0;
        a.triple_white = ls != 0 && n.right_sib != 0 && colors.is_white(ls) &&
                         colors.is_white(n.right_sib);
        a.tw_pot = a.triple_white ? 0.0 : 6.0;
        a.rank_pot = 18.0 * tab.log2i(s[x]);
      }
      node_sum += a.total();
      snap.nodes.push_back(a);
    });
  }
  snap.node_pot = static_cast<double>(node_sum);
  snap.heap_pot = static_cast<double>(heap_sum);
  snap.phi = static_cast<double>(node_sum + heap_sum);
  return snap;
}

RankCheckResult check_pairing_rank(const RankCheckInput& in, double tolerance) {
  auto L = [](std::uint64_t s) {
    return std::log2(static_cast<double>(std::max<std::uint64_t>(s, 1)));
  };
  bool w_white = in.winner_is_a ? in.a_white : in.b_white;
  bool l_white = in.winner_is_a ? in.b_white : in.a_white;
  double r_a = in.a_white ? 18.0 * L(in.s_a) : 0.0;
  double r_b = in.b_white ? 18.0 * L(in.s_b) : 0.0;
  double r_w = w_white ? 18.0 * L(in.s_w) : 0.0;
  double r_l = l_white ? 18.0 * L(in.s_l) : 0.0;

  RankCheckResult res;
  res.gain = r_w + r_l - r_a - r_b;
  res.white_white = in.a_white && in.b_white;
  res.bound_ab = 36.0 * (L(in.s_a) - L(in.s_b));
  res.bound_ac = 36.0 * (L(in.s_a) - L(in.s_c));
  res.ok_ab = res.gain <= res.bound_ab + tolerance;
  res.ok_ac = res.gain <= res.bound_ac + tolerance;
  if (res.white_white) {
    res.bound_ww = res.bound_ac - 36.0;
    res.ok_ww = res.gain <= res.bound_ww + tolerance;
  }
  return res;
}

StructureReport check_structure(const Forest& forest, const Colors* colors) {
  StructureReport rep;
  std::vector<NodeId> order;
  std::vector<std::uint64_t> s;
  if (colors) s.assign(forest.last_node_id() + 1, 0);
  auto problem = [&](const std::string& msg) {
    if (rep.problems.size() < 64) rep.problems.push_back(msg);
  };

  for (const auto& [h, hrec] : forest.heaps()) {
    if (!hrec.root) {
      ++rep.checks;
      if (hrec.size != 0) problem("heap " + std::to_string(h) +
                                  ": empty root but nonzero size");
      continue;
    }
    const Forest::Node& rn = forest.node(hrec.root);
    ++rep.checks;
    if (rn.up != 0 || rn.right_sib != 0)
      problem("heap " + std::to_string(h) + ": root has up/right links");

    order.clear();
    order.push_back(hrec.root);
    bool overrun = false;
    for (std::size_t qi = 0; qi < order.size() && !overrun; ++qi) {
      NodeId x = order[qi];
      if (!forest.node_live(x)) {
        problem("heap " + std::to_string(h) + ": dead node in tree");
        break;
      }
      const Forest::Node& n = forest.node(x);
      ++rep.checks;
      if (n.left_child) {
        if (forest.node(n.left_child).up != x)
          problem("node " + std::to_string(x) + ": left child up-link broken");
        order.push_back(n.left_child);
      }
      if (n.right_sib) {
        if (forest.node(n.right_sib).up != x)
          problem("node " + std::to_string(x) + ": right sibling up-link broken");
        order.push_back(n.right_sib);
      }
      // General-tree heap order: children keys are >= the parent key.
      for (NodeId c = n.left_child; c != 0; c = forest.node(c).right_sib) {
        ++rep.checks;
        if (forest.node(c).key < n.key) {
          problem("node " + std::to_string(c) + ": heap order violated");
          break;
        }
      }
      if (order.size() > hrec.size) {
        problem("heap " + std::to_string(h) + ": more nodes than size (cycle?)");
        overrun = true;
      }
    }
    ++rep.checks;
    if (!overrun && order.size() != hrec.size)
      problem("heap " + std::to_string(h) + ": size mismatch: walked " +
              std::to_string(order.size()) + " of " +
              std::to_string(hrec.size));
    if (overrun || !colors) continue;

    fill_s(forest, *colors, order, s);
    std::uint64_t whites = s[hrec.root];
    std::uint64_t heavy_cap =
        (whites ? std::bit_width(whites) - 1 : 0) + 1;  // floor(log2 n) + 1
    for (NodeId x : order) {
      const Forest::Node& n = forest.node(x);
      ++rep.checks;
      if (n.left_child && s[n.left_child] > s[x])
        problem("node " + std::to_string(x) + ": s increases to left child");
      if (n.right_sib && s[n.right_sib] > s[x])
        problem("node " + std::to_string(x) + ": s increases to right sibling");
      std::uint64_t heavy_children = 0;
      for (NodeId c = n.left_child; c != 0; c = forest.node(c).right_sib) {
        if (!colors->is_white(c)) continue;
        const Forest::Node& cn = forest.node(c);
        std::uint64_t left = cn.left_child ? s[cn.left_child] : 0;
        std::uint64_t right = cn.right_sib ? s[cn.right_sib] : 0;
        if (left >= right) ++heavy_children;
      }
      ++rep.checks;
      if (heavy_children > heavy_cap)
        problem("node " + std::to_string(x) + ": " +
                std::to_string(heavy_children) + " heavy children, cap " +
                std::to_string(heavy_cap));
    }
    // A white root is always heavy: its right binary subtree is empty.
    if (colors->is_white(hrec.root)) {
      ++rep.checks;
      std::uint64_t left = rn.left_child ? s[rn.left_child] : 0;
      std::uint64_t right = rn.right_sib ? s[rn.right_sib] : 0;
      if (left < right) problem("white root not heavy");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// audit engine

namespace {

class AuditEngine {
 public:
  AuditEngine(const Trace& trace, const AuditOptions& opt)
      : trace_(trace), opt_(opt) {}

  AuditReport run();

 private:
  struct PreCapture {
    NodeId target = 0;              // decrease_key/erase node, extract root
    NodeId root1 = 0, root2 = 0;    // heap roots involved
    std::vector<NodeId> binpath;    // binary ancestors of target, bottom-up
    std::vector<std::uint8_t> gstep;  // 1 where the path step is a general parent
    NodeId lsib = 0, rsib = 0;
    std::vector<NodeId> chain;      // children of the node to be removed
  };

  bool white(NodeId x) const { return colors_.is_white(x); }

  void violate(std::uint64_t& counter, const std::string& msg) {
    ++counter;
    if (violations_recorded_ < opt_.max_recorded_violations) {
      rpt_.violations.push_back(msg);
      ++violations_recorded_;
    }
  }
  void internal(const std::string& msg) { violate(rpt_.internal_failures, msg); }

  void touch(NodeId x) {
    if (x != 0 && stamp_[x] != epoch_) {
      stamp_[x] = epoch_;
      touched_.push_back(x);
    }
  }

  // Potential term of a live node, from maintained bookkeeping.
  double node_term(NodeId x) {
    const Forest::Node& n = rep_.forest().raw_node(x);
    NodeId gp = gparent_[x];
    double t = (gp != 0 && !white(gp)) ? 0.0 : 6.0;
    if (white(x)) {
      std::uint64_t left = n.left_child ? s_[n.left_child] : 0;
      std::uint64_t right = n.right_sib ? s_[n.right_sib] : 0;
      if (left < right) t += 6.0;  // light
      NodeId ls = 0;
      if (n.up != 0 && rep_.forest().raw_node(n.up).left_child != x) ls = n.up;
      if (!(ls != 0 && n.right_sib != 0 && white(ls) && white(n.right_sib)))
        t += 6.0;  // not a triple white
      t += 18.0 * tab_.log2i(s_[x]);
    }
    return t;
  }

  void pre_capture(const Operation& op);
  void apply_detach(std::uint64_t op_index);
  void standalone_pair(const PairingEvent& e, NodeId expect_left,
                       NodeId expect_right, PairContext expect_ctx);
  NodeId chain_combine(const std::vector<NodeId>& chain,
                       const std::vector<PairingEvent>& events,
                       std::size_t& cursor, PairContext first_ctx,
                       PairContext second_ctx, OpAudit* rank_into);
  void remove_node(NodeId x);
  void heap_whites_change(HeapId h, std::int64_t delta);
  void process(const Operation& op, const EventLog& ev, OpAudit& oa);
  double lean_phi(bool validate);
  double bound_for(OpKind kind, std::uint64_t n);

  const Trace& trace_;
  AuditOptions opt_;
  bool incremental_ = false;
  ForestReplayer rep_;
  Colors colors_;
  Log2Table tab_;
  AuditReport rpt_;
  std::size_t violations_recorded_ = 0;

  std::vector<std::uint64_t> s_, gw_;
  std::vector<NodeId> gparent_;
  std::vector<double> term_;  // incremental mode only
  std::unordered_map<HeapId, std::uint64_t> heap_whites_;

  PreCapture cap_;
  std::vector<NodeId> touched_, losers_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  CompensatedSum dphi_acc_;  // per-op potential change, fully compensated

  std::vector<NodeId> survivors_, order_;
  std::vector<std::uint64_t> suffix_, suffix2_, phi_s_;
  std::vector<VisitFrame> stack_;

  std::unordered_map<std::uint64_t, std::size_t> pending_make_;  // trace heap -> op
};

void AuditEngine::pre_capture(const Operation& op) {
  cap_.target = cap_.root1 = cap_.root2 = cap_.lsib = cap_.rsib = 0;
  cap_.binpath.clear();
  cap_.gstep.clear();
  cap_.chain.clear();
  const Forest& f = rep_.forest();
  auto walk_up = [&](NodeId p) {
    NodeId cur = p;
    while (true) {
      NodeId up = f.node(cur).up;
      if (up == 0) break;
      cap_.binpath.push_back(up);
      cap_.gstep.push_back(f.node(up).left_child == cur ? 1 : 0);
      cur = up;
    }
  };
  auto child_chain = [&](NodeId p) {
    for (NodeId c = f.node(p).left_child; c != 0; c = f.node(c).right_sib)
      cap_.chain.push_back(c);
  };
  switch (op.kind) {
    case OpKind::make_heap:
    case OpKind::find_min:
      break;
    case OpKind::insert:
      cap_.root1 = f.root_of(rep_.forest_heap(op.heap));
      break;
    case OpKind::meld:
      cap_.root1 = f.root_of(rep_.forest_heap(op.heap));
      cap_.root2 = f.root_of(rep_.forest_heap(op.heap2));
      break;
    case OpKind::decrease_key: {
      cap_.target = rep_.forest_node(op.node);
      cap_.root1 = f.root_of(rep_.forest_heap(op.heap));
      if (cap_.target != cap_.root1) {
        const Forest::Node& n = f.node(cap_.target);
        cap_.rsib = n.right_sib;
        if (n.up != 0 && f.node(n.up).left_child != cap_.target)
          cap_.lsib = n.up;
        walk_up(cap_.target);
      }
      break;
    }
    case OpKind::erase: {
      cap_.target = rep_.forest_node(op.node);
      cap_.root1 = f.root_of(rep_.forest_heap(op.heap));
      if (cap_.target != cap_.root1) {
        const Forest::Node& n = f.node(cap_.target);
        cap_.rsib = n.right_sib;
        if (n.up != 0 && f.node(n.up).left_child != cap_.target)
          cap_.lsib = n.up;
        walk_up(cap_.target);
      }
      child_chain(cap_.target);
      break;
    }
    case OpKind::extract_min: {
      cap_.target = f.root_of(rep_.forest_heap(op.heap));
      cap_.root1 = cap_.target;
      child_chain(cap_.target);
      break;
    }
  }
}

// Removes the detached subtree's white count from every binary ancestor of
// the target, and from the general ancestors' subtree counts.
void AuditEngine::apply_detach(std::uint64_t op_index) {
  std::uint64_t gwp = gw_[cap_.target];
  for (std::size_t i = 0; i < cap_.binpath.size(); ++i) {
    NodeId x = cap_.binpath[i];
    if (s_[x] < gwp) {
      internal("op " + std::to_string(op_index) + ": detach underflows s");
      return;
    }
    s_[x] -= gwp;
    if (cap_.gstep[i]) gw_[x] -= gwp;
    touch(x);
  }
  gparent_[cap_.target] = 0;
  touch(cap_.lsib);
  touch(cap_.rsib);
}

void AuditEngine::standalone_pair(const PairingEvent& e, NodeId expect_left,
                                  NodeId expect_right, PairContext expect_ctx) {
  rpt_.capture_checks += 2;
  if (e.left != expect_left || e.right != expect_right ||
      e.context != expect_ctx)
    violate(rpt_.capture_failures,
            "op " + std::to_string(e.op_index) +
                ": pairing involves an unexpected node (captured-node "
                "discipline)");
  const Forest& f = rep_.forest();
  if (f.node(e.winner).key > f.node(e.loser).key ||
      (f.node(e.winner).key == f.node(e.loser).key && e.winner != e.left))
    violate(rpt_.capture_failures,
            "op " + std::to_string(e.op_index) + ": pairing winner rule broken");
  NodeId w = e.winner, l = e.loser;
  std::uint64_t s_l = gw_[l] + gw_[w] - (white(w) ? 1 : 0);
  gw_[w] += gw_[l];
  s_[w] = gw_[w];
  s_[l] = s_l;
  gparent_[l] = w;
  touch(w);
  touch(l);
  losers_.push_back(l);
}

NodeId AuditEngine::chain_combine(const std::vector<NodeId>& chain,
                                  const std::vector<PairingEvent>& events,
                                  std::size_t& cursor, PairContext first_ctx,
                                  PairContext second_ctx, OpAudit* rank_into) {
  const std::size_t c = chain.size();
  if (c == 0) return 0;
  const Forest& f = rep_.forest();

  suffix_.assign(c + 1, 0);
  for (std::size_t i = c; i-- > 0;)
    suffix_[i] = suffix_[i + 1] + gw_[chain[i]];
  for (std::size_t i = 0; i < c; ++i)
    if (s_[chain[i]] != suffix_[i]) {
      internal("chain s bookkeeping mismatch at child " + std::to_string(i));
      break;
    }

  auto run_pair = [&](NodeId a, NodeId b, std::uint64_t s_a, std::uint64_t s_b,
                      std::uint64_t s_c, bool c_virtual, PairContext ctx,
                      bool first_pass) -> NodeId {
    if (cursor >= events.size()) {
      internal("pairing events exhausted early");
      return a;
    }
    const PairingEvent& e = events[cursor++];
    rpt_.capture_checks += 2;
    if (e.left != a || e.right != b || e.context != ctx)
      violate(rpt_.capture_failures,
              "op " + std::to_string(e.op_index) +
                  ": pairing involves an unexpected node (captured-node "
                  "discipline)");
    if (f.node(e.winner).key > f.node(e.loser).key ||
        (f.node(e.winner).key == f.node(e.loser).key && e.winner != e.left))
      violate(rpt_.capture_failures, "op " + std::to_string(e.op_index) +
                                         ": pairing winner rule broken");
    NodeId w = e.winner, l = e.loser;
    std::uint64_t s_l = gw_[l] + gw_[w] - (white(w) ? 1 : 0);
    std::uint64_t s_w = s_a;
    gw_[w] += gw_[l];
    s_[w] = s_w;
    s_[l] = s_l;
    gparent_[l] = w;
    touch(w);
    touch(l);
    losers_.push_back(l);
    if (rank_into) {
      RankCheckInput in;
      in.a_white = white(a);
      in.b_white = white(b);
      in.winner_is_a = w == a;
      in.s_a = s_a;
      in.s_b = s_b;
      in.s_c = s_c;
      in.c_virtual = c_virtual;
      in.s_w = s_w;
      in.s_l = s_l;
      RankCheckResult res = check_pairing_rank(in, opt_.tolerance);
      rank_into->rank_checks += 1;
      rpt_.rank_checks += 1;
      if (!res.ok()) {
        rank_into->rank_failures += 1;
        violate(rpt_.rank_failures,
                "op " + std::to_string(e.op_index) + ": per-pairing rank bound "
                "violated (gain " + format_double(res.gain) + ")");
      }
      rank_into->rank_gain += res.gain;
      if (first_pass && res.white_white) rank_into->white_white += 1;
    }
    return w;
  };

  survivors_.clear();
  std::size_t i = 0;
  for (; i + 1 < c; i += 2) {
    std::uint64_t s_c = i + 2 < c ? suffix_[i + 2] : 0;
    survivors_.push_back(run_pair(chain[i], chain[i + 1], suffix_[i],
                                  suffix_[i + 1], s_c, i + 2 >= c, first_ctx,
                                  true));
  }
  if (i < c) survivors_.push_back(chain[i]);

  const std::size_t q = survivors_.size();
  suffix2_.assign(q + 1, 0);
  for (std::size_t j = q; j-- > 0;)
    suffix2_[j] = suffix2_[j + 1] + gw_[survivors_[j]];
  for (std::size_t j = 0; j < q; ++j)
    if (s_[survivors_[j]] != suffix2_[j]) {
      internal("survivor s bookkeeping mismatch at " + std::to_string(j));
      break;
    }
  NodeId acc = survivors_[q - 1];
  for (std::size_t j = q - 1; j-- > 0;)
    acc = run_pair(survivors_[j], acc, suffix2_[j], suffix2_[j + 1], 0, true,
                   second_ctx, false);
  return acc;
}

void AuditEngine::remove_node(NodeId x) {
  if (!white(x))
    internal("removed node " + std::to_string(x) + " is colored black");
  if (incremental_) {
    dphi_acc_.add(-term_[x]);
    term_[x] = 0;
  }
  gparent_[x] = 0;
}

void AuditEngine::heap_whites_change(HeapId h, std::int64_t delta) {
  std::uint64_t& w = heap_whites_[h];
  if (delta < 0 && w < static_cast<std::uint64_t>(-delta)) {
    internal("heap white count underflow");
    return;
  }
  std::uint64_t next = w + delta;
  if (incremental_) dphi_acc_.add(tab_.heap_term(next) - tab_.heap_term(w));
  w = next;
}

void AuditEngine::process(const Operation& op, const EventLog& ev,
                          OpAudit& oa) {
  switch (op.kind) {
    case OpKind::make_heap: {
      HeapId fh = rep_.forest_heap(op.heap_out);
      heap_whites_[fh] = 0;
      if (incremental_) dphi_acc_.add(tab_.heap_term(0));
      break;
    }
    case OpKind::insert: {
      NodeId v = rep_.forest_node(op.node_out);
      bool vw = white(v);
      gw_[v] = vw ? 1 : 0;
      s_[v] = gw_[v];
      gparent_[v] = 0;
      if (ev.pairings.empty()) {
        touch(v);
      } else {
        standalone_pair(ev.pairings[0], v, cap_.root1, PairContext::insert);
      }
      if (vw) heap_whites_change(rep_.forest_heap(op.heap), 1);
      break;
    }
    case OpKind::meld: {
      HeapId out_h = rep_.forest_heap(op.heap_out);
      HeapId h1 = rep_.forest_heap(op.heap);
      HeapId h2 = rep_.forest_heap(op.heap2);
      std::uint64_t w1 = heap_whites_.at(h1), w2 = heap_whites_.at(h2);
      if (!ev.pairings.empty())
        standalone_pair(ev.pairings[0], cap_.root1, cap_.root2,
                        PairContext::meld);
      heap_whites_.erase(h1);
      heap_whites_.erase(h2);
      heap_whites_[out_h] = w1 + w2;
      if (incremental_) {
        dphi_acc_.add(tab_.heap_term(w1 + w2) - tab_.heap_term(w1));
        dphi_acc_.add(-tab_.heap_term(w2));
      }
      break;
    }
    case OpKind::find_min:
      break;
    case OpKind::decrease_key: {
      if (cap_.target == cap_.root1) break;  // key change only
      apply_detach(oa.op_index);
      if (ev.pairings.size() != 1) {
        internal("decrease_key expected exactly one pairing");
        break;
      }
      standalone_pair(ev.pairings[0], cap_.target, cap_.root1,
                      PairContext::decrease_key);
      break;
    }
    case OpKind::extract_min: {
      oa.children = cap_.chain.size();
      for (NodeId ch : cap_.chain) {
        gparent_[ch] = 0;
        touch(ch);
      }
      std::size_t cursor = 0;
      chain_combine(cap_.chain, ev.pairings, cursor, PairContext::first,
                    PairContext::second, &oa);
      if (cursor != ev.pairings.size())
        internal("extract_min pairing count mismatch");
      remove_node(cap_.target);
      heap_whites_change(rep_.forest_heap(op.heap), -1);
      break;
    }
    case OpKind::erase: {
      if (cap_.target != cap_.root1) apply_detach(oa.op_index);
      for (NodeId ch : cap_.chain) {
        gparent_[ch] = 0;
        touch(ch);
      }
      std::size_t cursor = 0;
      NodeId survivor = chain_combine(cap_.chain, ev.pairings, cursor,
                                      PairContext::erase, PairContext::erase,
                                      nullptr);
      if (cap_.target != cap_.root1 && survivor != 0) {
        if (cursor >= ev.pairings.size()) {
          internal("delete missing the re-pairing event");
        } else {
          standalone_pair(ev.pairings[cursor++], survivor, cap_.root1,
                          PairContext::erase);
        }
      }
      if (cursor != ev.pairings.size())
        internal("delete pairing count mismatch");
      remove_node(cap_.target);
      heap_whites_change(rep_.forest_heap(op.heap), -1);
      break;
    }
  }
}

// From-scratch potential of the whole forest; in validating runs it also
// cross-checks the maintained s/gw/gparent/heap-white bookkeeping.
double AuditEngine::lean_phi(bool validate) {
  const Forest& f = rep_.forest();
  long double sum = 0;
  if (phi_s_.size() < colors_.white.size())
    phi_s_.resize(colors_.white.size(), 0);
  for (const auto& [h, rec] : f.heaps()) {
    collect_binary_order(f, rec.root, order_);
    fill_s(f, colors_, order_, phi_s_);
    std::uint64_t whites = rec.root ? phi_s_[rec.root] : 0;
    sum += tab_.heap_term(whites);
    if (validate) {
      auto it = heap_whites_.find(h);
      if (it == heap_whites_.end() || it->second != whites)
        internal("heap white-count bookkeeping mismatch for heap " +
                 std::to_string(h));
    }
    visit_general(f, rec.root, stack_, [&](NodeId x, NodeId gp, NodeId ls) {
      const Forest::Node& n = f.raw_node(x);
      bool wht = colors_.is_white(x);
      std::uint64_t sx = phi_s_[x];
      if (validate) {
        std::uint64_t gwx =
            (wht ? 1 : 0) + (n.left_child ? phi_s_[n.left_child] : 0);
        if (s_[x] != sx || gw_[x] != gwx || gparent_[x] != gp)
          internal("node bookkeeping mismatch at node " + std::to_string(x));
      }
      double t = (gp != 0 && !colors_.is_white(gp)) ? 0.0 : 6.0;
      if (wht) {
        std::uint64_t left = n.left_child ? phi_s_[n.left_child] : 0;
        std::uint64_t right = n.right_sib ? phi_s_[n.right_sib] : 0;
        if (left < right) t += 6.0;
        if (!(ls != 0 && n.right_sib != 0 && colors_.is_white(ls) &&
              colors_.is_white(n.right_sib)))
          t += 6.0;
        t += 18.0 * tab_.log2i(sx);
      }
      sum += t;
    });
  }
  return static_cast<double>(sum);
}

double AuditEngine::bound_for(OpKind kind, std::uint64_t n) {
  switch (kind) {
    case OpKind::make_heap:
    case OpKind::insert:
      return 21.0;
    case OpKind::meld:
      return 0.0;
    case OpKind::find_min:
      return 1.0;
    case OpKind::decrease_key:
      return 26.0 + 24.0 * tab_.log2i(n);
    case OpKind::extract_min:
      return 102.0 * tab_.log2i(n + 1) + 17.0;
    case OpKind::erase:
      return 43.0 + 126.0 * tab_.log2i(n + 2);
  }
  return 0.0;
}

AuditReport AuditEngine::run() {
  colors_ = color_nodes(trace_);
  const std::size_t ids = colors_.white.size();
  s_.assign(ids, 0);
  gw_.assign(ids, 0);
  gparent_.assign(ids, 0);
  stamp_.assign(ids, 0);
  incremental_ =
      opt_.phi_mode == PhiMode::incremental ||
      (opt_.phi_mode == PhiMode::automatic &&
       trace_.ops.size() > opt_.scratch_op_limit);
  if (incremental_) term_.assign(ids, 0.0);
  rpt_ = AuditReport{};
  rpt_.ops.reserve(trace_.ops.size());

  double phi_prev = 0.0;
  CompensatedSum phi_run;

  for (std::size_t i = 0; i < trace_.ops.size(); ++i) {
    const Operation& op = trace_.ops[i];
    ++epoch_;
    touched_.clear();
    losers_.clear();
    dphi_acc_ = CompensatedSum{};

    pre_capture(op);
    ApplyOutcome outcome = rep_.apply(op);
    if (!outcome.ok)
      throw std::invalid_argument("trace does not replay: op " +
                                  std::to_string(i));
    EventLog ev = rep_.forest().drain_events();
    if (ev.costs.size() != 1) {
      internal("expected one cost record per op");
      continue;
    }
    const CostRecord& cost = ev.costs[0];

    OpAudit oa;
    oa.op_index = i;
    oa.kind = op.kind;
    oa.actual_cost = cost.actual_cost;
    oa.pairings = cost.pairings;
    oa.n_after = cost.heap_size_after;
    if (cost.actual_cost != cost.pairings + 1)
      internal("cost record breaks actual = pairings + 1");
    if (ev.pairings.size() != cost.pairings)
      internal("event count disagrees with cost record");

    process(op, ev, oa);
    if (op.kind == OpKind::extract_min) {
      std::uint64_t expect = oa.children ? oa.children : 1;
      if (oa.actual_cost != expect)
        internal("extract_min cost is not the child count");
    }
    // The loser of every pairing exposes the winner's former leftmost child
    // as its right sibling; that is the one grandchild whose triple-white
    // status can move.
    for (NodeId l : losers_) touch(rep_.forest().node(l).right_sib);

    double dphi;
    if (incremental_) {
      for (NodeId x : touched_) {
        if (!rep_.forest().node_live(x)) continue;
        double nt = node_term(x);
        dphi_acc_.add(static_cast<long double>(nt) - term_[x]);
        term_[x] = nt;
      }
      long double d = dphi_acc_.sum + dphi_acc_.comp;
      dphi = static_cast<double>(d);
      phi_run.add(d);
    } else {
      double phi_now = lean_phi(true);
      dphi = phi_now - phi_prev;
      phi_prev = phi_now;
      phi_run = CompensatedSum{phi_now, 0};
    }

    oa.delta_phi = dphi;
    oa.bound = bound_for(op.kind, oa.n_after);
    oa.slack = oa.bound - (static_cast<double>(oa.actual_cost) + dphi);
    oa.bound_ok = oa.slack >= -opt_.tolerance;
    if (!oa.bound_ok)
      violate(rpt_.bound_failures,
              "op " + std::to_string(i) + " (" + to_string(op.kind) +
                  "): amortized bound violated, slack " +
                  format_double(oa.slack));
    if (op.kind == OpKind::find_min) {
      oa.find_min_exact = dphi == 0.0 && oa.actual_cost == 1;
      if (!oa.find_min_exact)
        violate(rpt_.bound_failures,
                "op " + std::to_string(i) + ": find_min must leave phi exactly "
                "unchanged at cost 1");
    }
    if (op.kind == OpKind::extract_min) {
      if (oa.pairings == 0) {
        oa.rank_bound = 0.0;
        oa.rank_total_ok = oa.rank_gain == 0.0;
      } else {
        oa.rank_bound = 54.0 * tab_.log2i(oa.n_after) -
                        36.0 * static_cast<double>(oa.white_white);
        oa.rank_total_ok = oa.rank_gain <= oa.rank_bound + opt_.tolerance;
      }
      if (!oa.rank_total_ok)
        violate(rpt_.rank_failures,
                "op " + std::to_string(i) + ": total rank gain " +
                    format_double(oa.rank_gain) + " exceeds " +
                    format_double(oa.rank_bound));
    }

    rpt_.sum_actual += oa.actual_cost;
    rpt_.sum_bound += oa.bound;

    // A make_heap and the first insert into that heap, audited together as
    // one single-node heap creation.
    if (op.kind == OpKind::make_heap) {
      pending_make_[op.heap_out] = i;
    } else if (op.kind == OpKind::meld) {
      pending_make_.erase(op.heap);
      pending_make_.erase(op.heap2);
    } else if (op.kind == OpKind::insert) {
      auto it = pending_make_.find(op.heap);
      if (it != pending_make_.end()) {
        CombinedMakeInsert cmb;
        cmb.make_op = it->second;
        cmb.insert_op = i;
        cmb.actual_cost = rpt_.ops[it->second].pairings + oa.pairings + 1;
        cmb.delta_phi = rpt_.ops[it->second].delta_phi + oa.delta_phi;
        cmb.slack =
            21.0 - (static_cast<double>(cmb.actual_cost) + cmb.delta_phi);
        cmb.ok = cmb.slack >= -opt_.tolerance;
        if (!cmb.ok)
          violate(rpt_.combined_failures,
                  "ops " + std::to_string(cmb.make_op) + "+" +
                      std::to_string(cmb.insert_op) +
                      ": combined make/insert budget violated");
        rpt_.combined.push_back(cmb);
        pending_make_.erase(it);
      }
    }

    if (opt_.structural_checks) {
      StructureReport sr = check_structure(rep_.forest(), &colors_);
      rpt_.structural_checks += sr.checks;
      for (const std::string& p : sr.problems)
        violate(rpt_.structural_failures,
                "op " + std::to_string(i) + ": " + p);
    }
    if (incremental_ && opt_.cross_check_stride != 0 &&
        (i + 1) % opt_.cross_check_stride == 0) {
      double scr = lean_phi(true);
      rpt_.cross_checks += 1;
      if (std::fabs(scr - phi_run.value()) > 1e-9 + 1e-12 * std::fabs(scr))
        violate(rpt_.cross_failures,
                "op " + std::to_string(i) + ": incremental phi drifted from "
                "scratch recomputation");
    }

    rpt_.ops.push_back(oa);
  }

  if (incremental_) {
    double scr = lean_phi(true);
    rpt_.cross_checks += 1;
    if (std::fabs(scr - phi_run.value()) > 1e-9 + 1e-12 * std::fabs(scr))
      violate(rpt_.cross_failures,
              "final incremental phi drifted from scratch recomputation by " +
                  format_double(scr - phi_run.value()));
  }

  rpt_.phi0 = 0.0;
  rpt_.phim = phi_run.value();
  rpt_.phi0_ok = true;  // the forest starts empty, so phi_0 = 0 exactly
  rpt_.phim_ok = rpt_.phim >= -opt_.tolerance;
  if (!rpt_.phim_ok)
    violate(rpt_.bound_failures, "phi_m is negative: " +
                                     format_double(rpt_.phim));
  rpt_.sum_ok = static_cast<double>(rpt_.sum_actual) <=
                rpt_.sum_bound + opt_.tolerance;
  if (!rpt_.sum_ok)
    violate(rpt_.bound_failures, "total actual cost exceeds total budget");
  return rpt_;
}

}  // namespace

AuditReport audit_trace(const Trace& trace, const AuditOptions& options) {
  AuditEngine engine(trace, options);
  return engine.run();
}

void write_report_jsonl(const AuditReport& report, std::ostream& out) {
  for (const OpAudit& oa : report.ops) {
    out << "{\"op_index\":" << oa.op_index << ",\"kind\":\""
        << to_string(oa.kind) << "\",\"a\":" << oa.actual_cost
        << ",\"n\":" << oa.n_after
        << ",\"delta_phi\":" << format_double(oa.delta_phi)
        << ",\"bound\":" << format_double(oa.bound)
        << ",\"slack\":" << format_double(oa.slack);
    if (oa.kind == OpKind::extract_min)
      out << ",\"c\":" << oa.children << ",\"w\":" << oa.white_white
          << ",\"rank_gain\":" << format_double(oa.rank_gain)
          << ",\"rank_bound\":" << format_double(oa.rank_bound);
    out << "}\n";
  }
  out << "{\"phi0\":" << format_double(report.phi0)
      << ",\"phim\":" << format_double(report.phim)
      << ",\"sum_a\":" << report.sum_actual
      << ",\"sum_bound\":" << format_double(report.sum_bound)
      << ",\"verdict\":\"" << (report.all_ok() ? "pass" : "fail") << "\"}\n";
}

void write_report_csv(const AuditReport& report, std::ostream& out) {
  out << "op_index,kind,a,n,delta_phi,bound,slack,phi0,phim,sum_a,sum_bound,"
         "verdict\n";
  for (const OpAudit& oa : report.ops) {
    out << oa.op_index << ',' << to_string(oa.kind) << ',' << oa.actual_cost
        << ',' << oa.n_after << ',' << format_double(oa.delta_phi) << ','
        << format_double(oa.bound) << ',' << format_double(oa.slack)
        << ",,,,,\n";
  }
  out << "summary,,,,,,," << format_double(report.phi0) << ','
      << format_double(report.phim) << ',' << report.sum_actual << ','
      << format_double(report.sum_bound) << ','
      << (report.all_ok() ? "pass" : "fail") << "\n";
}

}  // namespace pairheap
