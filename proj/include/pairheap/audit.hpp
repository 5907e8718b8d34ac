#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pairheap/forest.hpp"
#include "pairheap/trace.hpp"

namespace pairheap {

// Node coloring for a fixed trace: a node is white iff it is removed at some
// point (returned by extract_min or deleted), black iff it survives to the
// end. Colors never change, so they are computed by a first full replay.
struct Colors {
  std::vector<std::uint8_t> white;  // indexed by forest node id

  bool is_white(NodeId p) const { return white[p] != 0; }
};

// Full replay; throws std::invalid_argument if the trace does not replay.
Colors color_nodes(const Trace& trace);

struct NodeAnnotation {
  NodeId node = 0;
  bool white = false;
  // White nodes in the node's induced subtree of the binary representation.
  std::uint64_t s = 0;
  bool heavy = false;         // white only; roots are always heavy
  bool captured = false;      // general-tree parent exists and is black
  bool triple_white = false;  // white with white immediate left+right siblings
  double rank_pot = 0;        // 18*log2(s) for white nodes, 0 for black
  double weight_pot = 0;      // 6 for white light nodes
  double capture_pot = 0;     // 6 unless captured (black nodes too)
  double tw_pot = 0;          // 6 unless triple white

  double total() const { return rank_pot + weight_pot + capture_pot + tw_pot; }
};

struct HeapPotential {
  HeapId heap = 0;
  std::uint64_t size = 0;
  std::uint64_t whites = 0;
  double pot = 0;  // 8 - 36 * sum_{i=1}^{whites} log2(i)
};

struct PotentialSnapshot {
  std::vector<NodeAnnotation> nodes;  // every live node, traversal order
  std::vector<HeapPotential> heaps;   // every live heap, ascending id
  double node_pot = 0;
  double heap_pot = 0;
  double phi = 0;
};

// From-scratch evaluation of the potential of the whole forest.
PotentialSnapshot snapshot_potential(const Forest& forest,
                                     const Colors& colors);

// ---- per-pairing rank checks -------------------------------------------

// s values captured immediately before the pairing (a, b, c) and immediately
// after it (w, l). c is the right neighbour of b; when it is absent it is
// treated as a lone black node, i.e. s_c = 0, and every log2(s) below reads
// log2(max(s, 1)).
struct RankCheckInput {
  bool a_white = false, b_white = false;
  bool winner_is_a = true;
  std::uint64_t s_a = 0, s_b = 0, s_c = 0;
  bool c_virtual = false;
  std::uint64_t s_w = 0, s_l = 0;
};

struct RankCheckResult {
  double gain = 0;          // r(w) + r(l) - r(a) - r(b)
  bool white_white = false;
  double bound_ww = 0;      // white-white: 36 log2 s(a) - 36 log2 s(c) - 36
  double bound_ab = 0;      // always:      36 log2 s(a) - 36 log2 s(b)
  double bound_ac = 0;      // always:      36 log2 s(a) - 36 log2 s(c)
  bool ok_ww = true, ok_ab = true, ok_ac = true;

  bool ok() const { return ok_ww && ok_ab && ok_ac; }
};

RankCheckResult check_pairing_rank(const RankCheckInput& in, double tolerance);

// ---- trace audit ---------------------------------------------------------

enum class PhiMode : std::uint8_t {
  scratch,      // recompute the potential by full traversal after every op
  incremental,  // maintain it from per-op term differences
  automatic,    // scratch up to scratch_op_limit ops, incremental beyond
};

struct AuditOptions {
  double tolerance = 1e-6;
  PhiMode phi_mode = PhiMode::automatic;
  std::uint64_t scratch_op_limit = 10000;
  // Run the structural invariant suite (heap order, links, s-monotonicity,
  // heavy-children bound, root heaviness) after every operation.
  bool structural_checks = false;
  // Incremental mode: compare the running potential against a from-scratch
  // recomputation every this many ops (and once at the end).
  std::uint64_t cross_check_stride = 65536;
  std::size_t max_recorded_violations = 64;
};

struct OpAudit {
  std::uint64_t op_index = 0;
  OpKind kind{};
  std::uint64_t actual_cost = 0;
  std::uint64_t pairings = 0;
  std::uint64_t n_after = 0;  // size of the touched heap after the op
  double delta_phi = 0;
  double bound = 0;  // amortized budget for this op
  double slack = 0;  // bound - (actual_cost + delta_phi)
  bool bound_ok = true;
  bool find_min_exact = true;  // find_min: delta_phi == 0 bit-exactly
  // extract_min only:
  std::uint64_t children = 0;     // c
  std::uint64_t white_white = 0;  // w, white-white pairings in the first pass
  double rank_gain = 0;
  double rank_bound = 0;  // 54 log2(n) - 36 w (0 when there are no pairings)
  bool rank_total_ok = true;
  std::uint64_t rank_checks = 0, rank_failures = 0;

  bool ok() const { return bound_ok && find_min_exact && rank_total_ok &&
                           rank_failures == 0; }
};

// One make_heap plus the first insert into that heap, audited as a single
// one-node heap creation: combined cost is total pairings + 1.
struct CombinedMakeInsert {
  std::uint64_t make_op = 0, insert_op = 0;
  std::uint64_t actual_cost = 0;
  double delta_phi = 0;
  double slack = 0;  // against the make_heap budget of 21
  bool ok = true;
};

struct AuditReport {
  std::vector<OpAudit> ops;
  std::vector<CombinedMakeInsert> combined;
  double phi0 = 0, phim = 0;
  std::uint64_t sum_actual = 0;
  double sum_bound = 0;
  bool phi0_ok = true, phim_ok = true, sum_ok = true;
  std::uint64_t bound_failures = 0;
  std::uint64_t rank_checks = 0, rank_failures = 0;
  std::uint64_t capture_checks = 0, capture_failures = 0;
  std::uint64_t combined_failures = 0;
  std::uint64_t structural_checks = 0, structural_failures = 0;
  std::uint64_t cross_checks = 0, cross_failures = 0;
  std::uint64_t internal_failures = 0;  // bookkeeping self-checks
  std::vector<std::string> violations;

  bool all_ok() const {
    return phi0_ok && phim_ok && sum_ok && bound_failures == 0 &&
           rank_failures == 0 && capture_failures == 0 &&
           combined_failures == 0 && structural_failures == 0 &&
           cross_failures == 0 && internal_failures == 0;
  }
};

// Two-pass audit: color the nodes, then replay computing the potential after
// every operation and checking every per-operation and per-pairing budget.
// Throws std::invalid_argument when the trace does not replay.
AuditReport audit_trace(const Trace& trace, const AuditOptions& options = {});

void write_report_jsonl(const AuditReport& report, std::ostream& out);
void write_report_csv(const AuditReport& report, std::ostream& out);

// ---- structural invariants ------------------------------------------------

struct StructureReport {
  std::uint64_t checks = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Heap order, binary-link consistency and size bookkeeping; with colors also
// s-monotonicity, root heaviness and the heavy-children bound.
StructureReport check_structure(const Forest& forest, const Colors* colors);

}  // namespace pairheap
