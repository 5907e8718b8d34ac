// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 2-5 share one generated trace corpus so the expensive
// audits run once.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pairheap/audit.hpp"
#include "pairheap/generator.hpp"
#include "pairheap/oracle.hpp"
#include "pairheap/replay.hpp"
#include "pairheap/rng.hpp"

using namespace pairheap;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::vector<double> child_keys(const Forest& f, NodeId x) {
  std::vector<double> keys;
  for (NodeId c = f.node(x).left_child; c != 0; c = f.node(c).right_sib)
    keys.push_back(f.key_of(c));
  return keys;
}

NodeId child_with_key(const Forest& f, NodeId x, double key) {
  for (NodeId c = f.node(x).left_child; c != 0; c = f.node(c).right_sib)
    if (f.key_of(c) == key) return c;
  return 0;
}

// Criterion 1: the eight-child extract example, exact tree match, under 1s.
void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  Forest f;
  HeapId h = f.make_heap();
  for (double k : {1, 6, 8, 9, 5, 2, 7, 3, 4}) f.insert(h, k);
  bool ok = child_keys(f, f.root_of(h)) ==
            std::vector<double>{4, 3, 7, 2, 5, 9, 8, 6};
  f.drain_events();
  auto [p, key] = f.extract_min(h);
  (void)p;
  EventLog log = f.drain_events();
  ok = ok && key == 1.0 && log.costs.size() == 1 &&
       log.costs[0].pairings == 7 && log.costs[0].actual_cost == 8;
  NodeId root = f.root_of(h);
  ok = ok && f.key_of(root) == 2 &&
       child_keys(f, root) == std::vector<double>{3, 5, 7};
  NodeId n3 = child_with_key(f, root, 3);
  NodeId n5 = child_with_key(f, root, 5);
  ok = ok && n3 && n5 && child_keys(f, n3) == std::vector<double>{4} &&
       child_keys(f, n5) == std::vector<double>{6, 9};
  NodeId n6 = n5 ? child_with_key(f, n5, 6) : 0;
  ok = ok && n6 && child_keys(f, n6) == std::vector<double>{8};
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  ok = ok && secs < 1.0;
  report(1, ok,
         "eight-child extract returns key 1, exact final tree, 7 pairings, "
         "cost 8 (" +
             std::to_string(secs) + "s)");
}

// Criteria 2-5 share this corpus: 100 seeds x 10^4 ops, survivor targets
// cycling through {0, 0.3, 0.7}.
void criteria_2_to_5() {
  const int kTraces = 100;
  const std::uint64_t kOps = 10000;
  const double kTol = 1e-6;

  std::size_t diff_bad = 0;
  std::string diff_detail;
  std::uint64_t ops_audited = 0, bound_bad = 0;
  std::uint64_t rank_checks = 0, rank_bad = 0, extracts = 0;
  std::size_t global_bad = 0;
  std::uint64_t capture_bad = 0;

  for (int seed = 1; seed <= kTraces; ++seed) {
    GeneratorConfig cfg;
    cfg.op_count = kOps;
    cfg.seed = static_cast<std::uint64_t>(seed);
    const double targets[] = {0.0, 0.3, 0.7};
    cfg.survivor_target = targets[seed % 3];
    Trace trace = generate_random_trace(cfg);

    DiffReport diff = diff_run(trace);
    if (!diff.equivalent) {
      ++diff_bad;
      if (diff_detail.empty()) diff_detail = diff.detail;
    }

    AuditOptions opt;
    opt.tolerance = kTol;
    AuditReport audit = audit_trace(trace, opt);
    ops_audited += audit.ops.size();
    bound_bad += audit.bound_failures;
    rank_checks += audit.rank_checks;
    rank_bad += audit.rank_failures;
    capture_bad += audit.capture_failures + audit.internal_failures +
                   audit.combined_failures + audit.cross_failures;
    for (const OpAudit& oa : audit.ops)
      if (oa.kind == OpKind::extract_min) ++extracts;
    bool global_ok = audit.phi0 == 0.0 && audit.phim >= -kTol &&
                     static_cast<double>(audit.sum_actual) <=
                         audit.sum_bound + kTol;
    if (!global_ok) ++global_bad;
  }

  report(2, diff_bad == 0,
         std::to_string(kTraces) + " traces x " + std::to_string(kOps) +
             " ops differentially equivalent" +
             (diff_bad ? " (first: " + diff_detail + ")" : ""));
  report(3, bound_bad == 0 && capture_bad == 0,
         "per-operation amortized bounds: " + std::to_string(ops_audited) +
             " ops, " + std::to_string(bound_bad) + " violations");
  report(4, rank_bad == 0,
         "per-pairing rank bounds: " + std::to_string(rank_checks) +
             " per-pairing checks over " + std::to_string(extracts) +
             " extracts, " + std::to_string(rank_bad) + " violations");
  report(5, global_bad == 0,
         "global accounting (phi_0 = 0, phi_m >= 0, sum a <= sum budget) on "
         "every trace");
}

// Criterion 6: structural invariants after every op, 20 seeds x 10^3 ops.
void criterion_6() {
  std::uint64_t checks = 0, bad = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.op_count = 1000;
    cfg.seed = static_cast<std::uint64_t>(seed) * 101;
    cfg.survivor_target = (seed % 2) ? 0.4 : 0.0;
    Trace trace = generate_random_trace(cfg);
    AuditOptions opt;
    opt.structural_checks = true;
    AuditReport audit = audit_trace(trace, opt);
    checks += audit.structural_checks + audit.capture_checks;
    bad += audit.structural_failures + audit.capture_failures +
           audit.internal_failures;
    if (!audit.all_ok()) ++bad;
  }
  report(6, bad == 0,
         "structural suite (heap order, links, s-monotonicity, heavy bound, "
         "root heaviness, capture discipline): " +
             std::to_string(checks) + " checks, " + std::to_string(bad) +
             " violations");
}

// Criterion 7: insert-only-then-drain budgets at n in {2^10, 2^14, 2^18}.
void criterion_7() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t n : {1ull << 10, 1ull << 14, 1ull << 18}) {
    SplitMix64 rng(n);
    std::vector<double> keys(n);
    for (std::uint64_t i = 0; i < n; ++i) keys[i] = static_cast<double>(i + 1);
    for (std::uint64_t i = n; i-- > 1;)
      std::swap(keys[i], keys[rng.bounded(i + 1)]);

    Trace trace;
    trace.ops.reserve(2 * n + 1);
    trace.ops.push_back(Operation::make_heap(1));
    for (std::uint64_t i = 0; i < n; ++i)
      trace.ops.push_back(Operation::insert(1, keys[i], i + 1));
    for (std::uint64_t i = 0; i < n; ++i)
      trace.ops.push_back(Operation::extract_min(1));

    AuditReport audit = audit_trace(trace);  // auto phi mode
    std::uint64_t insert_cost = 0;
    double min_slack = 1e300;
    for (const OpAudit& oa : audit.ops) {
      if (oa.kind == OpKind::insert) insert_cost += oa.actual_cost;
      min_slack = std::min(min_slack, oa.slack);
    }
    bool budget_ok = insert_cost <= 21 * n + 21;
    bool slack_ok = min_slack >= 0.0 && audit.all_ok();
    ok = ok && budget_ok && slack_ok;
    detail += "n=" + std::to_string(n) + ": insert cost " +
              std::to_string(insert_cost) + " <= " +
              std::to_string(21 * n + 21) + ", min slack " +
              format_double(min_slack) + "; ";
    if (!budget_ok || !slack_ok) detail += "(FAILED) ";
  }
  report(7, ok, detail);
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criteria_2_to_5();
  criterion_6();
  criterion_7();
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%s (%d failed, %.1fs)\n",
              failures == 0 ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES",
              failures, secs);
  return failures == 0 ? 0 : 1;
}
