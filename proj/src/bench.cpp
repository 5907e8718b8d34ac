#include "pairheap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "live_set.hpp"
#include "pairheap/audit.hpp"
#include "pairheap/replay.hpp"
#include "pairheap/rng.hpp"

namespace pairheap {

namespace {

// Builds one bench cell: n inserts into a fresh heap, then a measured phase
// of mix-weighted single-heap ops with a bias that keeps the size near n.
// make_heap/meld weights are ignored here; the cell owns exactly one heap.
Trace build_cell_trace(std::uint64_t n, const MixWeights& mix,
                       std::uint64_t measured_ops, std::uint64_t seed,
                       std::uint64_t* build_ops_out) {
  SplitMix64 rng(seed);
  Trace trace;
  trace.ops.reserve(n + measured_ops + 1);
  ForestReplayer rep;
  detail::LiveSet live;
  std::uint64_t next_node = 1;

  auto apply = [&](const Operation& op) {
    ApplyOutcome out = rep.apply(op);
    if (!out.ok) throw std::logic_error("bench emitted an inapplicable op");
    trace.ops.push_back(op);
    return out;
  };

  apply(Operation::make_heap(1));
  for (std::uint64_t i = 0; i < n; ++i) {
    apply(Operation::insert(1, rng.uniform01(), next_node));
    live.add(next_node++);
  }
  *build_ops_out = trace.ops.size();

  for (std::uint64_t step = 0; step < measured_ops; ++step) {
    double size = static_cast<double>(live.size());
    double bias = size > 0 ? std::clamp(static_cast<double>(n) / size, 0.25, 4.0)
                           : 4.0;
    double w[7] = {0, 0, 0, 0, 0, 0, 0};
    w[1] = mix[OpKind::insert] * bias;
    if (!live.empty()) {
      w[3] = mix[OpKind::find_min];
      w[4] = mix[OpKind::extract_min] / bias;
      w[5] = mix[OpKind::decrease_key];
      w[6] = mix[OpKind::erase] / bias;
    }
    double total = 0;
    for (double x : w) total += x;
    if (total <= 0) {
      w[1] = total = 1.0;  // degenerate mix: keep inserting
    }
    double pick = rng.uniform01() * total;
    int kind = 1;
    for (int k = 0; k < 7; ++k) {
      if (w[k] <= 0) continue;
      kind = k;
      if (pick < w[k]) break;
      pick -= w[k];
    }
    switch (static_cast<OpKind>(kind)) {
      case OpKind::insert:
        apply(Operation::insert(1, rng.uniform01(), next_node));
        live.add(next_node++);
        break;
      case OpKind::find_min:
        apply(Operation::find_min(1));
        break;
      case OpKind::extract_min: {
        ApplyOutcome out = apply(Operation::extract_min(1));
        live.remove(out.node);
        break;
      }
      case OpKind::decrease_key: {
        std::uint64_t p = live.at(rng.bounded(live.size()));
        apply(Operation::decrease_key(1, p, rng.uniform01() * 0.25));
        break;
      }
      case OpKind::erase: {
        std::uint64_t p = live.at(rng.bounded(live.size()));
        apply(Operation::erase(1, p));
        live.remove(p);
        break;
      }
      default:
        break;
    }
  }
  return trace;
}

}  // namespace

BenchReport run_bench(const BenchOptions& opt) {
  BenchReport report;
  report.sizes = opt.sizes;
  const OpKind kinds[] = {OpKind::insert,       OpKind::find_min,
                          OpKind::extract_min,  OpKind::decrease_key,
                          OpKind::erase};
  for (std::uint64_t n : opt.sizes) {
    std::unordered_map<int, BenchRow> rows;
    std::unordered_map<int, double> slack_sum;
    std::unordered_map<int, std::uint64_t> slack_ops;
    double wall_ms = 0;
    for (std::uint32_t seed = 1; seed <= opt.seeds; ++seed) {
      std::uint64_t build_ops = 0;
      Trace trace = build_cell_trace(n, opt.mix, opt.ops_per_cell,
                                     seed * 0x9E37u + n, &build_ops);
      // Measured replay on a fresh forest, timing only the measured phase.
      ForestReplayer rep;
      for (std::uint64_t i = 0; i < build_ops; ++i)
        rep.apply(trace.ops[i]);
      rep.forest().drain_events();
      auto t0 = std::chrono::steady_clock::now();
      for (std::size_t i = build_ops; i < trace.ops.size(); ++i)
        rep.apply(trace.ops[i]);
      auto t1 = std::chrono::steady_clock::now();
      wall_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
      EventLog log = rep.forest().drain_events();
      for (const CostRecord& c : log.costs) {
        BenchRow& row = rows[static_cast<int>(c.kind)];
        row.ops += 1;
        row.total_pairings += c.pairings;
        row.total_cost += c.actual_cost;
      }
      if (opt.audit) {
        AuditOptions ao;
        ao.tolerance = opt.tolerance;
        AuditReport ar = audit_trace(trace, ao);
        for (std::size_t i = build_ops; i < ar.ops.size(); ++i) {
          slack_sum[static_cast<int>(ar.ops[i].kind)] += ar.ops[i].slack;
          slack_ops[static_cast<int>(ar.ops[i].kind)] += 1;
        }
      }
    }
    for (OpKind k : kinds) {
      auto it = rows.find(static_cast<int>(k));
      if (it == rows.end()) continue;
      BenchRow row = it->second;
      row.n = n;
      row.kind = k;
      row.mean_cost = static_cast<double>(row.total_cost) / row.ops;
      row.mean_slack = std::numeric_limits<double>::quiet_NaN();
      if (opt.audit && slack_ops[static_cast<int>(k)] > 0)
        row.mean_slack =
            slack_sum[static_cast<int>(k)] / slack_ops[static_cast<int>(k)];
      report.rows.push_back(row);
    }
    report.wall_ms_per_size.push_back(wall_ms);
  }
  return report;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
  out << "n,kind,ops,total_pairings,total_cost,mean_cost,mean_slack,wall_ms\n";
  std::size_t size_idx = 0;
  std::uint64_t current = report.rows.empty() ? 0 : report.rows.front().n;
  for (const BenchRow& row : report.rows) {
    if (row.n != current) {
      ++size_idx;
      current = row.n;
    }
    out << row.n << ',' << to_string(row.kind) << ',' << row.ops << ','
        << row.total_pairings << ',' << row.total_cost << ','
        << format_double(row.mean_cost) << ',';
    if (std::isnan(row.mean_slack))
      out << "";
    else
      out << format_double(row.mean_slack);
    out << ',' << format_double(report.wall_ms_per_size[size_idx]) << "\n";
  }
}

}  // namespace pairheap
