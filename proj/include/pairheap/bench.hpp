#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pairheap/generator.hpp"

namespace pairheap {

struct BenchOptions {
  std::vector<std::uint64_t> sizes;  // target heap sizes, usually powers of two
  MixWeights mix{};
  std::uint32_t seeds = 3;
  std::uint64_t ops_per_cell = 8192;  // measured ops per (size, seed) cell
  bool audit = false;
  double tolerance = 1e-6;
};

// One (size, kind) row aggregated over seeds. Pairings are the paper-style
// cost unit; wall time is secondary and excluded from the determinism
// guarantee.
struct BenchRow {
  std::uint64_t n = 0;
  OpKind kind{};
  std::uint64_t ops = 0;
  std::uint64_t total_pairings = 0;
  std::uint64_t total_cost = 0;
  double mean_cost = 0;
  double mean_slack = 0;  // NaN unless audit was requested
};

struct BenchReport {
  std::vector<BenchRow> rows;            // ordered by (n, kind)
  std::vector<double> wall_ms_per_size;  // parallel to sizes
  std::vector<std::uint64_t> sizes;
};

BenchReport run_bench(const BenchOptions& options);
void write_bench_csv(const BenchReport& report, std::ostream& out);

}  // namespace pairheap
