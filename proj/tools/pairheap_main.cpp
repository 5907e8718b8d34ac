// pairheap command line: generate, validate, replay, differential-test,
// audit and benchmark operation traces.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pairheap/audit.hpp"
#include "pairheap/bench.hpp"
#include "pairheap/generator.hpp"
#include "pairheap/oracle.hpp"
#include "pairheap/replay.hpp"
#include "pairheap/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFile = 3;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw FileError("write to " + path + " failed");
}

pairheap::Trace load_trace(const std::string& path) {
  return pairheap::parse_trace(read_file(path));
}

// Returns true when the trace is valid; prints violations otherwise.
bool validate_and_print(const pairheap::Trace& trace) {
  auto violations = pairheap::validate_trace(trace);
  for (const auto& v : violations)
    std::cout << "violation at op " << v.op_index << ": " << v.message << "\n";
  if (!violations.empty()) {
    std::cout << violations.size() << " violation(s)\n";
    return false;
  }
  return true;
}

int cmd_gen(const pairheap::GeneratorConfig& cfg, const std::string& out_path) {
  pairheap::Trace trace = pairheap::generate_random_trace(cfg);
  std::string text = pairheap::serialize_trace(trace);
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  pairheap::Trace trace = load_trace(path);
  if (!validate_and_print(trace)) return kExitCheckFailed;
  std::cout << "ok: " << trace.ops.size() << " ops\n";
  return kExitOk;
}

int cmd_run(const std::string& path, const std::string& events_path) {
  pairheap::Trace trace = load_trace(path);
  if (!validate_and_print(trace)) return kExitCheckFailed;
  pairheap::ForestReplayer rep;
  std::uint64_t total_cost = 0, total_pairings = 0;
  std::uint64_t per_kind[7] = {0};
  std::ostringstream events;
  for (std::size_t i = 0; i < trace.ops.size(); ++i) {
    rep.apply(trace.ops[i]);
    pairheap::EventLog log = rep.forest().drain_events();
    for (const auto& e : log.pairings) {
      total_pairings += 1;
      if (!events_path.empty())
        events << "{\"type\":\"pairing\",\"op_index\":" << e.op_index
               << ",\"left\":" << rep.trace_node(e.left)
               << ",\"right\":" << rep.trace_node(e.right)
               << ",\"winner\":" << rep.trace_node(e.winner)
               << ",\"loser\":" << rep.trace_node(e.loser) << ",\"context\":\""
               << pairheap::to_string(e.context) << "\"}\n";
    }
    for (const auto& c : log.costs) {
      total_cost += c.actual_cost;
      per_kind[static_cast<int>(c.kind)] += 1;
      if (!events_path.empty())
        events << "{\"type\":\"cost\",\"op_index\":" << c.op_index
               << ",\"kind\":\"" << pairheap::to_string(c.kind)
               << "\",\"pairings\":" << c.pairings
               << ",\"actual_cost\":" << c.actual_cost
               << ",\"heap_size_after\":" << c.heap_size_after << "}\n";
    }
  }
  if (!events_path.empty()) write_file(events_path, events.str());
  std::cout << "ops " << trace.ops.size() << ", pairings " << total_pairings
            << ", total cost " << total_cost << "\n";
  const pairheap::OpKind kinds[] = {
      pairheap::OpKind::make_heap,   pairheap::OpKind::insert,
      pairheap::OpKind::meld,        pairheap::OpKind::find_min,
      pairheap::OpKind::extract_min, pairheap::OpKind::decrease_key,
      pairheap::OpKind::erase};
  for (auto k : kinds)
    if (per_kind[static_cast<int>(k)])
      std::cout << "  " << pairheap::to_string(k) << ": "
                << per_kind[static_cast<int>(k)] << "\n";
  std::uint64_t live_heaps = rep.forest().heaps().size();
  std::cout << "live heaps " << live_heaps << "\n";
  return kExitOk;
}

int cmd_diff(const std::string& path) {
  pairheap::Trace trace = load_trace(path);
  if (!validate_and_print(trace)) return kExitCheckFailed;
  pairheap::DiffReport report = pairheap::diff_run(trace);
  if (report.equivalent) {
    std::cout << "equivalent (" << trace.ops.size() << " ops)\n";
    return kExitOk;
  }
  std::cout << "divergence at op " << report.first_divergence << ": "
            << report.detail << "\n";
  return kExitCheckFailed;
}

int cmd_audit(const std::string& path, const std::string& report_path,
              const std::string& csv_path, const pairheap::AuditOptions& opt) {
  pairheap::Trace trace = load_trace(path);
  if (!validate_and_print(trace)) return kExitCheckFailed;
  pairheap::AuditReport report = pairheap::audit_trace(trace, opt);
  if (!report_path.empty()) {
    std::ostringstream ss;
    pairheap::write_report_jsonl(report, ss);
    write_file(report_path, ss.str());
  }
  if (!csv_path.empty()) {
    std::ostringstream ss;
    pairheap::write_report_csv(report, ss);
    write_file(csv_path, ss.str());
  }
  std::cout << "ops " << report.ops.size() << ", sum a " << report.sum_actual
            << ", sum bound " << pairheap::format_double(report.sum_bound)
            << ", phi_m " << pairheap::format_double(report.phim) << "\n";
  std::cout << "per-op bound failures: " << report.bound_failures << "\n";
  std::cout << "rank checks: " << report.rank_checks
            << ", failures: " << report.rank_failures << "\n";
  std::cout << "capture checks: " << report.capture_checks
            << ", failures: " << report.capture_failures << "\n";
  if (report.structural_checks)
    std::cout << "structural checks: " << report.structural_checks
              << ", failures: " << report.structural_failures << "\n";
  if (report.cross_checks)
    std::cout << "phi cross-checks: " << report.cross_checks
              << ", failures: " << report.cross_failures << "\n";
  for (const std::string& v : report.violations)
    std::cout << "violation: " << v << "\n";
  std::cout << (report.all_ok() ? "audit: pass" : "audit: FAIL") << "\n";
  return report.all_ok() ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const pairheap::BenchOptions& opt, const std::string& csv_path) {
  pairheap::BenchReport report = pairheap::run_bench(opt);
  std::ostringstream ss;
  pairheap::write_bench_csv(report, ss);
  if (csv_path.empty() || csv_path == "-")
    std::cout << ss.str();
  else
    write_file(csv_path, ss.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairing heap trace tool"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random trace");
  std::uint64_t gen_ops = 1000, gen_seed = 1;
  std::string gen_mix, gen_out, gen_keys = "uniform:0:1000000";
  double gen_survivors = 0.3;
  gen->add_option("--ops", gen_ops, "number of operations");
  gen->add_option("--mix", gen_mix, "weights, e.g. insert=4,extract_min=2");
  gen->add_option("--survivors", gen_survivors,
                  "target fraction of inserted nodes alive at the end");
  gen->add_option("--seed", gen_seed, "PRNG seed");
  gen->add_option("--out", gen_out, "output file ('-' for stdout)");
  gen->add_option("--keys", gen_keys, "uniform:LO:HI or perm");

  // validate
  auto* validate = app.add_subcommand("validate", "validate a trace file");
  std::string validate_file;
  validate->add_option("file", validate_file, "trace file")->required();

  // run
  auto* run = app.add_subcommand("run", "replay a trace");
  std::string run_file, run_events;
  run->add_option("file", run_file, "trace file")->required();
  run->add_option("--events-out", run_events, "write pairing events (JSONL)");

  // diff
  auto* diff = app.add_subcommand("diff", "differential test against the oracle");
  std::string diff_file;
  diff->add_option("file", diff_file, "trace file")->required();

  // audit
  auto* audit = app.add_subcommand("audit", "verify the amortized-cost budgets");
  std::string audit_file, audit_report, audit_csv, audit_phi = "auto";
  double audit_tol = 1e-6;
  bool audit_invariants = false;
  std::uint64_t audit_max_ops = 10000;
  audit->add_option("file", audit_file, "trace file")->required();
  audit->add_option("--report", audit_report, "write per-op report (JSONL)");
  audit->add_option("--csv", audit_csv, "write per-op report (CSV)");
  audit->add_option("--tolerance", audit_tol, "inequality tolerance");
  audit->add_option("--phi-mode", audit_phi,
                    "auto, scratch or incremental potential evaluation");
  audit->add_option("--max-ops", audit_max_ops,
                    "largest trace audited from scratch in auto mode");
  audit->add_flag("--invariants", audit_invariants,
                  "run the structural invariant suite after every op");

  // bench
  auto* bench = app.add_subcommand("bench", "workload benchmark");
  std::string bench_sizes = "1024,4096,16384", bench_mix, bench_csv;
  std::uint32_t bench_seeds = 3;
  std::uint64_t bench_cell = 8192;
  bool bench_audit = false;
  bench->add_option("--sizes", bench_sizes, "comma-separated heap sizes");
  bench->add_option("--mix", bench_mix, "measured-phase op mix");
  bench->add_option("--seeds", bench_seeds, "seeds per size");
  bench->add_option("--ops-per-cell", bench_cell, "measured ops per cell");
  bench->add_option("--csv", bench_csv, "output CSV ('-' for stdout)");
  bench->add_flag("--audit", bench_audit, "also audit and report mean slack");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      pairheap::GeneratorConfig cfg;
      cfg.op_count = gen_ops;
      cfg.seed = gen_seed;
      cfg.survivor_target = gen_survivors;
      if (!gen_mix.empty()) cfg.mix = pairheap::parse_mix(gen_mix);
      if (gen_keys == "perm") {
        cfg.key_dist = pairheap::KeyDist::permutation;
      } else if (gen_keys.rfind("uniform:", 0) == 0) {
        std::string rest = gen_keys.substr(8);
        std::size_t colon = rest.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("--keys expects uniform:LO:HI or perm");
        cfg.key_dist = pairheap::KeyDist::uniform;
        cfg.key_lo = std::stod(rest.substr(0, colon));
        cfg.key_hi = std::stod(rest.substr(colon + 1));
      } else {
        throw std::invalid_argument("--keys expects uniform:LO:HI or perm");
      }
      return cmd_gen(cfg, gen_out);
    }
    if (validate->parsed()) return cmd_validate(validate_file);
    if (run->parsed()) return cmd_run(run_file, run_events);
    if (diff->parsed()) return cmd_diff(diff_file);
    if (audit->parsed()) {
      pairheap::AuditOptions opt;
      opt.tolerance = audit_tol;
      opt.structural_checks = audit_invariants;
      opt.scratch_op_limit = audit_max_ops;
      if (audit_phi == "auto")
        opt.phi_mode = pairheap::PhiMode::automatic;
      else if (audit_phi == "scratch")
        opt.phi_mode = pairheap::PhiMode::scratch;
      else if (audit_phi == "incremental")
        opt.phi_mode = pairheap::PhiMode::incremental;
      else
        throw std::invalid_argument("--phi-mode must be auto, scratch or "
                                    "incremental");
      return cmd_audit(audit_file, audit_report, audit_csv, opt);
    }
    if (bench->parsed()) {
      pairheap::BenchOptions opt;
      opt.seeds = bench_seeds;
      opt.ops_per_cell = bench_cell;
      opt.audit = bench_audit;
      if (!bench_mix.empty()) opt.mix = pairheap::parse_mix(bench_mix);
      std::size_t pos = 0;
      while (pos < bench_sizes.size()) {
        std::size_t end = bench_sizes.find(',', pos);
        if (end == std::string::npos) end = bench_sizes.size();
        opt.sizes.push_back(std::stoull(bench_sizes.substr(pos, end - pos)));
        pos = end + 1;
      }
      return cmd_bench(opt, bench_csv);
    }
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFile;
  } catch (const pairheap::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}
