#include "pairheap/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "live_set.hpp"
#include "pairheap/replay.hpp"
#include "pairheap/rng.hpp"

namespace pairheap {

MixWeights parse_mix(const std::string& spec) {
  MixWeights mix;
  if (spec.empty()) return mix;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string::npos) end = spec.size();
    std::string item = spec.substr(pos, end - pos);
    pos = end + 1;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("mix item \"" + item + "\" lacks '='");
    std::string name = item.substr(0, eq);
    double value = std::stod(item.substr(eq + 1));
    if (!(value >= 0.0) || !std::isfinite(value))
      throw std::invalid_argument("mix weight for \"" + name +
                                  "\" must be finite and nonnegative");
    const OpKind kinds[] = {OpKind::make_heap,   OpKind::insert,
                            OpKind::meld,        OpKind::find_min,
                            OpKind::extract_min, OpKind::decrease_key,
                            OpKind::erase};
    bool found = false;
    for (OpKind k : kinds) {
      if (name == to_string(k)) {
        mix[k] = value;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("unknown op kind \"" + name + "\"");
  }
  return mix;
}

namespace {

void check_config(const GeneratorConfig& cfg) {
  double total = 0;
  for (double w : cfg.mix.w) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw GeneratorError("mix weights must be finite and nonnegative");
    total += w;
  }
  if (cfg.op_count == 0) return;  // empty trace, nothing else matters
  if (total <= 0.0) throw GeneratorError("mix weights are all zero");
  if (cfg.mix[OpKind::make_heap] <= 0.0)
    throw GeneratorError(
        "infeasible mix: make_heap weight must be positive, nothing else is "
        "applicable to an empty forest");
  if (!(cfg.survivor_target >= 0.0 && cfg.survivor_target <= 1.0))
    throw GeneratorError("survivor target must be in [0, 1]");
  if (cfg.survivor_target < 1.0 && cfg.mix[OpKind::insert] > 0.0 &&
      cfg.mix[OpKind::extract_min] <= 0.0 && cfg.mix[OpKind::erase] <= 0.0)
    throw GeneratorError(
        "infeasible mix: survivor target below 1 needs extract_min or delete "
        "weight");
  if (!(std::isfinite(cfg.key_lo) && std::isfinite(cfg.key_hi) &&
        cfg.key_lo <= cfg.key_hi))
    throw GeneratorError("key range must be finite with lo <= hi");
}

}  // namespace

Trace generate_random_trace(const GeneratorConfig& cfg) {
  check_config(cfg);
  Trace trace;
  trace.ops.reserve(cfg.op_count);
  if (cfg.op_count == 0) return trace;

  SplitMix64 rng(cfg.seed);
  ForestReplayer rep;
  detail::LiveSet heaps;  // live trace heap ids
  detail::LiveSet nodes;  // live trace node ids
  std::uint64_t next_heap = 1, next_node = 1;
  std::uint64_t inserted = 0, removed = 0;

  std::vector<double> perm_keys;
  std::size_t perm_pos = 0;
  if (cfg.key_dist == KeyDist::permutation) {
    perm_keys.resize(cfg.op_count);
    std::iota(perm_keys.begin(), perm_keys.end(), 1.0);
    for (std::size_t i = perm_keys.size(); i-- > 1;)
      std::swap(perm_keys[i], perm_keys[rng.bounded(i + 1)]);
  }
  auto draw_key = [&]() {
    if (cfg.key_dist == KeyDist::permutation) return perm_keys[perm_pos++];
    return cfg.key_lo + rng.uniform01() * (cfg.key_hi - cfg.key_lo);
  };
  auto draw_delta = [&]() {
    if (cfg.key_dist == KeyDist::permutation)
      return static_cast<double>(rng.bounded(5));
    return rng.uniform01() * (cfg.key_hi - cfg.key_lo) * 0.25;
  };

  // Picks a nonempty heap; only called when some node is live.
  auto pick_nonempty = [&]() -> std::uint64_t {
    for (int t = 0; t < 64; ++t) {
      std::uint64_t h = heaps.at(rng.bounded(heaps.size()));
      if (rep.forest().heap_size(rep.forest_heap(h)) > 0) return h;
    }
    for (std::size_t i = 0; i < heaps.size(); ++i) {
      std::uint64_t h = heaps.at(i);
      if (rep.forest().heap_size(rep.forest_heap(h)) > 0) return h;
    }
    return 0;  // unreachable while nodes are live
  };

  const double rho = 1.0 - cfg.survivor_target;  // target removed/inserted
  const bool drain_all = cfg.survivor_target == 0.0;

  for (std::uint64_t step = 0; step < cfg.op_count; ++step) {
    std::uint64_t ops_left = cfg.op_count - step;

    double boost = 1.0;
    if (cfg.survivor_target >= 1.0) {
      boost = 0.0;
    } else if (inserted > 0) {
      double r_cur = static_cast<double>(removed) / inserted;
      if (r_cur < rho - 0.02)
        boost = 8.0;
      else if (r_cur > rho + 0.02)
        boost = 0.125;
    }

    bool tail_drain = drain_all && ops_left <= nodes.size() + 2;

    double w[7];
    w[0] = cfg.mix[OpKind::make_heap];
    w[1] = heaps.empty() ? 0.0 : cfg.mix[OpKind::insert];
    w[2] = heaps.size() < 2 ? 0.0 : cfg.mix[OpKind::meld];
    w[3] = nodes.empty() ? 0.0 : cfg.mix[OpKind::find_min];
    w[4] = nodes.empty() ? 0.0 : cfg.mix[OpKind::extract_min] * boost;
    w[5] = nodes.empty() ? 0.0 : cfg.mix[OpKind::decrease_key];
    w[6] = nodes.empty() ? 0.0 : cfg.mix[OpKind::erase] * boost;
    if (tail_drain) {
      // Spend the remaining budget removing what is left.
      w[0] = w[1] = w[2] = w[3] = w[5] = 0.0;
      if (!nodes.empty()) {
        if (w[4] == 0.0 && w[6] == 0.0) w[4] = 1.0;
      } else {
        w[0] = 1.0;
      }
    }

    double total = 0;
    for (double x : w) total += x;
    if (total <= 0.0) w[0] = total = 1.0;  // make_heap is always applicable

    double pick = rng.uniform01() * total;
    int kind = -1, last_positive = 0;
    for (int k = 0; k < 7; ++k) {
      if (w[k] <= 0.0) continue;
      last_positive = k;
      if (pick < w[k]) {
        kind = k;
        break;
      }
      pick -= w[k];
    }
    if (kind < 0) kind = last_positive;  // fp drift fell off the end

    Operation op;
    switch (static_cast<OpKind>(kind)) {
      case OpKind::make_heap:
        op = Operation::make_heap(next_heap++);
        break;
      case OpKind::insert:
        op = Operation::insert(heaps.at(rng.bounded(heaps.size())), draw_key(),
                               next_node++);
        break;
      case OpKind::meld: {
        std::size_t i = rng.bounded(heaps.size());
        std::size_t j = rng.bounded(heaps.size() - 1);
        if (j >= i) ++j;
        op = Operation::meld(heaps.at(i), heaps.at(j), next_heap++);
        break;
      }
      case OpKind::find_min:
        op = Operation::find_min(pick_nonempty());
        break;
      case OpKind::extract_min:
        op = Operation::extract_min(pick_nonempty());
        break;
      case OpKind::decrease_key: {
        std::uint64_t p = nodes.at(rng.bounded(nodes.size()));
        NodeId fp = rep.forest_node(p);
        std::uint64_t h = rep.trace_heap(rep.forest().heap_of(fp));
        op = Operation::decrease_key(h, p, draw_delta());
        break;
      }
      case OpKind::erase: {
        std::uint64_t p = nodes.at(rng.bounded(nodes.size()));
        NodeId fp = rep.forest_node(p);
        std::uint64_t h = rep.trace_heap(rep.forest().heap_of(fp));
        op = Operation::erase(h, p);
        break;
      }
    }

    ApplyOutcome outcome = rep.apply(op);
    if (!outcome.ok)
      throw std::logic_error("generator emitted an inapplicable op");
    switch (op.kind) {
      case OpKind::make_heap:
        heaps.add(op.heap_out);
        break;
      case OpKind::insert:
        nodes.add(op.node_out);
        ++inserted;
        break;
      case OpKind::meld:
        heaps.remove(op.heap);
        heaps.remove(op.heap2);
        heaps.add(op.heap_out);
        break;
      case OpKind::extract_min:
        nodes.remove(outcome.node);
        ++removed;
        break;
      case OpKind::erase:
        nodes.remove(op.node);
        ++removed;
        break;
      default:
        break;
    }
    trace.ops.push_back(op);
  }
  return trace;
}

}  // namespace pairheap
