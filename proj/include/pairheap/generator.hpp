#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "pairheap/trace.hpp"

namespace pairheap {

// Weights per operation kind, indexed by OpKind.
struct MixWeights {
  std::array<double, 7> w{0.06, 0.38, 0.04, 0.08, 0.22, 0.16, 0.06};

  double& operator[](OpKind k) { return w[static_cast<std::size_t>(k)]; }
  double operator[](OpKind k) const { return w[static_cast<std::size_t>(k)]; }
};

// Parses "insert=3,extract_min=1,delete=0.5" style specs; unlisted kinds
// keep their default weight. Throws std::invalid_argument on bad input.
MixWeights parse_mix(const std::string& spec);

enum class KeyDist : std::uint8_t {
  uniform,      // uniform reals over [key_lo, key_hi)
  permutation,  // a random permutation of 1..op_count, all keys distinct
};

struct GeneratorConfig {
  std::uint64_t op_count = 1000;
  MixWeights mix{};
  KeyDist key_dist = KeyDist::uniform;
  double key_lo = 0.0;
  double key_hi = 1e6;
  // Fraction of inserted nodes intended to remain at trace end; steers the
  // extract/delete rate. 0 drains everything, 1 suppresses removals.
  double survivor_target = 0.3;
  std::uint64_t seed = 1;
};

class GeneratorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Deterministic in the seed. The generator co-executes the trace on a real
// forest, so every emitted operation is applicable by construction and the
// result always passes validate_trace.
Trace generate_random_trace(const GeneratorConfig& config);

}  // namespace pairheap
