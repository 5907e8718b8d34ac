#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairheap/forest.hpp"

namespace pairheap {

// One record of the line-delimited trace format. Output ids (heap_out,
// node_out) are explicit so a trace is self-describing and replay never
// depends on allocator order.
struct Operation {
  OpKind kind{};
  std::uint64_t heap = 0;      // target heap; meld: first argument
  std::uint64_t heap2 = 0;     // meld: second argument
  std::uint64_t heap_out = 0;  // make_heap, meld
  std::uint64_t node = 0;      // decrease_key, delete
  std::uint64_t node_out = 0;  // insert
  double key = 0.0;            // insert
  double delta = 0.0;          // decrease_key

  static Operation make_heap(std::uint64_t heap_out);
  static Operation insert(std::uint64_t heap, double key,
                          std::uint64_t node_out);
  static Operation meld(std::uint64_t h1, std::uint64_t h2,
                        std::uint64_t heap_out);
  static Operation find_min(std::uint64_t heap);
  static Operation extract_min(std::uint64_t heap);
  static Operation decrease_key(std::uint64_t heap, std::uint64_t node,
                                double delta);
  static Operation erase(std::uint64_t heap, std::uint64_t node);
};

struct Trace {
  std::vector<Operation> ops;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

Trace parse_trace(std::string_view text);
std::string serialize_op(const Operation& op);
std::string serialize_trace(const Trace& trace);

struct Violation {
  std::size_t op_index = 0;
  std::string message;
};

// Symbolic replay tracking live ids. Reports stale-id use, meld aliasing,
// empty-heap find/extract, unknown or out-of-heap node handles, negative
// deltas, and reused output ids. An op that violates is skipped, so later
// messages can be knock-on effects of earlier ones.
std::vector<Violation> validate_trace(const Trace& trace);

}  // namespace pairheap
