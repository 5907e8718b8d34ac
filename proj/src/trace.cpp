#include "pairheap/trace.hpp"

#include <charconv>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace pairheap {

using json = nlohmann::json;

Operation Operation::make_heap(std::uint64_t heap_out) {
  Operation op;
  op.kind = OpKind::make_heap;
  op.heap_out = heap_out;
  return op;
}

Operation Operation::insert(std::uint64_t heap, double key,
                            std::uint64_t node_out) {
  Operation op;
  op.kind = OpKind::insert;
  op.heap = heap;
  op.key = key;
  op.node_out = node_out;
  return op;
}

Operation Operation::meld(std::uint64_t h1, std::uint64_t h2,
                          std::uint64_t heap_out) {
  Operation op;
  op.kind = OpKind::meld;
  op.heap = h1;
  op.heap2 = h2;
  op.heap_out = heap_out;
  return op;
}

Operation Operation::find_min(std::uint64_t heap) {
  Operation op;
  op.kind = OpKind::find_min;
  op.heap = heap;
  return op;
}

Operation Operation::extract_min(std::uint64_t heap) {
  Operation op;
  op.kind = OpKind::extract_min;
  op.heap = heap;
  return op;
}

Operation Operation::decrease_key(std::uint64_t heap, std::uint64_t node,
                                  double delta) {
  Operation op;
  op.kind = OpKind::decrease_key;
  op.heap = heap;
  op.node = node;
  op.delta = delta;
  return op;
}

Operation Operation::erase(std::uint64_t heap, std::uint64_t node) {
  Operation op;
  op.kind = OpKind::erase;
  op.heap = heap;
  op.node = node;
  return op;
}

std::string format_double(double value) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::uint64_t get_id(const json& j, const char* field, std::size_t line) {
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(line, std::string("missing field \"") + field + "\"");
  if (!it->is_number_integer() || it->is_number_float())
    throw ParseError(line, std::string("field \"") + field +
                               "\" must be a positive integer");
  if (it->is_number_unsigned()) {
    std::uint64_t v = it->get<std::uint64_t>();
    if (v == 0)
      throw ParseError(line, std::string("field \"") + field +
                                 "\" must be a positive integer");
    return v;
  }
  throw ParseError(line, std::string("field \"") + field +
                             "\" must be a positive integer");
}

double get_number(const json& j, const char* field, std::size_t line) {
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(line, std::string("missing field \"") + field + "\"");
  if (!it->is_number())
    throw ParseError(line, std::string("field \"") + field +
                               "\" must be a number");
  double v = it->get<double>();
  if (!std::isfinite(v))
    throw ParseError(line, std::string("field \"") + field +
                               "\" must be finite");
  return v;
}

void check_field_count(const json& j, std::size_t expected, std::size_t line) {
  if (j.size() != expected)
    throw ParseError(line, "unexpected extra fields in record");
}

Operation parse_line(const std::string& line_text, std::size_t line) {
  json j = json::parse(line_text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ParseError(line, "not a JSON object");
  auto op_it = j.find("op");
  if (op_it == j.end() || !op_it->is_string())
    throw ParseError(line, "missing \"op\" field");
  const std::string op = op_it->get<std::string>();

  if (op == "make_heap") {
    check_field_count(j, 2, line);
    return Operation::make_heap(get_id(j, "heap_out", line));
  }
  if (op == "insert") {
    check_field_count(j, 4, line);
    return Operation::insert(get_id(j, "heap", line),
                             get_number(j, "key", line),
                             get_id(j, "node_out", line));
  }
  if (op == "meld") {
    check_field_count(j, 4, line);
    return Operation::meld(get_id(j, "heap1", line), get_id(j, "heap2", line),
                           get_id(j, "heap_out", line));
  }
  if (op == "find_min") {
    check_field_count(j, 2, line);
    return Operation::find_min(get_id(j, "heap", line));
  }
  if (op == "extract_min") {
    check_field_count(j, 2, line);
    return Operation::extract_min(get_id(j, "heap", line));
  }
  if (op == "decrease_key") {
    check_field_count(j, 4, line);
    double delta = get_number(j, "delta", line);
    if (delta < 0.0) throw ParseError(line, "delta must be nonnegative");
    return Operation::decrease_key(get_id(j, "heap", line),
                                   get_id(j, "node", line), delta);
  }
  if (op == "delete") {
    check_field_count(j, 3, line);
    return Operation::erase(get_id(j, "heap", line), get_id(j, "node", line));
  }
  throw ParseError(line, "unknown op \"" + op + "\"");
}

}  // namespace

Trace parse_trace(std::string_view text) {
  Trace trace;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++line;
    pos = end + 1;
    std::size_t b = raw.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
      if (pos > text.size()) break;
      continue;  // blank line
    }
    try {
      trace.ops.push_back(parse_line(std::string(raw), line));
    } catch (const json::exception& e) {
      throw ParseError(line, e.what());
    }
    if (pos > text.size()) break;
  }
  return trace;
}

std::string serialize_op(const Operation& op) {
  std::string out = "{\"op\":\"";
  auto id = [](std::uint64_t v) { return std::to_string(v); };
  switch (op.kind) {
    case OpKind::make_heap:
      out += "make_heap\",\"heap_out\":" + id(op.heap_out);
      break;
    case OpKind::insert:
      out += "insert\",\"heap\":" + id(op.heap) +
             ",\"key\":" + format_double(op.key) +
             ",\"node_out\":" + id(op.node_out);
      break;
    case OpKind::meld:
      out += "meld\",\"heap1\":" + id(op.heap) + ",\"heap2\":" + id(op.heap2) +
             ",\"heap_out\":" + id(op.heap_out);
      break;
    case OpKind::find_min:
      out += "find_min\",\"heap\":" + id(op.heap);
      break;
    case OpKind::extract_min:
      out += "extract_min\",\"heap\":" + id(op.heap);
      break;
    case OpKind::decrease_key:
      out += "decrease_key\",\"heap\":" + id(op.heap) +
             ",\"node\":" + id(op.node) +
             ",\"delta\":" + format_double(op.delta);
      break;
    case OpKind::erase:
      out += "delete\",\"heap\":" + id(op.heap) + ",\"node\":" + id(op.node);
      break;
  }
  out += "}";
  return out;
}

std::string serialize_trace(const Trace& trace) {
  std::string out;
  for (const Operation& op : trace.ops) {
    out += serialize_op(op);
    out += '\n';
  }
  return out;
}

// validate_trace lives in replay.cpp: exact validation needs the real
// extract_min semantics to know which handle each removal retires.

}  // namespace pairheap
