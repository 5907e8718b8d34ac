#include "doctest.h"

#include <vector>

#include "pairheap/generator.hpp"
#include "pairheap/replay.hpp"
#include "pairheap/trace.hpp"

using namespace pairheap;

namespace {

std::vector<double> child_keys(const Forest& f, NodeId x) {
  std::vector<double> keys;
  for (NodeId c = f.node(x).left_child; c != 0; c = f.node(c).right_sib)
    keys.push_back(f.key_of(c));
  return keys;
}

// Nine ops that build the eight-child example heap: root 1 with children
// 4,3,7,2,5,9,8,6 left to right.
const char* kEightChildTrace =
    "{\"op\":\"make_heap\",\"heap_out\":1}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":1,\"node_out\":1}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":6,\"node_out\":2}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":8,\"node_out\":3}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":9,\"node_out\":4}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":5,\"node_out\":5}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":2,\"node_out\":6}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":7,\"node_out\":7}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":3,\"node_out\":8}\n"
    "{\"op\":\"insert\",\"heap\":1,\"key\":4,\"node_out\":9}\n";

}  // namespace

TEST_CASE("parse_trace reads single records") {
  Trace t = parse_trace("{\"op\":\"make_heap\",\"heap_out\":1}\n");
  REQUIRE(t.ops.size() == 1);
  CHECK(t.ops[0].kind == OpKind::make_heap);
  CHECK(t.ops[0].heap_out == 1);

  t = parse_trace(
      "{\"op\":\"decrease_key\",\"heap\":2,\"node\":7,\"delta\":1.5}");
  REQUIRE(t.ops.size() == 1);
  CHECK(t.ops[0].kind == OpKind::decrease_key);
  CHECK(t.ops[0].heap == 2);
  CHECK(t.ops[0].node == 7);
  CHECK(t.ops[0].delta == 1.5);
}

TEST_CASE("parse_trace rejects malformed records") {
  // negative delta violates the nonnegative-delta contract at parse time
  CHECK_THROWS_AS(
      parse_trace(
          "{\"op\":\"decrease_key\",\"heap\":1,\"node\":1,\"delta\":-1}"),
      ParseError);
  CHECK_THROWS_AS(parse_trace("{\"op\":\"insert\",\"heap\":1,\"key\":1}"),
                  ParseError);  // missing node_out
  CHECK_THROWS_AS(
      parse_trace("{\"op\":\"insert\",\"heap\":1,\"key\":1,\"node_out\":1,"
                  "\"extra\":2}"),
      ParseError);
  CHECK_THROWS_AS(parse_trace("{\"op\":\"find_min\",\"heap\":0}"), ParseError);
  CHECK_THROWS_AS(parse_trace("{\"op\":\"find_min\",\"heap\":-3}"), ParseError);
  CHECK_THROWS_AS(parse_trace("{\"op\":\"find_min\",\"heap\":1.5}"), ParseError);
  CHECK_THROWS_AS(parse_trace("{\"op\":\"nonsense\",\"heap\":1}"), ParseError);
  CHECK_THROWS_AS(parse_trace("not json at all"), ParseError);
  CHECK_THROWS_AS(
      parse_trace(
          "{\"op\":\"insert\",\"heap\":1,\"key\":1e999,\"node_out\":1}"),
      ParseError);  // key overflows to infinity

  try {
    parse_trace("{\"op\":\"make_heap\",\"heap_out\":1}\ngarbage\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("the eight-child example trace replays to the documented shape") {
  Trace t = parse_trace(kEightChildTrace);
  REQUIRE(t.ops.size() == 10);
  CHECK(validate_trace(t).empty());
  ForestReplayer rep;
  for (const Operation& op : t.ops) REQUIRE(rep.apply(op).ok);
  const Forest& f = rep.forest();
  NodeId root = f.root_of(rep.forest_heap(1));
  CHECK(f.key_of(root) == 1);
  CHECK(child_keys(f, root) == std::vector<double>{4, 3, 7, 2, 5, 9, 8, 6});
}

TEST_CASE("serialize then parse is the identity on traces") {
  GeneratorConfig cfg;
  cfg.op_count = 400;
  cfg.seed = 11;
  Trace t = generate_random_trace(cfg);
  std::string text = serialize_trace(t);
  Trace back = parse_trace(text);
  REQUIRE(back.ops.size() == t.ops.size());
  for (std::size_t i = 0; i < t.ops.size(); ++i) {
    CHECK(back.ops[i].kind == t.ops[i].kind);
    CHECK(back.ops[i].heap == t.ops[i].heap);
    CHECK(back.ops[i].heap2 == t.ops[i].heap2);
    CHECK(back.ops[i].heap_out == t.ops[i].heap_out);
    CHECK(back.ops[i].node == t.ops[i].node);
    CHECK(back.ops[i].node_out == t.ops[i].node_out);
    CHECK(back.ops[i].key == t.ops[i].key);
    CHECK(back.ops[i].delta == t.ops[i].delta);
  }
  // parse then serialize is the identity on canonical text
  CHECK(serialize_trace(back) == text);
}

TEST_CASE("empty trace serializes to empty output") {
  CHECK(serialize_trace(Trace{}) == "");
  CHECK(parse_trace("").ops.empty());
  CHECK(validate_trace(Trace{}).empty());
}

TEST_CASE("keys round-trip through shortest decimal form") {
  Trace t;
  t.ops.push_back(Operation::make_heap(1));
  t.ops.push_back(Operation::insert(1, 0.1, 1));
  t.ops.push_back(Operation::insert(1, 1.0 / 3.0, 2));
  t.ops.push_back(Operation::insert(1, -12345.6789e-30, 3));
  Trace back = parse_trace(serialize_trace(t));
  CHECK(back.ops[1].key == 0.1);
  CHECK(back.ops[2].key == 1.0 / 3.0);
  CHECK(back.ops[3].key == -12345.6789e-30);
}

TEST_CASE("validate_trace reports liveness violations") {
  SUBCASE("heap id used after meld invalidates it") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::make_heap(2));
    t.ops.push_back(Operation::meld(1, 2, 3));
    t.ops.push_back(Operation::insert(1, 5, 1));
    auto v = validate_trace(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].op_index == 3);
    CHECK(v[0].message.find("stale or unknown heap") != std::string::npos);
  }
  SUBCASE("extract from a never-filled heap") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::extract_min(1));
    auto v = validate_trace(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("empty heap") != std::string::npos);
  }
  SUBCASE("meld aliasing") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::meld(1, 1, 2));
    auto v = validate_trace(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("alias") != std::string::npos);
  }
  SUBCASE("unknown and extracted node handles") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::insert(1, 5, 1));
    t.ops.push_back(Operation::decrease_key(1, 99, 1));
    t.ops.push_back(Operation::extract_min(1));
    t.ops.push_back(Operation::erase(1, 1));  // node 1 already extracted
    auto v = validate_trace(t);
    REQUIRE(v.size() == 2);
    CHECK(v[0].op_index == 2);
    CHECK(v[1].op_index == 4);
  }
  SUBCASE("node in the wrong heap") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::make_heap(2));
    t.ops.push_back(Operation::insert(1, 5, 1));
    t.ops.push_back(Operation::decrease_key(2, 1, 0));
    auto v = validate_trace(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("not in heap") != std::string::npos);
  }
  SUBCASE("negative delta built programmatically") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::insert(1, 5, 1));
    t.ops.push_back(Operation::decrease_key(1, 1, -2));
    auto v = validate_trace(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("negative delta") != std::string::npos);
  }
  SUBCASE("output id reuse") {
    Trace t;
    t.ops.push_back(Operation::make_heap(1));
    t.ops.push_back(Operation::make_heap(1));
    auto v = validate_trace(t);
    REQUIRE(v.size() == 1);
  }
}
