#include <doctest.h>

#include <sstream>

#include "dasco/errors.hpp"
#include "dasco/scope.hpp"
#include "oracles.hpp"

using namespace dasco;

namespace {

DepTree circuit_tree() {
  std::istringstream in(
      "# sent_id = circuit\n"
      "1\tThe\t_\tDET\t_\t_\t3\tdet\t_\t_\n"
      "2\tclever\t_\tADJ\t_\t_\t3\tamod\t_\t_\n"
      "3\tstudent\t_\tNOUN\t_\t_\t5\tnsubj\t_\t_\n"
      "4\tquickly\t_\tADV\t_\t_\t5\tadvmod\t_\t_\n"
      "5\tsolved\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
      "6\tthe\t_\tDET\t_\t_\t9\tdet\t_\t_\n"
      "7\tsophisticated\t_\tADJ\t_\t_\t9\tamod\t_\t_\n"
      "8\tcircuit\t_\tNOUN\t_\t_\t9\tcompound\t_\t_\n"
      "9\tproblem\t_\tNOUN\t_\t_\t5\tobj\t_\t_\n");
  return parse_conllu(in)[0];
}

DepTree single_token_tree() {
  DepTree t;
  t.sent_id = "one";
  Token tok;
  tok.index = 1;
  tok.form = "hi";
  tok.upos = "INTJ";
  tok.head = 0;
  tok.deprel = "root";
  t.tokens = {tok};
  t.root = 1;
  return t;
}

}  // namespace

TEST_CASE("path set: children plus head, per the subject example") {
  DepTree tree = circuit_tree();
  CHECK(path_set(tree, 3) == std::set<int>{1, 2, 3, 5});
  CHECK(path_set(single_token_tree(), 1) == std::set<int>{1});
  CHECK_THROWS_AS(path_set(tree, 10), shape_error);
  CHECK_THROWS_AS(path_set(tree, 0), shape_error);
}

TEST_CASE("path set equals brute-force reachability on random trees") {
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    DepTree tree = oracle::random_tree(rng);
    for (int t = 1; t <= tree.size(); ++t) CHECK(path_set(tree, t) == oracle::path_set(tree, t));
  }
}

TEST_CASE("scope intervals on the fixture") {
  DepTree tree = circuit_tree();
  Scope subject = compute_scope(tree, 3);
  CHECK(subject.start == 1);
  CHECK(subject.end == 5);  // interval pulls in token 4 by contiguity
  CHECK(subject.anchor == 3);

  Scope root_scope = compute_scope(tree, 5);
  CHECK(root_scope.start == 1);
  CHECK(root_scope.end == 9);

  Scope one = compute_scope(single_token_tree(), 1);
  CHECK(one.start == 1);
  CHECK(one.end == 1);
}

TEST_CASE("multi-token span unions the path sets and anchors at the span head") {
  DepTree tree = circuit_tree();
  Scope s = compute_scope(tree, 8, 9);
  // path(8) = {8, 9}; path(9) = {6, 7, 8, 9, 5}
  CHECK(s.start == 5);
  CHECK(s.end == 9);
  CHECK(s.anchor == 9);  // head of 9 (=5) is outside the span; head of 8 (=9) is inside
  CHECK(s.target_start == 8);
  CHECK(s.target_end == 9);
}

TEST_CASE("scope equals the interval of the oracle path set on 1000 random trees") {
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    DepTree tree = oracle::random_tree(rng);
    for (int t = 1; t <= tree.size(); ++t) {
      auto expected = oracle::path_set(tree, t);
      Scope s = compute_scope(tree, t);
      CHECK(s.start == *expected.begin());
      CHECK(s.end == *expected.rbegin());
      // target inside interval, and every path-set member inside it
      CHECK(s.start <= t);
      CHECK(t <= s.end);
      for (int m : expected) {
        CHECK(s.start <= m);
        CHECK(m <= s.end);
      }
    }
  }
}

TEST_CASE("scope masks render intervals as binary rows") {
  DepTree tree = circuit_tree();
  auto mask = scope_mask({compute_scope(tree, 3)}, 9);
  REQUIRE(mask.size() == 1);
  CHECK(mask[0] == MaskRow{1, 1, 1, 1, 1, 0, 0, 0, 0});

  Scope full;
  full.target_start = full.target_end = full.anchor = 1;
  full.start = 1;
  full.end = 4;
  CHECK(scope_mask({full}, 4)[0] == MaskRow{1, 1, 1, 1});

  // row sums equal interval lengths on random scopes
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const int s = rng.uniform_int(1, 12);
    Scope sc;
    sc.start = rng.uniform_int(1, s);
    sc.end = rng.uniform_int(sc.start, s);
    sc.target_start = sc.target_end = sc.anchor = sc.start;
    auto rows = scope_mask({sc}, s);
    int sum = 0;
    for (auto v : rows[0]) sum += v;
    CHECK(sum == sc.end - sc.start + 1);
  }

  Scope oob;
  oob.start = 1;
  oob.end = 10;
  CHECK_THROWS_AS(scope_mask({oob}, 9), shape_error);
}
