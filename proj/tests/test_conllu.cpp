#include <doctest.h>

#include <sstream>

#include "dasco/conllu.hpp"
#include "dasco/errors.hpp"
#include "oracles.hpp"

using namespace dasco;

namespace {

// 9-token fixture: two modified noun phrases around a verbal root.
const char* kCircuitFixture =
    "# sent_id = circuit\n"
    "1\tThe\t_\tDET\t_\t_\t3\tdet\t_\t_\n"
    "2\tclever\t_\tADJ\t_\t_\t3\tamod\t_\t_\n"
    "3\tstudent\t_\tNOUN\t_\t_\t5\tnsubj\t_\t_\n"
    "4\tquickly\t_\tADV\t_\t_\t5\tadvmod\t_\t_\n"
    "5\tsolved\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "6\tthe\t_\tDET\t_\t_\t9\tdet\t_\t_\n"
    "7\tsophisticated\t_\tADJ\t_\t_\t9\tamod\t_\t_\n"
    "8\tcircuit\t_\tNOUN\t_\t_\t9\tcompound\t_\t_\n"
    "9\tproblem\t_\tNOUN\t_\t_\t5\tobj\t_\t_\n";

std::vector<DepTree> parse_str(const std::string& text) {
  std::istringstream in(text);
  return parse_conllu(in);
}

}  // namespace

TEST_CASE("minimal two-token sentence parses with root detection") {
  auto trees = parse_str(
      "1\tGood\t_\tADJ\t_\t_\t2\tamod\t_\t_\n"
      "2\tfood\t_\tNOUN\t_\t_\t0\troot\t_\t_\n");
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].root == 2);
  CHECK(trees[0].size() == 2);
  CHECK(trees[0].token(1).form == "Good");
  CHECK(trees[0].token(2).upos == "NOUN");
}

TEST_CASE("cycle between two tokens is rejected") {
  CHECK_THROWS_AS(parse_str("1\ta\t_\tNOUN\t_\t_\t2\tdep\t_\t_\n"
                            "2\tb\t_\tNOUN\t_\t_\t1\tdep\t_\t_\n"),
                  tree_error);
}

TEST_CASE("nine-token fixture parses with root at the verb") {
  auto trees = parse_str(kCircuitFixture);
  REQUIRE(trees.size() == 1);
  const DepTree& t = trees[0];
  CHECK(t.root == 5);
  CHECK(t.sent_id == "circuit");
  CHECK(t.token(3).head == 5);
  CHECK(t.token(8).head == 9);
  CHECK(t.token(9).head == 5);
}

TEST_CASE("multiword ranges and empty nodes are skipped, comments ignored") {
  auto trees = parse_str(
      "# newdoc\n"
      "# sent_id = s1\n"
      "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
      "1.1\telided\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "2\tit\t_\tPRON\t_\t_\t1\tobj\t_\t_\n");
  REQUIRE(trees.size() == 1);
  CHECK(trees[0].size() == 2);
  CHECK(trees[0].sent_id == "s1");
}

TEST_CASE("malformed lines report the line number") {
  try {
    parse_str("1\tonly\tthree\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 1);
  }
  try {
    parse_str("1\tok\t_\tNOUN\t_\t_\t0\troot\t_\t_\n\n"
              "1\tbad\t_\tNOUN\t_\t_\tx\tdep\t_\t_\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("structural validation: multiple roots, head range, self-head") {
  CHECK_THROWS_AS(parse_str("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n"
                            "2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n"),
                  tree_error);
  CHECK_THROWS_AS(parse_str("1\ta\t_\tX\t_\t_\t9\tdep\t_\t_\n"), tree_error);
  CHECK_THROWS_AS(parse_str("1\ta\t_\tX\t_\t_\t1\tdep\t_\t_\n"), tree_error);
}

TEST_CASE("parse-serialize-parse is a fixed point on retained columns") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    DepTree tree = oracle::random_tree(rng);
    tree.sent_id = "t" + std::to_string(i);
    auto reparsed = parse_str(to_conllu(tree));
    REQUIRE(reparsed.size() == 1);
    const DepTree& r = reparsed[0];
    REQUIRE(r.size() == tree.size());
    CHECK(r.sent_id == tree.sent_id);
    CHECK(r.root == tree.root);
    for (int k = 1; k <= tree.size(); ++k) {
      CHECK(r.token(k).form == tree.token(k).form);
      CHECK(r.token(k).upos == tree.token(k).upos);
      CHECK(r.token(k).head == tree.token(k).head);
      CHECK(r.token(k).deprel == tree.token(k).deprel);
    }
    CHECK(to_conllu(r) == to_conllu(tree));
  }
}

TEST_CASE("candidate targets are the nouns and pronouns") {
  auto trees = parse_str(kCircuitFixture);
  CHECK(candidate_targets(trees[0]) == std::vector<int>{3, 8, 9});

  auto verbs = parse_str("1\trun\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
                         "2\tfast\t_\tADV\t_\t_\t1\tadvmod\t_\t_\n");
  CHECK(candidate_targets(verbs[0]).empty());

  // randomized corpora against a one-line UPOS filter
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    DepTree tree = oracle::random_tree(rng);
    std::vector<int> expected;
    for (const Token& t : tree.tokens)
      if (t.upos == "NOUN" || t.upos == "PROPN" || t.upos == "PRON")
        expected.push_back(t.index);
    CHECK(candidate_targets(tree) == expected);
  }
}

TEST_CASE("annotations join to trees and enforce span rules") {
  auto trees = parse_str(kCircuitFixture);

  SUBCASE("valid records round-trip, including zero aspects") {
    std::istringstream ann(
        R"({"sample_id":"circuit","aspects":[{"start":3,"end":3,"polarity":"pos"},{"start":8,"end":9,"polarity":"NEG"}]})"
        "\n"
        R"({"sample_id":"also","conllu_ref":"circuit","aspects":[]})"
        "\n");
    auto samples = load_annotations(ann, trees);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].aspects.size() == 2);
    CHECK(samples[0].aspects[0].polarity == kPositive);
    CHECK(samples[0].aspects[1].polarity == kNegative);
    CHECK(samples[1].aspects.empty());
    CHECK(samples[1].tree.size() == 9);
  }

  SUBCASE("end before start is rejected") {
    std::istringstream ann(
        R"({"sample_id":"circuit","aspects":[{"start":4,"end":3,"polarity":"POS"}]})" "\n");
    CHECK_THROWS_AS(load_annotations(ann, trees), annotation_error);
  }

  SUBCASE("span outside the sentence is rejected") {
    std::istringstream ann(
        R"({"sample_id":"circuit","aspects":[{"start":9,"end":10,"polarity":"POS"}]})" "\n");
    CHECK_THROWS_AS(load_annotations(ann, trees), annotation_error);
  }

  SUBCASE("overlapping spans are rejected") {
    std::istringstream ann(
        R"({"sample_id":"circuit","aspects":[{"start":3,"end":5,"polarity":"POS"},{"start":5,"end":6,"polarity":"NEG"}]})"
        "\n");
    CHECK_THROWS_AS(load_annotations(ann, trees), annotation_error);
  }

  SUBCASE("unknown sample id is rejected") {
    std::istringstream ann(R"({"sample_id":"nope","aspects":[]})" "\n");
    CHECK_THROWS_AS(load_annotations(ann, trees), annotation_error);
  }

  SUBCASE("unknown polarity label is rejected") {
    std::istringstream ann(
        R"({"sample_id":"circuit","aspects":[{"start":3,"end":3,"polarity":"MEH"}]})" "\n");
    CHECK_THROWS_AS(load_annotations(ann, trees), annotation_error);
  }

  SUBCASE("image features and scene graphs are optional extras") {
    std::istringstream ann(
        R"({"sample_id":"circuit","aspects":[],"image_feature":[0.25,-1.5],"scene_graph":["circuit","board"]})"
        "\n");
    auto samples = load_annotations(ann, trees);
    REQUIRE(samples[0].image_feature.has_value());
    CHECK(samples[0].image_feature->size() == 2);
    REQUIRE(samples[0].scene_graph.has_value());
    CHECK((*samples[0].scene_graph)[1] == "board");
  }
}

TEST_CASE("polarity labels are case-insensitive and strict") {
  CHECK(parse_polarity("pos") == kPositive);
  CHECK(parse_polarity("Neu") == kNeutral);
  CHECK(parse_polarity("NEG") == kNegative);
  CHECK_THROWS_AS(parse_polarity("positive???"), annotation_error);
  CHECK(polarity_name(kNeutral) == "NEU");
}
