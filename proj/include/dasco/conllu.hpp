#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dasco {

// Polarity codes used throughout: 0 positive, 1 neutral, 2 negative.
enum Polarity : int { kPositive = 0, kNeutral = 1, kNegative = 2 };

int parse_polarity(const std::string& label);      // "POS"/"NEU"/"NEG", any case
std::string polarity_name(int polarity);

struct Token {
  int index = 0;        // 1-based position in the sentence
  std::string form;
  std::string upos;
  int head = 0;         // 0 = root
  std::string deprel;
};

// A validated dependency parse: exactly one root, heads in range, acyclic
// and connected.
struct DepTree {
  std::vector<Token> tokens;
  int root = 0;          // 1-based index of the token whose head is 0
  std::string sent_id;   // from "# sent_id = ..." or the sentence ordinal

  int size() const { return static_cast<int>(tokens.size()); }
  const Token& token(int index_1based) const { return tokens[index_1based - 1]; }
};

struct AspectSpan {
  int start = 0;   // 1-based, inclusive
  int end = 0;     // inclusive
  int polarity = kNeutral;
};

// One training/evaluation unit: a parsed sentence plus its gold aspects and
// the optional toy image surrogate and scene-graph token list.
struct AnnotatedSample {
  std::string sample_id;
  DepTree tree;
  std::vector<AspectSpan> aspects;
  std::optional<std::vector<double>> image_feature;
  std::optional<std::vector<std::string>> scene_graph;
};

// Parses CoNLL-U text: 10 tab-separated columns, blank-line sentence
// separation, '#' comments; multiword ranges ("1-2") and empty nodes ("1.1")
// are skipped. Columns ID, FORM, UPOS, HEAD, DEPREL are retained. Throws
// parse_error with a line number on malformed input and tree_error (naming
// the sentence) on structural violations.
std::vector<DepTree> parse_conllu(std::istream& in);
std::vector<DepTree> parse_conllu_file(const std::string& path);

// Serializes the retained columns back to CoNLL-U ("_" elsewhere).
// parse -> serialize -> parse is a fixed point on those columns.
std::string to_conllu(const DepTree& tree);

void validate_tree(const DepTree& tree);

// Indices of tokens whose UPOS is NOUN, PROPN or PRON, ascending.
std::vector<int> candidate_targets(const DepTree& tree);

// Reads JSON-lines annotation records {sample_id, conllu_ref, aspects:
// [{start, end, polarity}], image_feature?, scene_graph?} and joins them to
// the given trees. The join key is conllu_ref when present, else sample_id.
std::vector<AnnotatedSample> load_annotations(std::istream& in,
                                              const std::vector<DepTree>& trees);

// Convenience: parse <dir>/corpus.conllu + <dir>/annotations.jsonl.
std::vector<AnnotatedSample> load_corpus_dir(const std::string& dir);

}  // namespace dasco
