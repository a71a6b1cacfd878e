#include "dasco/conllu.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "dasco/errors.hpp"

namespace dasco {

using nlohmann::json;

int parse_polarity(const std::string& label) {
  std::string up;
  for (char c : label) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "POS") return kPositive;
  if (up == "NEU") return kNeutral;
  if (up == "NEG") return kNegative;
  throw annotation_error("unknown polarity label: " + label);
}

std::string polarity_name(int polarity) {
  switch (polarity) {
    case kPositive: return "POS";
    case kNeutral: return "NEU";
    case kNegative: return "NEG";
    default: throw annotation_error("polarity code out of range: " + std::to_string(polarity));
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

void finish_sentence(std::vector<Token>& tokens, std::string& sent_id, int ordinal,
                     std::vector<DepTree>& out) {
  if (tokens.empty()) return;
  DepTree tree;
  tree.tokens = std::move(tokens);
  tree.sent_id = sent_id.empty() ? std::to_string(ordinal) : sent_id;
  validate_tree(tree);
  for (const Token& t : tree.tokens)
    if (t.head == 0) tree.root = t.index;
  out.push_back(std::move(tree));
  tokens.clear();
  sent_id.clear();
}

}  // namespace

void validate_tree(const DepTree& tree) {
  const int n = tree.size();
  if (n == 0) throw tree_error("sentence " + tree.sent_id + ": empty");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = tree.tokens[i];
    if (t.index != i + 1)
      throw tree_error("sentence " + tree.sent_id + ": token ids not contiguous at " +
                       std::to_string(t.index));
    if (t.head < 0 || t.head > n)
      throw tree_error("sentence " + tree.sent_id + ": head " + std::to_string(t.head) +
                       " out of range [0," + std::to_string(n) + "]");
    if (t.head == t.index)
      throw tree_error("sentence " + tree.sent_id + ": token " + std::to_string(t.index) +
                       " is its own head");
    if (t.head == 0) ++roots;
  }
  if (roots != 1)
    throw tree_error("sentence " + tree.sent_id + ": " + std::to_string(roots) +
                     " roots, expected exactly 1");
  // Reachability from the root covers all tokens iff the head graph is a tree.
  std::vector<std::vector<int>> children(n + 1);
  int root = 0;
  for (const Token& t : tree.tokens) {
    if (t.head == 0)
      root = t.index;
    else
      children[t.head].push_back(t.index);
  }
  std::vector<char> seen(n + 1, 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++reached;
    for (int c : children[v]) {
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  if (reached != n)
    throw tree_error("sentence " + tree.sent_id + ": head graph has a cycle (only " +
                     std::to_string(reached) + " of " + std::to_string(n) +
                     " tokens reachable from root)");
}

std::vector<DepTree> parse_conllu(std::istream& in) {
  std::vector<DepTree> out;
  std::vector<Token> tokens;
  std::string sent_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_sentence(tokens, sent_id, static_cast<int>(out.size()) + 1, out);
      continue;
    }
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (body.rfind("sent_id", 0) == 0) {
        std::size_t eq = body.find('=');
        if (eq != std::string::npos) sent_id = trim(body.substr(eq + 1));
      }
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 10)
      throw parse_error(line_no, "expected 10 tab-separated columns, got " +
                                     std::to_string(fields.size()));
    const std::string& id = fields[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos)
      continue;  // multiword-token range or empty node
    if (!all_digits(id)) throw parse_error(line_no, "bad token id: " + id);
    if (!all_digits(fields[6])) throw parse_error(line_no, "bad head: " + fields[6]);
    Token t;
    t.index = std::stoi(id);
    t.form = fields[1];
    t.upos = fields[3];
    t.head = std::stoi(fields[6]);
    t.deprel = fields[7];
    tokens.push_back(std::move(t));
  }
  finish_sentence(tokens, sent_id, static_cast<int>(out.size()) + 1, out);
  return out;
}

std::vector<DepTree> parse_conllu_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(0, "cannot open " + path);
  return parse_conllu(in);
}

std::string to_conllu(const DepTree& tree) {
  std::ostringstream os;
  os << "# sent_id = " << tree.sent_id << "\n";
  for (const Token& t : tree.tokens) {
    os << t.index << '\t' << t.form << "\t_\t" << t.upos << "\t_\t_\t" << t.head << '\t'
       << t.deprel << "\t_\t_\n";
  }
  os << "\n";
  return os.str();
}

std::vector<int> candidate_targets(const DepTree& tree) {
  std::vector<int> out;
  for (const Token& t : tree.tokens)
    if (t.upos == "NOUN" || t.upos == "PROPN" || t.upos == "PRON") out.push_back(t.index);
  return out;
}

std::vector<AnnotatedSample> load_annotations(std::istream& in,
                                              const std::vector<DepTree>& trees) {
  std::map<std::string, const DepTree*> by_id;
  for (const DepTree& t : trees) by_id[t.sent_id] = &t;

  std::vector<AnnotatedSample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw parse_error(line_no, std::string("bad JSON: ") + e.what());
    }
    AnnotatedSample s;
    s.sample_id = rec.value("sample_id", "");
    if (s.sample_id.empty()) throw annotation_error("record without sample_id (line " +
                                                    std::to_string(line_no) + ")");
    const std::string key = rec.value("conllu_ref", s.sample_id);
    auto it = by_id.find(key);
    if (it == by_id.end()) throw annotation_error("unknown sample_id: " + key);
    s.tree = *it->second;

    const int n = s.tree.size();
    if (rec.contains("aspects")) {
      for (const auto& a : rec["aspects"]) {
        AspectSpan span;
        span.start = a.at("start").get<int>();
        span.end = a.at("end").get<int>();
        span.polarity = parse_polarity(a.at("polarity").get<std::string>());
        if (span.start < 1 || span.end > n || span.end < span.start)
          throw annotation_error("sample " + s.sample_id + ": aspect span [" +
                                 std::to_string(span.start) + "," + std::to_string(span.end) +
                                 "] out of range for " + std::to_string(n) + " tokens");
        s.aspects.push_back(span);
      }
    }
    std::sort(s.aspects.begin(), s.aspects.end(),
              [](const AspectSpan& a, const AspectSpan& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < s.aspects.size(); ++i)
      if (s.aspects[i].start <= s.aspects[i - 1].end)
        throw annotation_error("sample " + s.sample_id + ": overlapping aspect spans");

    if (rec.contains("image_feature") && !rec["image_feature"].is_null())
      s.image_feature = rec["image_feature"].get<std::vector<double>>();
    if (rec.contains("scene_graph") && !rec["scene_graph"].is_null())
      s.scene_graph = rec["scene_graph"].get<std::vector<std::string>>();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AnnotatedSample> load_corpus_dir(const std::string& dir) {
  auto trees = parse_conllu_file(dir + "/corpus.conllu");
  std::ifstream ann(dir + "/annotations.jsonl");
  if (!ann) throw parse_error(0, "cannot open " + dir + "/annotations.jsonl");
  return load_annotations(ann, trees);
}

}  // namespace dasco
