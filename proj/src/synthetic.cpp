#include "dasco/synthetic.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "dasco/errors.hpp"
#include "dasco/rng.hpp"

namespace dasco {

using nlohmann::json;

void SynthSpec::validate() const {
  if (sentences < 1) throw parameter_error("sentences must be >= 1");
  if (vocab < 20) throw parameter_error("vocabulary size must be >= 20");
  if (distractor_rate < 0.0 || distractor_rate > 1.0)
    throw parameter_error("distractor_rate must be in [0, 1]");
  if (two_aspect_rate < 0.0 || two_aspect_rate > 1.0)
    throw parameter_error("two_aspect_rate must be in [0, 1]");
}

SynthSpec synth_spec_from_json(const json& j) {
  if (!j.is_object()) throw parameter_error("synthetic spec must be a JSON object");
  static const std::set<std::string> known = {"seed", "sentences", "vocab",
                                              "distractor_rate", "two_aspect_rate"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw parameter_error("unknown spec key: " + it.key());
  SynthSpec s;
  try {
    s.seed = j.value("seed", s.seed);
    s.sentences = j.value("sentences", s.sentences);
    s.vocab = j.value("vocab", s.vocab);
    s.distractor_rate = j.value("distractor_rate", s.distractor_rate);
    s.two_aspect_rate = j.value("two_aspect_rate", s.two_aspect_rate);
  } catch (const json::exception& e) {
    throw parameter_error(std::string("bad spec value: ") + e.what());
  }
  s.validate();
  return s;
}

json synth_spec_to_json(const SynthSpec& spec) {
  json j;
  j["seed"] = spec.seed;
  j["sentences"] = spec.sentences;
  j["vocab"] = spec.vocab;
  j["distractor_rate"] = spec.distractor_rate;
  j["two_aspect_rate"] = spec.two_aspect_rate;
  return j;
}

namespace {

constexpr int kImageDim = 16;

// Fixed pseudo-visual embedding per token type; the image feature of a
// sentence is the normalized sum over its tokens, so matched image-text
// pairs are deterministically related and mismatched ones are not.
std::vector<double> token_visual(std::uint64_t seed, const std::string& token) {
  Rng rng(seed ^ (fnv1a64(token) * 0x2545F4914F6CDD1Dull));
  std::vector<double> v(kImageDim);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

std::vector<double> sentence_image(std::uint64_t seed, const std::vector<std::string>& forms) {
  std::vector<double> v(kImageDim, 0.0);
  for (const auto& f : forms) {
    auto g = token_visual(seed, f);
    for (int i = 0; i < kImageDim; ++i) v[i] += g[i];
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (auto& x : v) x /= norm;
  return v;
}

struct Lexicon {
  std::vector<std::string> aspects, objects;
  std::vector<std::string> cues[3];  // indexed by polarity
};

Lexicon build_lexicon(int vocab) {
  Lexicon lx;
  const int content = vocab - 5;  // "the", "is", "are", "but", "near"
  const int n_asp = content * 3 / 10;
  const int n_obj = content * 2 / 10;
  const int rem = content - n_asp - n_obj;
  const int n_neu = rem / 3;
  const int n_neg = rem / 3;
  const int n_pos = rem - n_neu - n_neg;
  for (int i = 0; i < n_asp; ++i) lx.aspects.push_back("asp" + std::to_string(i));
  for (int i = 0; i < n_obj; ++i) lx.objects.push_back("obj" + std::to_string(i));
  for (int i = 0; i < n_pos; ++i) lx.cues[kPositive].push_back("pos" + std::to_string(i));
  for (int i = 0; i < n_neu; ++i) lx.cues[kNeutral].push_back("neu" + std::to_string(i));
  for (int i = 0; i < n_neg; ++i) lx.cues[kNegative].push_back("neg" + std::to_string(i));
  return lx;
}

Token make_token(int index, std::string form, std::string upos, int head, std::string deprel) {
  Token t;
  t.index = index;
  t.form = std::move(form);
  t.upos = std::move(upos);
  t.head = head;
  t.deprel = std::move(deprel);
  return t;
}

const std::string& pick(Rng& rng, const std::vector<std::string>& items) {
  return items[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(items.size()) - 1))];
}

}  // namespace

SynthCorpus gen_synthetic(const SynthSpec& spec) {
  spec.validate();
  Lexicon lx = build_lexicon(spec.vocab);
  Rng rng(spec.seed);
  SynthCorpus corpus;
  std::ostringstream conllu;
  std::ostringstream jsonl;

  for (int n = 1; n <= spec.sentences; ++n) {
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "s%05d", n);
    AnnotatedSample sample;
    sample.sample_id = idbuf;
    DepTree& tree = sample.tree;
    tree.sent_id = sample.sample_id;
    std::vector<std::string> scene;

    if (rng.uniform() < spec.two_aspect_rate) {
      // "the ASP1 is CUE1 but ASP2 are CUE2" with opposite polarities
      const int c1 = rng.uniform() < 0.5 ? kPositive : kNegative;
      const int c2 = c1 == kPositive ? kNegative : kPositive;
      const std::string asp1 = pick(rng, lx.aspects);
      const std::string cue1 = pick(rng, lx.cues[c1]);
      const std::string asp2 = pick(rng, lx.aspects);
      const std::string cue2 = pick(rng, lx.cues[c2]);
      tree.tokens = {
          make_token(1, "the", "DET", 2, "det"),
          make_token(2, asp1, "NOUN", 4, "nsubj"),
          make_token(3, "is", "AUX", 4, "cop"),
          make_token(4, cue1, "ADJ", 0, "root"),
          make_token(5, "but", "CCONJ", 8, "cc"),
          make_token(6, asp2, "NOUN", 8, "nsubj"),
          make_token(7, "are", "AUX", 8, "cop"),
          make_token(8, cue2, "ADJ", 4, "conj"),
      };
      tree.root = 4;
      sample.aspects = {{2, 2, c1}, {6, 6, c2}};
      scene = {asp1, asp2};
    } else {
      // "the ASP is CUE near the [DCUE] OBJ"
      const int c = rng.uniform_int(0, 2);
      const std::string asp = pick(rng, lx.aspects);
      const std::string cue = pick(rng, lx.cues[c]);
      const std::string obj = pick(rng, lx.objects);
      const bool distract = rng.uniform() < spec.distractor_rate;
      std::string dcue;
      if (distract) dcue = pick(rng, lx.cues[rng.uniform_int(0, 2)]);
      const int obj_pos = distract ? 8 : 7;
      tree.tokens = {
          make_token(1, "the", "DET", 2, "det"),
          make_token(2, asp, "NOUN", 4, "nsubj"),
          make_token(3, "is", "AUX", 4, "cop"),
          make_token(4, cue, "ADJ", 0, "root"),
          make_token(5, "near", "ADP", obj_pos, "case"),
          make_token(6, "the", "DET", obj_pos, "det"),
      };
      if (distract) tree.tokens.push_back(make_token(7, dcue, "ADJ", 8, "amod"));
      tree.tokens.push_back(make_token(obj_pos, obj, "NOUN", 4, "nmod"));
      tree.root = 4;
      sample.aspects = {{2, 2, c}};
      scene = {asp, obj};
    }
    validate_tree(tree);
    std::vector<std::string> forms;
    for (const Token& t : tree.tokens) forms.push_back(t.form);
    sample.image_feature = sentence_image(spec.seed, forms);
    sample.scene_graph = scene;

    conllu << to_conllu(tree);
    json rec;
    rec["sample_id"] = sample.sample_id;
    rec["conllu_ref"] = sample.sample_id;
    json aspects = json::array();
    for (const AspectSpan& a : sample.aspects)
      aspects.push_back({{"start", a.start}, {"end", a.end}, {"polarity", polarity_name(a.polarity)}});
    rec["aspects"] = aspects;
    rec["image_feature"] = *sample.image_feature;
    rec["scene_graph"] = *sample.scene_graph;
    jsonl << rec.dump() << "\n";

    corpus.samples.push_back(std::move(sample));
  }
  corpus.conllu_text = conllu.str();
  corpus.annotations_jsonl = jsonl.str();
  return corpus;
}

}  // namespace dasco
