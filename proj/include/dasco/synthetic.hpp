#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dasco/conllu.hpp"

namespace dasco {

// Parameters of the seeded corpus generator. Sentences are template-built
// with hand-crafted dependency trees; each aspect's polarity is fully
// determined by a cue word inside that aspect's scope, so scope-filtered
// pooling can reach perfect accuracy while sentence-level pooling cannot on
// two-aspect sentences (the two aspects always carry opposite polarities).
struct SynthSpec {
  std::uint64_t seed = 42;
  int sentences = 100;
  int vocab = 100;                // token-type budget, >= 20
  double distractor_rate = 0.3;   // out-of-scope sentiment cue probability
  double two_aspect_rate = 0.5;

  void validate() const;  // throws parameter_error on an infeasible spec
};

SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

struct SynthCorpus {
  std::vector<AnnotatedSample> samples;
  std::string conllu_text;
  std::string annotations_jsonl;
};

SynthCorpus gen_synthetic(const SynthSpec& spec);

}  // namespace dasco
