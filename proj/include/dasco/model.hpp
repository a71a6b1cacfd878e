#pragma once

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dasco/config.hpp"
#include "dasco/conllu.hpp"
#include "dasco/contrast.hpp"
#include "dasco/graphs.hpp"
#include "dasco/metrics.hpp"
#include "dasco/scope.hpp"
#include "dasco/tensor.hpp"

namespace dasco {

enum class Task { Mate, Masc };
std::string task_name(Task t);

// Token-string vocabulary with reserved unknown and mask entries, assigned
// in first-seen corpus order (sentence tokens, then scene-graph tokens).
struct Vocab {
  static constexpr int kUnkId = 0;
  static constexpr int kMaskId = 1;
  static constexpr const char* kUnkToken = "<unk>";
  static constexpr const char* kMaskToken = "[MASK]";

  std::vector<std::string> tokens;
  std::map<std::string, int> index;

  static Vocab build(const std::vector<AnnotatedSample>& corpus);
  int id(const std::string& token) const;  // UNK fallback
  int size() const { return static_cast<int>(tokens.size()); }
};

// Named parameter tensors; std::map keeps iteration order deterministic.
struct ParamStore {
  std::map<std::string, Tensor> tensors;

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
};

// Leaf values of a tape, one per parameter.
struct BoundParams {
  std::map<std::string, Value> values;
  Value at(const std::string& name) const;
};

BoundParams bind(Tape& tape, const ParamStore& params);

struct Model {
  Task task = Task::Mate;
  TrainConfig cfg;
  Vocab vocab;
  ParamStore params;
};

// Seeded parameter initialization; identical (task, vocab, config) yields
// identical parameters.
Model init_model(Task task, const Vocab& vocab, const TrainConfig& cfg);

// Embedding lookup with UNK fallback, plus the optional mixing layer.
Value encode(Tape& tape, const BoundParams& bp, const Model& m,
             const std::vector<std::string>& forms);

// g = sigmoid([H_syn || H_sem] W_g + b_g); F = g*H_syn + (1-g)*H_sem.
Value gated_fuse(Value h_sem, Value h_syn, Value w_g, Value b_g);

// concat(pool(F, mask), pool(H_sem, mask), pool(H, all-ones)) -> [3D]
Value target_features(Value fused, Value h_sem, Value h, const MaskRow& mask);

struct SentenceRep {
  Value h;      // encoder output [S, D]
  Value h_sem;  // SemGNN output
  Value h_syn;  // SynGNN output
  Value fused;  // gated fusion
};

SentenceRep forward_sentence(Tape& tape, const BoundParams& bp, const Model& m,
                             const DepTree& tree);

// (1/N) sum BCE(y_i, p_i) + lambda * asi
Value mate_loss(Tape& tape, const std::vector<Value>& preds, const std::vector<int>& labels,
                double lambda, Value asi);

// -(1/M) sum log p_j[y_j] + lambda * asi; class_probs rows are rank-1 [3]
Value masc_loss(Tape& tape, const std::vector<Value>& class_probs, const std::vector<int>& gold,
                double lambda, Value asi);

// Full per-sample objective for the model's task. Throws parameter_error on
// samples with no candidates (MATE) or no aspects (MASC); the training loop
// skips those.
Value task_sample_loss(Tape& tape, const BoundParams& bp, const Model& m,
                       const AnnotatedSample& sample);

struct EpochMetrics {
  int epoch = 0;
  double mean_loss = 0.0;
  PRF prf;            // MATE
  MascMetrics masc;   // MASC
};

struct TrainResult {
  Model model;
  std::vector<EpochMetrics> trace;
  int skipped = 0;  // samples skipped per epoch for lacking targets/aspects
};

// Plain SGD over shuffled samples, deterministic under cfg.seed. Throws
// divergence_error on a non-finite loss.
TrainResult train(Task task, const std::vector<AnnotatedSample>& corpus,
                  const TrainConfig& cfg);

// Candidates with predicted probability > 0.5; runs of adjacent accepted
// candidates merge into one span.
std::vector<std::pair<int, int>> predict_mate_spans(const Model& m,
                                                    const AnnotatedSample& sample);

// Polarity of one aspect span under the model (argmax of the 3-way head).
int classify_masc(const Model& m, const AnnotatedSample& sample, int span_start, int span_end);

struct JmasaPrediction {
  std::string sample_id;
  std::vector<std::tuple<int, int, int>> pairs;  // (start, end, polarity)
};

// MATE spans fed to the MASC classifier, no further training.
std::vector<JmasaPrediction> jmasa_infer(const Model& mate, const Model& masc,
                                         const std::vector<AnnotatedSample>& corpus);

void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace dasco
