#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dasco/config.hpp"
#include "dasco/conllu.hpp"
#include "dasco/model.hpp"
#include "dasco/scope.hpp"
#include "dasco/tensor.hpp"

namespace dasco {

// Positive (T, V, S) vs negative (T_N, V, S_N) with aspect tokens replaced by
// the mask token in the text and in the scene-graph token list.
struct AoePair {
  int sample_index = -1;
  std::string sample_id;
  std::vector<std::string> pos_text, neg_text;
  std::vector<std::string> pos_scene, neg_scene;
};

// Positive (T, V, S) vs negative (T, V_N, S) where V_N is the image feature
// of a uniformly sampled different sample.
struct ItmPair {
  int sample_index = -1;
  int donor_index = -1;
  std::string sample_id;
  std::string donor_id;
};

// Sentence features replicated per aspect with a mask row per aspect; mask
// rows cover each aspect's scope interval.
struct AsscInstance {
  int sample_index = -1;
  ScopeMask masks;
  std::vector<int> labels;
};

// One pair per sample with at least one aspect; samples without aspects are
// skipped.
std::vector<AoePair> build_aoe_pairs(const std::vector<AnnotatedSample>& corpus);

// Deterministic under seed; requires >= 2 samples carrying image features.
std::vector<ItmPair> build_itm_pairs(const std::vector<AnnotatedSample>& corpus,
                                     std::uint64_t seed);

std::vector<AsscInstance> build_assc_instances(const std::vector<AnnotatedSample>& corpus);

// Eq-style binary cross-entropy on a predicted probability; identical form
// for the aspect-consistency and image-text matching objectives.
Value aoe_loss(Value pred, int label);
Value itm_loss(Value pred, int label);

// Replicates the sentence features across the instance's aspects, pools each
// through its mask row, classifies 3-way, and averages the negative
// log-likelihood of the gold classes.
Value assc_loss(Value h, const ScopeMask& masks, const std::vector<int>& labels,
                Value classifier_w, Value classifier_b);

// L_p = L_Q + L_AOE + L_ITM + L_ASSC, summed left to right.
Value joint_pretrain_loss(Value l_q, Value l_aoe, Value l_itm, Value l_assc);

struct PretrainModel {
  TrainConfig cfg;
  Vocab vocab;
  int image_dim = 0;
  ParamStore params;
};

struct PretrainResult {
  PretrainModel model;
  double aoe_accuracy = 0.0;   // held-out
  double itm_accuracy = 0.0;
  double assc_accuracy = 0.0;
  double l_q = 0.0;            // final train-split loss decomposition
  double l_aoe = 0.0;
  double l_itm = 0.0;
  double l_assc = 0.0;
  double l_p = 0.0;
};

// Joint training of the three heads over a shared embedding. The Qformer
// slot is pluggable and defaults to zero.
PretrainResult train_pretrain(const std::vector<AnnotatedSample>& corpus,
                              const TrainConfig& cfg, double qformer_term = 0.0);

void save_pretrain_model(const PretrainModel& m, const std::string& path);

}  // namespace dasco
