#include "dasco/pretrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "dasco/errors.hpp"
#include "dasco/rng.hpp"

namespace dasco {

using nlohmann::json;

std::vector<AoePair> build_aoe_pairs(const std::vector<AnnotatedSample>& corpus) {
  std::vector<AoePair> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const AnnotatedSample& s = corpus[i];
    if (s.aspects.empty()) continue;
    AoePair pair;
    pair.sample_index = static_cast<int>(i);
    pair.sample_id = s.sample_id;
    std::set<std::string> aspect_forms;
    for (const Token& t : s.tree.tokens) pair.pos_text.push_back(t.form);
    pair.neg_text = pair.pos_text;
    for (const AspectSpan& a : s.aspects)
      for (int p = a.start; p <= a.end; ++p) {
        pair.neg_text[static_cast<std::size_t>(p - 1)] = Vocab::kMaskToken;
        aspect_forms.insert(s.tree.token(p).form);
      }
    if (s.scene_graph) {
      pair.pos_scene = *s.scene_graph;
      pair.neg_scene = pair.pos_scene;
      for (auto& tok : pair.neg_scene)
        if (aspect_forms.count(tok)) tok = Vocab::kMaskToken;
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<ItmPair> build_itm_pairs(const std::vector<AnnotatedSample>& corpus,
                                     std::uint64_t seed) {
  std::vector<int> with_image;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (corpus[i].image_feature) with_image.push_back(static_cast<int>(i));
  if (with_image.size() < 2)
    throw annotation_error("image-text pairing needs at least 2 samples with image features, got " +
                           std::to_string(with_image.size()));
  Rng rng(seed);
  std::vector<ItmPair> out;
  for (int idx : with_image) {
    ItmPair p;
    p.sample_index = idx;
    p.sample_id = corpus[idx].sample_id;
    // uniform over the other image-bearing samples
    int pos = rng.uniform_int(0, static_cast<int>(with_image.size()) - 2);
    if (with_image[pos] >= idx) ++pos;
    p.donor_index = with_image[pos];
    p.donor_id = corpus[p.donor_index].sample_id;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<AsscInstance> build_assc_instances(const std::vector<AnnotatedSample>& corpus) {
  std::vector<AsscInstance> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const AnnotatedSample& s = corpus[i];
    if (s.aspects.empty()) continue;
    AsscInstance inst;
    inst.sample_index = static_cast<int>(i);
    std::vector<Scope> scopes;
    for (const AspectSpan& a : s.aspects) {
      scopes.push_back(compute_scope(s.tree, a.start, a.end));
      inst.labels.push_back(a.polarity);
    }
    inst.masks = scope_mask(scopes, s.tree.size());
    out.push_back(std::move(inst));
  }
  return out;
}

Value aoe_loss(Value pred, int label) { return binary_cross_entropy(pred, label); }
Value itm_loss(Value pred, int label) { return binary_cross_entropy(pred, label); }

Value assc_loss(Value h, const ScopeMask& masks, const std::vector<int>& labels,
                Value classifier_w, Value classifier_b) {
  if (masks.empty()) throw parameter_error("assc_loss: no aspects");
  if (masks.size() != labels.size())
    throw shape_error("assc_loss: " + std::to_string(masks.size()) + " masks vs " +
                      std::to_string(labels.size()) + " labels");
  Tape& tape = *h.tape;
  Value sum = tape.scalar(0.0);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    Value pooled = masked_mean_pool(h, masks[i]);
    Value probs = row(softmax_rows(reshape(affine(pooled, classifier_w, classifier_b), {1, 3})), 0);
    sum = sub(sum, vlog(clamp(pick(probs, labels[i]), 1e-12, 1.0)));
  }
  return scale(sum, 1.0 / static_cast<double>(masks.size()));
}

Value joint_pretrain_loss(Value l_q, Value l_aoe, Value l_itm, Value l_assc) {
  return add(add(add(l_q, l_aoe), l_itm), l_assc);
}

// ---- training ---------------------------------------------------------------------

namespace {

int corpus_image_dim(const std::vector<AnnotatedSample>& corpus) {
  int dim = 0;
  for (const auto& s : corpus) {
    if (!s.image_feature) continue;
    const int d = static_cast<int>(s.image_feature->size());
    if (dim == 0) dim = d;
    if (d != dim)
      throw annotation_error("sample " + s.sample_id + ": image feature length " +
                             std::to_string(d) + " differs from " + std::to_string(dim));
  }
  return dim;
}

PretrainModel init_pretrain_model(const Vocab& vocab, int image_dim, const TrainConfig& cfg) {
  PretrainModel m;
  m.cfg = cfg;
  m.vocab = vocab;
  m.image_dim = image_dim;
  Rng rng(cfg.seed);
  const int d = cfg.dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  auto uniform_tensor = [&rng](Shape shape, double b) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (auto& v : t.data) v = rng.uniform(-b, b);
    return t;
  };
  m.params.tensors["emb"] = uniform_tensor({vocab.size(), d}, bound);
  const int cat = 2 * d + image_dim;  // [text-pool || image || scene-pool]
  const double cat_bound = 1.0 / std::sqrt(static_cast<double>(cat));
  for (const char* head : {"aoe", "itm"}) {
    const std::string p(head);
    m.params.tensors[p + "_w"] = uniform_tensor({cat}, cat_bound);
    m.params.tensors[p + "_p"] = uniform_tensor({image_dim, d}, bound);
    m.params.tensors[p + "_r"] = uniform_tensor({image_dim, d}, bound);
    m.params.tensors[p + "_b"] = Tensor::zeros({});
  }
  m.params.tensors["assc_w"] = uniform_tensor({d, 3}, bound);
  m.params.tensors["assc_b"] = Tensor::zeros({3});
  return m;
}

Value mean_pool_tokens(Tape& tape, const BoundParams& bp, const PretrainModel& m,
                       const std::vector<std::string>& forms) {
  if (forms.empty()) return tape.input({m.cfg.dim}, std::vector<double>(m.cfg.dim, 0.0));
  std::vector<int> ids;
  ids.reserve(forms.size());
  for (const auto& f : forms) ids.push_back(m.vocab.id(f));
  Value h = gather_rows(bp.at("emb"), ids);
  return masked_mean_pool(h, MaskRow(forms.size(), 1));
}

// sigmoid(w . [t || v || s] + (P t) . v + (R s) . v + b); the bilinear terms
// let the head compare text/scene content against the image vector, which a
// purely linear map over the concatenation cannot do.
Value matching_head(Tape& tape, const BoundParams& bp, const std::string& prefix,
                    Value text_pool, const std::vector<double>& image, Value scene_pool) {
  Value v = tape.input({static_cast<int>(image.size())}, image);
  Value lin = dot(bp.at(prefix + "_w"), concat({text_pool, v, scene_pool}));
  Value inter = add(dot(matvec(bp.at(prefix + "_p"), text_pool), v),
                    dot(matvec(bp.at(prefix + "_r"), scene_pool), v));
  return sigmoid(add(add(lin, inter), bp.at(prefix + "_b")));
}

struct SampleParts {
  const AoePair* aoe = nullptr;
  const ItmPair* itm = nullptr;
  const AsscInstance* assc = nullptr;
};

Value encode_tokens(Tape& tape, const BoundParams& bp, const PretrainModel& m,
                    const std::vector<std::string>& forms) {
  (void)tape;
  std::vector<int> ids;
  ids.reserve(forms.size());
  for (const auto& f : forms) ids.push_back(m.vocab.id(f));
  return gather_rows(bp.at("emb"), ids);
}

}  // namespace

PretrainResult train_pretrain(const std::vector<AnnotatedSample>& corpus,
                              const TrainConfig& cfg, double qformer_term) {
  cfg.validate();
  if (corpus.size() < 2)
    throw parameter_error("pretraining needs at least 2 samples, got " +
                          std::to_string(corpus.size()));
  const int image_dim = corpus_image_dim(corpus);

  auto aoe_pairs = build_aoe_pairs(corpus);
  auto itm_pairs = build_itm_pairs(corpus, cfg.seed ^ 0xA24BAED4963EE407ull);
  auto assc_instances = build_assc_instances(corpus);

  PretrainResult result;
  result.model = init_pretrain_model(Vocab::build(corpus), image_dim, cfg);
  PretrainModel& m = result.model;

  // Per-sample task lookup.
  std::vector<SampleParts> parts(corpus.size());
  for (const auto& p : aoe_pairs) parts[p.sample_index].aoe = &p;
  for (const auto& p : itm_pairs) parts[p.sample_index].itm = &p;
  for (const auto& i : assc_instances) parts[i.sample_index].assc = &i;

  // Held-out split by sample.
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(cfg.seed ^ 0x6A09E667F3BCC909ull);
  split_rng.shuffle(order);
  const int holdout = std::max(1, static_cast<int>(std::floor(
                              cfg.holdout_frac * static_cast<double>(corpus.size()))));
  std::vector<int> test_idx(order.begin(), order.begin() + holdout);
  std::vector<int> train_idx(order.begin() + holdout, order.end());
  if (train_idx.empty()) throw parameter_error("pretraining split left no training samples");

  auto sample_losses = [&](Tape& tape, const BoundParams& bp, int idx)
      -> std::array<Value, 3> {
    const AnnotatedSample& s = corpus[idx];
    const SampleParts& sp = parts[idx];
    Value zero = tape.scalar(0.0);
    std::array<Value, 3> out{zero, zero, zero};
    std::vector<double> no_image(static_cast<std::size_t>(image_dim), 0.0);
    std::vector<std::string> no_scene;
    if (sp.aoe) {
      const auto& image = s.image_feature ? *s.image_feature : no_image;
      Value pos = matching_head(tape, bp, "aoe",
                                mean_pool_tokens(tape, bp, m, sp.aoe->pos_text), image,
                                mean_pool_tokens(tape, bp, m, sp.aoe->pos_scene));
      Value neg = matching_head(tape, bp, "aoe",
                                mean_pool_tokens(tape, bp, m, sp.aoe->neg_text), image,
                                mean_pool_tokens(tape, bp, m, sp.aoe->neg_scene));
      out[0] = scale(add(aoe_loss(pos, 1), aoe_loss(neg, 0)), 0.5);
    }
    if (sp.itm) {
      std::vector<std::string> forms;
      for (const Token& t : s.tree.tokens) forms.push_back(t.form);
      const auto& scene = s.scene_graph ? *s.scene_graph : no_scene;
      Value text_pool = mean_pool_tokens(tape, bp, m, forms);
      Value scene_pool = mean_pool_tokens(tape, bp, m, scene);
      Value pos = matching_head(tape, bp, "itm", text_pool, *s.image_feature, scene_pool);
      Value neg = matching_head(tape, bp, "itm", text_pool,
                                *corpus[sp.itm->donor_index].image_feature, scene_pool);
      out[1] = scale(add(itm_loss(pos, 1), itm_loss(neg, 0)), 0.5);
    }
    if (sp.assc) {
      std::vector<std::string> forms;
      for (const Token& t : s.tree.tokens) forms.push_back(t.form);
      Value h = encode_tokens(tape, bp, m, forms);
      out[2] = assc_loss(h, sp.assc->masks, sp.assc->labels, bp.at("assc_w"), bp.at("assc_b"));
    }
    return out;
  };

  // Joint SGD over the training split.
  Rng shuffle_rng(cfg.seed ^ 0xBB67AE8584CAA73Bull);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(train_idx);
    for (int idx : train_idx) {
      Tape tape;
      BoundParams bp = bind(tape, m.params);
      auto losses = sample_losses(tape, bp, idx);
      Value total = joint_pretrain_loss(tape.scalar(qformer_term), losses[0], losses[1],
                                        losses[2]);
      if (!std::isfinite(total.scalar()))
        throw divergence_error("non-finite pretraining loss at epoch " + std::to_string(epoch));
      backward(total);
      for (auto& [name, tensor] : m.params.tensors) {
        auto grad = bp.at(name).grad();
        for (std::size_t i = 0; i < tensor.data.size(); ++i)
          tensor.data[i] -= cfg.lr * grad[i];
      }
    }
  }

  // Held-out accuracies.
  auto classify = [&](int idx) {
    Tape tape;
    BoundParams bp = bind(tape, m.params);
    const AnnotatedSample& s = corpus[idx];
    const SampleParts& sp = parts[idx];
    std::vector<double> no_image(static_cast<std::size_t>(image_dim), 0.0);
    int aoe_correct = 0, aoe_total = 0, itm_correct = 0, itm_total = 0;
    int assc_correct = 0, assc_total = 0;
    if (sp.aoe) {
      const auto& image = s.image_feature ? *s.image_feature : no_image;
      double pos = matching_head(tape, bp, "aoe",
                                 mean_pool_tokens(tape, bp, m, sp.aoe->pos_text), image,
                                 mean_pool_tokens(tape, bp, m, sp.aoe->pos_scene))
                       .scalar();
      double neg = matching_head(tape, bp, "aoe",
                                 mean_pool_tokens(tape, bp, m, sp.aoe->neg_text), image,
                                 mean_pool_tokens(tape, bp, m, sp.aoe->neg_scene))
                       .scalar();
      aoe_total = 2;
      aoe_correct = (pos > 0.5 ? 1 : 0) + (neg <= 0.5 ? 1 : 0);
    }
    if (sp.itm) {
      std::vector<std::string> forms;
      for (const Token& t : s.tree.tokens) forms.push_back(t.form);
      std::vector<std::string> no_scene;
      const auto& scene = s.scene_graph ? *s.scene_graph : no_scene;
      Value text_pool = mean_pool_tokens(tape, bp, m, forms);
      Value scene_pool = mean_pool_tokens(tape, bp, m, scene);
      double pos = matching_head(tape, bp, "itm", text_pool, *s.image_feature, scene_pool).scalar();
      double neg = matching_head(tape, bp, "itm", text_pool,
                                 *corpus[sp.itm->donor_index].image_feature, scene_pool)
                       .scalar();
      itm_total = 2;
      itm_correct = (pos > 0.5 ? 1 : 0) + (neg <= 0.5 ? 1 : 0);
    }
    if (sp.assc) {
      std::vector<std::string> forms;
      for (const Token& t : s.tree.tokens) forms.push_back(t.form);
      Value h = encode_tokens(tape, bp, m, forms);
      for (std::size_t a = 0; a < sp.assc->masks.size(); ++a) {
        Value pooled = masked_mean_pool(h, sp.assc->masks[a]);
        Value probs =
            row(softmax_rows(reshape(affine(pooled, bp.at("assc_w"), bp.at("assc_b")), {1, 3})), 0);
        auto d = probs.data();
        int best = 0;
        for (int c = 1; c < 3; ++c)
          if (d[c] > d[best]) best = c;
        ++assc_total;
        if (best == sp.assc->labels[a]) ++assc_correct;
      }
    }
    return std::array<int, 6>{aoe_correct, aoe_total, itm_correct,
                              itm_total, assc_correct, assc_total};
  };

  std::array<long, 6> tallies{};
  for (int idx : test_idx) {
    auto c = classify(idx);
    for (int i = 0; i < 6; ++i) tallies[i] += c[i];
  }
  result.aoe_accuracy = tallies[1] ? static_cast<double>(tallies[0]) / tallies[1] : 0.0;
  result.itm_accuracy = tallies[3] ? static_cast<double>(tallies[2]) / tallies[3] : 0.0;
  result.assc_accuracy = tallies[5] ? static_cast<double>(tallies[4]) / tallies[5] : 0.0;

  // Final loss decomposition over the training split.
  double sum_aoe = 0.0, sum_itm = 0.0, sum_assc = 0.0;
  for (int idx : train_idx) {
    Tape tape;
    BoundParams bp = bind(tape, m.params);
    auto losses = sample_losses(tape, bp, idx);
    sum_aoe += losses[0].scalar();
    sum_itm += losses[1].scalar();
    sum_assc += losses[2].scalar();
  }
  const double n = static_cast<double>(train_idx.size());
  result.l_q = qformer_term;
  result.l_aoe = sum_aoe / n;
  result.l_itm = sum_itm / n;
  result.l_assc = sum_assc / n;
  result.l_p = result.l_q + result.l_aoe + result.l_itm + result.l_assc;
  return result;
}

void save_pretrain_model(const PretrainModel& m, const std::string& path) {
  json j;
  j["task"] = "pretrain";
  j["config"] = config_to_json(m.cfg);
  j["image_dim"] = m.image_dim;
  j["vocab"] = m.vocab.tokens;
  json tensors = json::object();
  for (const auto& [name, t] : m.params.tensors)
    tensors[name] = {{"shape", t.shape}, {"data", t.data}};
  j["tensors"] = tensors;
  std::ofstream out(path);
  if (!out) throw config_error("cannot write model file " + path);
  out << j.dump() << "\n";
}

}  // namespace dasco
