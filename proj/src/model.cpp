#include "dasco/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "dasco/errors.hpp"
#include "dasco/rng.hpp"

namespace dasco {

using nlohmann::json;

std::string task_name(Task t) { return t == Task::Mate ? "mate" : "masc"; }

// ---- vocabulary ----------------------------------------------------------------

Vocab Vocab::build(const std::vector<AnnotatedSample>& corpus) {
  Vocab v;
  auto intern = [&v](const std::string& tok) {
    if (!v.index.count(tok)) {
      v.index[tok] = static_cast<int>(v.tokens.size());
      v.tokens.push_back(tok);
    }
  };
  intern(kUnkToken);
  intern(kMaskToken);
  for (const auto& s : corpus) {
    for (const Token& t : s.tree.tokens) intern(t.form);
    if (s.scene_graph)
      for (const auto& tok : *s.scene_graph) intern(tok);
  }
  return v;
}

int Vocab::id(const std::string& token) const {
  auto it = index.find(token);
  return it == index.end() ? kUnkId : it->second;
}

// ---- parameters ----------------------------------------------------------------

Tensor& ParamStore::at(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw config_error("missing parameter: " + name);
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw config_error("missing parameter: " + name);
  return it->second;
}

Value BoundParams::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw config_error("missing parameter: " + name);
  return it->second;
}

BoundParams bind(Tape& tape, const ParamStore& params) {
  BoundParams bp;
  for (const auto& [name, tensor] : params.tensors) bp.values[name] = tape.input(tensor);
  return bp;
}

namespace {

Tensor uniform_tensor(Shape shape, double bound, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

// Copies embedding rows for tokens shared with a previously trained model
// (task model or pretraining output; only "vocab" and tensor "emb" are read).
void warm_start_embedding(Model& m, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("init_encoder_from: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("init_encoder_from " + path + ": " + e.what());
  }
  std::vector<std::string> prev_tokens;
  Shape src_shape;
  std::vector<double> src_data;
  try {
    prev_tokens = j.at("vocab").get<std::vector<std::string>>();
    src_shape = j.at("tensors").at("emb").at("shape").get<Shape>();
    src_data = j.at("tensors").at("emb").at("data").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw config_error("init_encoder_from " + path + ": " + e.what());
  }
  Tensor& dst = m.params.at("emb");
  if (src_shape.size() != 2 || src_shape[1] != dst.shape[1])
    throw config_error("init_encoder_from: embedding shape " + shape_str(src_shape) +
                       " does not match dim " + std::to_string(dst.shape[1]));
  std::map<std::string, int> prev_index;
  for (std::size_t i = 0; i < prev_tokens.size(); ++i)
    prev_index[prev_tokens[i]] = static_cast<int>(i);
  const int d = dst.shape[1];
  for (int i = 0; i < m.vocab.size(); ++i) {
    auto it = prev_index.find(m.vocab.tokens[i]);
    if (it == prev_index.end() || it->second >= src_shape[0]) continue;
    for (int j2 = 0; j2 < d; ++j2)
      dst.data[static_cast<std::size_t>(i) * d + j2] =
          src_data[static_cast<std::size_t>(it->second) * d + j2];
  }
}

}  // namespace

Model init_model(Task task, const Vocab& vocab, const TrainConfig& cfg) {
  cfg.validate();
  Model m;
  m.task = task;
  m.cfg = cfg;
  m.vocab = vocab;
  Rng rng(cfg.seed);
  const int d = cfg.dim;
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));

  m.params.tensors["emb"] = uniform_tensor({vocab.size(), d}, bound, rng);
  if (cfg.encoder_mixing) {
    m.params.tensors["enc_w"] = uniform_tensor({d, d}, bound, rng);
    m.params.tensors["enc_b"] = Tensor::zeros({d});
  }
  m.params.tensors["attn_wq"] = uniform_tensor({d, d}, bound, rng);
  m.params.tensors["attn_wk"] = uniform_tensor({d, d}, bound, rng);
  GnnParams sem = GnnParams::init(cfg.layers, d, rng);
  GnnParams syn = GnnParams::init(cfg.layers, d, rng);
  for (int l = 0; l < cfg.layers; ++l) {
    m.params.tensors["sem_w" + std::to_string(l)] = sem.weights[l];
    m.params.tensors["sem_b" + std::to_string(l)] = sem.biases[l];
    m.params.tensors["syn_w" + std::to_string(l)] = syn.weights[l];
    m.params.tensors["syn_b" + std::to_string(l)] = syn.biases[l];
  }
  m.params.tensors["gate_w"] =
      uniform_tensor({2 * d, d}, 1.0 / std::sqrt(2.0 * d), rng);
  m.params.tensors["gate_b"] = Tensor::zeros({d});
  const int classes = task == Task::Mate ? 1 : 3;
  m.params.tensors["head_w"] =
      uniform_tensor({3 * d, classes}, 1.0 / std::sqrt(3.0 * d), rng);
  m.params.tensors["head_b"] = Tensor::zeros({classes});

  if (!cfg.init_encoder_from.empty()) warm_start_embedding(m, cfg.init_encoder_from);
  return m;
}

// ---- forward pieces --------------------------------------------------------------

Value encode(Tape& tape, const BoundParams& bp, const Model& m,
             const std::vector<std::string>& forms) {
  std::vector<int> ids;
  ids.reserve(forms.size());
  for (const auto& f : forms) ids.push_back(m.vocab.id(f));
  Value h = gather_rows(bp.at("emb"), ids);
  if (m.cfg.encoder_mixing)
    h = relu(add_bias_rows(matmul(h, bp.at("enc_w")), bp.at("enc_b")));
  (void)tape;
  return h;
}

Value gated_fuse(Value h_sem, Value h_syn, Value w_g, Value b_g) {
  if (h_sem.shape() != h_syn.shape())
    throw shape_error("gated_fuse: " + shape_str(h_sem.shape()) + " vs " +
                      shape_str(h_syn.shape()));
  Value g = sigmoid(add_bias_rows(matmul(concat_cols(h_syn, h_sem), w_g), b_g));
  Value one_minus_g = sub(h_sem.tape->scalar(1.0), g);
  return add(mul(g, h_syn), mul(one_minus_g, h_sem));
}

Value target_features(Value fused, Value h_sem, Value h, const MaskRow& mask) {
  MaskRow ones(mask.size(), 1);
  return concat({masked_mean_pool(fused, mask), masked_mean_pool(h_sem, mask),
                 masked_mean_pool(h, ones)});
}

SentenceRep forward_sentence(Tape& tape, const BoundParams& bp, const Model& m,
                             const DepTree& tree) {
  std::vector<std::string> forms;
  forms.reserve(tree.tokens.size());
  for (const Token& t : tree.tokens) forms.push_back(t.form);

  SentenceRep rep;
  rep.h = encode(tape, bp, m, forms);

  std::vector<Value> sem_ws, sem_bs, syn_ws, syn_bs;
  for (int l = 0; l < m.cfg.layers; ++l) {
    sem_ws.push_back(bp.at("sem_w" + std::to_string(l)));
    sem_bs.push_back(bp.at("sem_b" + std::to_string(l)));
    syn_ws.push_back(bp.at("syn_w" + std::to_string(l)));
    syn_bs.push_back(bp.at("syn_b" + std::to_string(l)));
  }
  Value a_sem = build_sem_adjacency(rep.h, bp.at("attn_wq"), bp.at("attn_wk"));
  rep.h_sem = gnn_forward(a_sem, rep.h, sem_ws, sem_bs);
  Value a_syn = tape.input(build_syn_adjacency(tree, m.cfg.syn_row_normalize));
  rep.h_syn = gnn_forward(a_syn, rep.h, syn_ws, syn_bs);
  rep.fused = gated_fuse(rep.h_sem, rep.h_syn, bp.at("gate_w"), bp.at("gate_b"));
  return rep;
}

// ---- losses ---------------------------------------------------------------------

Value mate_loss(Tape& tape, const std::vector<Value>& preds, const std::vector<int>& labels,
                double lambda, Value asi) {
  if (preds.empty()) throw parameter_error("mate_loss: no candidates");
  if (preds.size() != labels.size())
    throw shape_error("mate_loss: " + std::to_string(preds.size()) + " predictions vs " +
                      std::to_string(labels.size()) + " labels");
  Value sum = tape.scalar(0.0);
  for (std::size_t i = 0; i < preds.size(); ++i)
    sum = add(sum, binary_cross_entropy(preds[i], labels[i]));
  Value loss = scale(sum, 1.0 / static_cast<double>(preds.size()));
  if (lambda != 0.0) loss = add(loss, scale(asi, lambda));
  return loss;
}

Value masc_loss(Tape& tape, const std::vector<Value>& class_probs, const std::vector<int>& gold,
                double lambda, Value asi) {
  if (class_probs.empty()) throw parameter_error("masc_loss: no aspect terms");
  if (class_probs.size() != gold.size())
    throw shape_error("masc_loss: " + std::to_string(class_probs.size()) + " predictions vs " +
                      std::to_string(gold.size()) + " labels");
  Value sum = tape.scalar(0.0);
  for (std::size_t j = 0; j < class_probs.size(); ++j) {
    Value p = clamp(pick(class_probs[j], gold[j]), 1e-12, 1.0);
    sum = sub(sum, vlog(p));
  }
  Value loss = scale(sum, 1.0 / static_cast<double>(class_probs.size()));
  if (lambda != 0.0) loss = add(loss, scale(asi, lambda));
  return loss;
}

namespace {

bool inside_any_aspect(const AnnotatedSample& sample, int token) {
  for (const AspectSpan& a : sample.aspects)
    if (token >= a.start && token <= a.end) return true;
  return false;
}

Value head_prob(Tape& tape, const BoundParams& bp, Value feats) {
  (void)tape;
  return sigmoid(pick(affine(feats, bp.at("head_w"), bp.at("head_b")), 0));
}

Value head_class_probs(Tape& tape, const BoundParams& bp, Value feats) {
  (void)tape;
  return row(softmax_rows(reshape(affine(feats, bp.at("head_w"), bp.at("head_b")), {1, 3})), 0);
}

std::vector<Scope> task_scopes(const Model& m, const AnnotatedSample& sample,
                               const std::vector<int>& candidates) {
  std::vector<Scope> scopes;
  if (m.task == Task::Mate) {
    for (int c : candidates) scopes.push_back(compute_scope(sample.tree, c));
  } else {
    for (const AspectSpan& a : sample.aspects)
      scopes.push_back(compute_scope(sample.tree, a.start, a.end));
  }
  return scopes;
}

}  // namespace

Value task_sample_loss(Tape& tape, const BoundParams& bp, const Model& m,
                       const AnnotatedSample& sample) {
  const int s = sample.tree.size();
  std::vector<int> candidates =
      m.task == Task::Mate ? candidate_targets(sample.tree) : std::vector<int>{};
  if (m.task == Task::Mate && candidates.empty())
    throw parameter_error("sample " + sample.sample_id + " has no candidate targets");
  if (m.task == Task::Masc && sample.aspects.empty())
    throw parameter_error("sample " + sample.sample_id + " has no aspect terms");

  SentenceRep rep = forward_sentence(tape, bp, m, sample.tree);
  std::vector<Scope> scopes = task_scopes(m, sample, candidates);
  ScopeMask masks = scope_mask(scopes, s);

  Value asi = tape.scalar(0.0);
  if (m.cfg.lambda != 0.0)
    asi = asi_loss({rep.h_syn, rep.h_sem, scopes, m.cfg.tau});

  if (m.task == Task::Mate) {
    std::vector<Value> preds;
    std::vector<int> labels;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const MaskRow mask = m.cfg.ablate_scope ? all_ones_mask(s) : masks[i];
      preds.push_back(head_prob(tape, bp, target_features(rep.fused, rep.h_sem, rep.h, mask)));
      labels.push_back(inside_any_aspect(sample, candidates[i]) ? 1 : 0);
    }
    return mate_loss(tape, preds, labels, m.cfg.lambda, asi);
  }

  std::vector<Value> probs;
  std::vector<int> gold;
  for (std::size_t j = 0; j < sample.aspects.size(); ++j) {
    const MaskRow mask = m.cfg.ablate_scope ? all_ones_mask(s) : masks[j];
    probs.push_back(
        head_class_probs(tape, bp, target_features(rep.fused, rep.h_sem, rep.h, mask)));
    gold.push_back(sample.aspects[j].polarity);
  }
  return masc_loss(tape, probs, gold, m.cfg.lambda, asi);
}

// ---- inference --------------------------------------------------------------------

std::vector<std::pair<int, int>> predict_mate_spans(const Model& m,
                                                    const AnnotatedSample& sample) {
  std::vector<int> candidates = candidate_targets(sample.tree);
  std::vector<std::pair<int, int>> spans;
  if (candidates.empty()) return spans;
  Tape tape;
  BoundParams bp = bind(tape, m.params);
  SentenceRep rep = forward_sentence(tape, bp, m, sample.tree);
  const int s = sample.tree.size();
  std::vector<int> accepted;
  for (int c : candidates) {
    const MaskRow mask =
        m.cfg.ablate_scope ? all_ones_mask(s) : scope_mask({compute_scope(sample.tree, c)}, s)[0];
    Value p = head_prob(tape, bp, target_features(rep.fused, rep.h_sem, rep.h, mask));
    if (p.scalar() > 0.5) accepted.push_back(c);
  }
  for (std::size_t i = 0; i < accepted.size();) {
    std::size_t j = i;
    while (j + 1 < accepted.size() && accepted[j + 1] == accepted[j] + 1) ++j;
    spans.emplace_back(accepted[i], accepted[j]);
    i = j + 1;
  }
  return spans;
}

int classify_masc(const Model& m, const AnnotatedSample& sample, int span_start, int span_end) {
  Tape tape;
  BoundParams bp = bind(tape, m.params);
  SentenceRep rep = forward_sentence(tape, bp, m, sample.tree);
  const int s = sample.tree.size();
  const MaskRow mask = m.cfg.ablate_scope
                           ? all_ones_mask(s)
                           : scope_mask({compute_scope(sample.tree, span_start, span_end)}, s)[0];
  Value probs = head_class_probs(tape, bp, target_features(rep.fused, rep.h_sem, rep.h, mask));
  auto d = probs.data();
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (d[c] > d[best]) best = c;
  return best;
}

std::vector<JmasaPrediction> jmasa_infer(const Model& mate, const Model& masc,
                                         const std::vector<AnnotatedSample>& corpus) {
  std::vector<JmasaPrediction> out;
  out.reserve(corpus.size());
  for (const auto& sample : corpus) {
    JmasaPrediction pred;
    pred.sample_id = sample.sample_id;
    for (auto [start, end] : predict_mate_spans(mate, sample))
      pred.pairs.emplace_back(start, end, classify_masc(masc, sample, start, end));
    out.push_back(std::move(pred));
  }
  return out;
}

// ---- training ---------------------------------------------------------------------

namespace {

bool trainable(Task task, const AnnotatedSample& sample) {
  return task == Task::Mate ? !candidate_targets(sample.tree).empty() : !sample.aspects.empty();
}

EpochMetrics evaluate_epoch(const Model& m, const std::vector<AnnotatedSample>& corpus,
                            int epoch, double mean_loss) {
  EpochMetrics em;
  em.epoch = epoch;
  em.mean_loss = mean_loss;
  if (m.task == Task::Mate) {
    std::vector<SpanSet> gold, pred;
    for (const auto& sample : corpus) {
      SpanSet g{sample.sample_id, {}};
      for (const AspectSpan& a : sample.aspects) g.spans.emplace_back(a.start, a.end);
      gold.push_back(std::move(g));
      pred.push_back({sample.sample_id, predict_mate_spans(m, sample)});
    }
    em.prf = span_prf(gold, pred);
  } else {
    std::vector<int> gold, pred;
    for (const auto& sample : corpus)
      for (const AspectSpan& a : sample.aspects) {
        gold.push_back(a.polarity);
        pred.push_back(classify_masc(m, sample, a.start, a.end));
      }
    em.masc = masc_metrics(gold, pred);
  }
  return em;
}

}  // namespace

TrainResult train(Task task, const std::vector<AnnotatedSample>& corpus,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw parameter_error("train: empty corpus");
  TrainResult result;
  result.model = init_model(task, Vocab::build(corpus), cfg);
  Model& m = result.model;

  for (const auto& sample : corpus)
    if (!trainable(task, sample)) ++result.skipped;

  Rng shuffle_rng(cfg.seed ^ 0x517cc1b727220a95ull);
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  std::map<std::string, std::vector<double>> accum;
  for (const auto& [name, t] : m.params.tensors) accum[name].assign(t.data.size(), 0.0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    int steps = 0;
    int in_batch = 0;

    auto apply = [&]() {
      if (in_batch == 0) return;
      for (auto& [name, g] : accum) {
        auto& data = m.params.at(name).data;
        for (std::size_t i = 0; i < data.size(); ++i) {
          data[i] -= cfg.lr * g[i] / in_batch;
          g[i] = 0.0;
        }
      }
      in_batch = 0;
    };

    for (int idx : order) {
      const AnnotatedSample& sample = corpus[idx];
      if (!trainable(task, sample)) continue;
      Tape tape;
      BoundParams bp = bind(tape, m.params);
      Value loss = task_sample_loss(tape, bp, m, sample);
      const double lv = loss.scalar();
      if (!std::isfinite(lv))
        throw divergence_error("non-finite loss at epoch " + std::to_string(epoch) +
                               ", sample " + sample.sample_id);
      backward(loss);
      for (auto& [name, g] : accum) {
        auto grad = bp.at(name).grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += grad[i];
      }
      loss_sum += lv;
      ++steps;
      if (++in_batch == cfg.batch) apply();
    }
    apply();
    result.trace.push_back(
        evaluate_epoch(m, corpus, epoch, steps ? loss_sum / steps : 0.0));
  }
  return result;
}

// ---- serialization ------------------------------------------------------------------

void save_model(const Model& m, const std::string& path) {
  json j;
  j["task"] = task_name(m.task);
  j["config"] = config_to_json(m.cfg);
  j["vocab"] = m.vocab.tokens;
  json tensors = json::object();
  for (const auto& [name, t] : m.params.tensors) {
    tensors[name] = {{"shape", t.shape}, {"data", t.data}};
  }
  j["tensors"] = tensors;
  std::ofstream out(path);
  if (!out) throw config_error("cannot write model file " + path);
  out << j.dump() << "\n";
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open model file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("model " + path + ": " + e.what());
  }
  Model m;
  try {
    const std::string task = j.at("task").get<std::string>();
    if (task == "mate")
      m.task = Task::Mate;
    else if (task == "masc")
      m.task = Task::Masc;
    else
      throw config_error("model " + path + ": unknown task " + task);
    m.cfg = config_from_json(j.at("config"));
    m.vocab.tokens = j.at("vocab").get<std::vector<std::string>>();
    for (int i = 0; i < m.vocab.size(); ++i) m.vocab.index[m.vocab.tokens[i]] = i;
    for (auto it = j.at("tensors").begin(); it != j.at("tensors").end(); ++it) {
      Tensor t(it.value().at("shape").get<Shape>(),
               it.value().at("data").get<std::vector<double>>());
      m.params.tensors[it.key()] = std::move(t);
    }
  } catch (const json::exception& e) {
    throw config_error("model " + path + ": " + e.what());
  }
  // Shape consistency against the declared configuration.
  TrainConfig ref_cfg = m.cfg;
  ref_cfg.init_encoder_from.clear();
  const Model fresh = init_model(m.task, m.vocab, ref_cfg);
  for (const auto& [name, t] : fresh.params.tensors) {
    if (!m.params.tensors.count(name))
      throw config_error("model " + path + ": missing tensor " + name);
    if (m.params.tensors[name].shape != t.shape)
      throw config_error("model " + path + ": tensor " + name + " has shape " +
                         shape_str(m.params.tensors[name].shape) + ", expected " +
                         shape_str(t.shape));
  }
  return m;
}

}  // namespace dasco
