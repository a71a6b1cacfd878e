#include "dasco/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dasco/errors.hpp"

namespace dasco {

namespace {

PRF from_counts(std::size_t tp, std::size_t n_pred, std::size_t n_gold) {
  PRF out;
  out.precision = n_pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_pred);
  out.recall = n_gold == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gold);
  out.f1 = (out.precision + out.recall) == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

template <class Item>
PRF micro_match(const std::vector<std::pair<std::string, std::vector<Item>>>& gold,
                const std::vector<std::pair<std::string, std::vector<Item>>>& predicted) {
  std::map<std::string, std::set<Item>> gold_by_id;
  std::size_t n_gold = 0;
  for (const auto& [id, items] : gold) {
    auto& s = gold_by_id[id];
    s.insert(items.begin(), items.end());
    n_gold += items.size();
  }
  std::size_t tp = 0, n_pred = 0;
  for (const auto& [id, items] : predicted) {
    auto it = gold_by_id.find(id);
    if (it == gold_by_id.end()) throw annotation_error("unknown sample id: " + id);
    std::set<Item> seen;
    for (const Item& item : items) {
      if (!seen.insert(item).second) continue;
      ++n_pred;
      if (it->second.count(item)) ++tp;
    }
  }
  return from_counts(tp, n_pred, n_gold);
}

}  // namespace

PRF span_prf(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& predicted) {
  std::vector<std::pair<std::string, std::vector<std::pair<int, int>>>> g, p;
  for (const auto& s : gold) g.emplace_back(s.sample_id, s.spans);
  for (const auto& s : predicted) p.emplace_back(s.sample_id, s.spans);
  return micro_match(g, p);
}

PRF jmasa_prf(const std::vector<PairSet>& gold, const std::vector<PairSet>& predicted) {
  std::vector<std::pair<std::string, std::vector<std::tuple<int, int, int>>>> g, p;
  for (const auto& s : gold) g.emplace_back(s.sample_id, s.pairs);
  for (const auto& s : predicted) p.emplace_back(s.sample_id, s.pairs);
  return micro_match(g, p);
}

MascMetrics masc_metrics(const std::vector<int>& gold, const std::vector<int>& predicted) {
  if (gold.size() != predicted.size())
    throw shape_error("masc_metrics: " + std::to_string(gold.size()) + " gold vs " +
                      std::to_string(predicted.size()) + " predicted labels");
  MascMetrics out;
  if (gold.empty()) return out;
  std::size_t correct = 0;
  // confusion over the fixed 3-class set
  std::size_t tp[3] = {0, 0, 0}, in_gold[3] = {0, 0, 0}, in_pred[3] = {0, 0, 0};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] > 2 || predicted[i] < 0 || predicted[i] > 2)
      throw annotation_error("masc_metrics: polarity code out of range");
    ++in_gold[gold[i]];
    ++in_pred[predicted[i]];
    if (gold[i] == predicted[i]) {
      ++correct;
      ++tp[gold[i]];
    }
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
  double macro = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double p = in_pred[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / in_pred[c];
    const double r = in_gold[c] == 0 ? 0.0 : static_cast<double>(tp[c]) / in_gold[c];
    macro += (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  out.macro_f1 = macro / 3.0;
  return out;
}

}  // namespace dasco
