#include "dasco/graphs.hpp"

#include <cmath>

#include "dasco/errors.hpp"

namespace dasco {

Value build_sem_adjacency(Value h, Value w_q, Value w_k) {
  const int d = h.cols();
  Value q = matmul(h, w_q);
  Value k = matmul(h, w_k);
  Value scores = scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(d)));
  return softmax_rows(scores);
}

Tensor build_syn_adjacency(const DepTree& tree, bool row_normalize) {
  const int n = tree.size();
  Tensor a = Tensor::zeros({n, n});
  for (int i = 0; i < n; ++i) a.at(i, i) = 1.0;
  for (const Token& t : tree.tokens) {
    if (t.head == 0) continue;
    a.at(t.index - 1, t.head - 1) = 1.0;
    a.at(t.head - 1, t.index - 1) = 1.0;
  }
  if (row_normalize) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += a.at(i, j);
      for (int j = 0; j < n; ++j) a.at(i, j) /= s;
    }
  }
  return a;
}

GnnParams GnnParams::init(int layers, int dim, Rng& rng) {
  GnnParams p;
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int l = 0; l < layers; ++l) {
    Tensor w = Tensor::zeros({dim, dim});
    for (auto& v : w.data) v = rng.uniform(-bound, bound);
    Tensor b = Tensor::zeros({dim});
    for (auto& v : b.data) v = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

Value gnn_forward(Value adjacency, Value h0, const std::vector<Value>& weights,
                  const std::vector<Value>& biases) {
  if (weights.empty() || weights.size() != biases.size())
    throw shape_error("gnn_forward: " + std::to_string(weights.size()) + " weights vs " +
                      std::to_string(biases.size()) + " biases");
  Value h = h0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    h = relu(add_bias_rows(matmul(matmul(adjacency, h), weights[l]), biases[l]));
  return h;
}

}  // namespace dasco
