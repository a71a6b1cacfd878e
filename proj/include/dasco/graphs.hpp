#pragma once

#include <cstdint>
#include <vector>

#include "dasco/conllu.hpp"
#include "dasco/rng.hpp"
#include "dasco/tensor.hpp"

namespace dasco {

// Attention adjacency over token features:
//   softmax_rows((H Wq)(H Wk)^T / sqrt(D)).
// Rows sum to 1; fully differentiable through H, Wq, Wk.
Value build_sem_adjacency(Value h, Value w_q, Value w_k);

// Binary dependency adjacency: ones on the diagonal and at both orientations
// of every head-dependent pair. Optionally row-normalized (off by default;
// the raw binary form is the reference behavior).
Tensor build_syn_adjacency(const DepTree& tree, bool row_normalize = false);

// Per-layer weights of one graph network; SemGNN and SynGNN each own an
// independent instance.
struct GnnParams {
  std::vector<Tensor> weights;  // L matrices [D,D]
  std::vector<Tensor> biases;   // L vectors [D]

  int layers() const { return static_cast<int>(weights.size()); }
  // uniform(-1/sqrt(D), 1/sqrt(D)), seeded
  static GnnParams init(int layers, int dim, Rng& rng);
};

// L-fold application of H_l = ReLU(A H_{l-1} W_l + b_l).
Value gnn_forward(Value adjacency, Value h0, const std::vector<Value>& weights,
                  const std::vector<Value>& biases);

}  // namespace dasco
