#pragma once

#include <vector>

#include "dasco/scope.hpp"
#include "dasco/tensor.hpp"

namespace dasco {

// Inputs to the adaptive scope interaction objective. Both node matrices are
// [S, D]; scopes index the shared tokenization, so the in-scope set is the
// same for both graphs.
struct ContrastInput {
  Value syn_nodes;
  Value sem_nodes;
  std::vector<Scope> scopes;
  double tau = 0.1;
};

// Intragraph cross-scope InfoNCE. For each target anchor n_t, every in-scope
// node n_j (j != t) is a positive; the denominator runs over all S nodes
// (anchor included). Returns 0 when there are no targets.
Value cross_scope_loss(Value nodes, const std::vector<Scope>& scopes, double tau);

// Cross-graph contrast with similarity weight w = sim(n_t, m_t):
//   L_mj = -log[(exp(w/tau) + exp(w sim(n_t, m_j)/tau)) / sum_i exp(sim(n_t, m_i)/tau)]
// summed over in-scope m_j (j != t) and averaged over targets. May be
// negative; no clamping.
Value cross_graph_loss(Value anchor_nodes, Value other_nodes,
                       const std::vector<Scope>& scopes, double tau);

// L_scope + L_graph: cross-scope on both graphs plus cross-graph in both
// directions, summed as
//   ((scope_syn + scope_sem) + graph_syn) + graph_sem.
Value asi_loss(const ContrastInput& in);

}  // namespace dasco
