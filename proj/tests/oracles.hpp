// Independent reference implementations used to cross-check the library.
// Everything here is plain scalar arithmetic with no recorded gradients, so
// the oracles stay independent of the implementation paths they verify.
#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dasco/conllu.hpp"
#include "dasco/rng.hpp"
#include "dasco/scope.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix make(int r, int c, double v = 0.0) {
  return Matrix(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(c), v));
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out = make(static_cast<int>(a.size()), static_cast<int>(b[0].size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Matrix softmax_rows(const Matrix& x) {
  Matrix y = x;
  for (auto& r : y) {
    double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (auto& v : r) {
      v = std::exp(v - mx);
      z += v;
    }
    for (auto& v : r) v /= z;
  }
  return y;
}

// softmax((H Wq)(H Wk)^T / sqrt(D)) by scalar loops
inline Matrix sem_adjacency(const Matrix& h, const Matrix& wq, const Matrix& wk) {
  Matrix q = matmul(h, wq), k = matmul(h, wk);
  const int s = static_cast<int>(h.size());
  const int d = static_cast<int>(h[0].size());
  Matrix scores = make(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      double v = 0.0;
      for (int p = 0; p < d; ++p) v += q[i][p] * k[j][p];
      scores[i][j] = v / std::sqrt(static_cast<double>(d));
    }
  return softmax_rows(scores);
}

inline Matrix gnn_forward(const Matrix& a, const Matrix& h0,
                          const std::vector<Matrix>& ws,
                          const std::vector<std::vector<double>>& bs) {
  Matrix h = h0;
  for (std::size_t l = 0; l < ws.size(); ++l) {
    Matrix next = matmul(matmul(a, h), ws[l]);
    for (std::size_t i = 0; i < next.size(); ++i)
      for (std::size_t j = 0; j < next[i].size(); ++j)
        next[i][j] = std::max(0.0, next[i][j] + bs[l][j]);
    h = next;
  }
  return h;
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    s += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  return s / (std::sqrt(nu) * std::sqrt(nv) + 1e-12);
}

// Triple-loop transcription of the cross-scope contrastive objective.
inline double cross_scope(const Matrix& nodes, const std::vector<dasco::Scope>& scopes,
                          double tau) {
  if (scopes.empty()) return 0.0;
  const int s = static_cast<int>(nodes.size());
  double total = 0.0;
  for (const auto& sc : scopes) {
    double denom = 0.0;
    for (int i = 1; i <= s; ++i)
      denom += std::exp(cosine(nodes[sc.anchor - 1], nodes[i - 1]) / tau);
    for (int j = sc.start; j <= sc.end; ++j) {
      if (j == sc.anchor) continue;
      double pos = std::exp(cosine(nodes[sc.anchor - 1], nodes[j - 1]) / tau);
      total += -std::log(pos / denom);
    }
  }
  return total / static_cast<double>(scopes.size());
}

// Triple-loop transcription of the weighted cross-graph objective.
inline double cross_graph(const Matrix& anchors, const Matrix& others,
                          const std::vector<dasco::Scope>& scopes, double tau) {
  if (scopes.empty()) return 0.0;
  const int s = static_cast<int>(anchors.size());
  double total = 0.0;
  for (const auto& sc : scopes) {
    const auto& nt = anchors[sc.anchor - 1];
    double denom = 0.0;
    for (int i = 1; i <= s; ++i) denom += std::exp(cosine(nt, others[i - 1]) / tau);
    const double omega = cosine(nt, others[sc.anchor - 1]);
    for (int j = sc.start; j <= sc.end; ++j) {
      if (j == sc.anchor) continue;
      double numer = std::exp(omega / tau) + std::exp(omega * cosine(nt, others[j - 1]) / tau);
      total += -std::log(numer / denom);
    }
  }
  return total / static_cast<double>(scopes.size());
}

inline double asi(const Matrix& syn, const Matrix& sem, const std::vector<dasco::Scope>& scopes,
                  double tau) {
  return ((cross_scope(syn, scopes, tau) + cross_scope(sem, scopes, tau)) +
          cross_graph(syn, sem, scopes, tau)) +
         cross_graph(sem, syn, scopes, tau);
}

// Exhaustive reachability: descendants by repeated sweeps, plus the head.
inline std::set<int> path_set(const dasco::DepTree& tree, int target) {
  std::set<int> reach{target};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& tok : tree.tokens)
      if (tok.head != 0 && reach.count(tok.head) && !reach.count(tok.index)) {
        reach.insert(tok.index);
        grew = true;
      }
  }
  if (tree.token(target).head != 0) reach.insert(tree.token(target).head);
  return reach;
}

// A random valid dependency tree: token i attaches to a uniformly chosen
// earlier token or becomes a child of the root chain.
inline dasco::DepTree random_tree(dasco::Rng& rng, int max_tokens = 12) {
  const int n = rng.uniform_int(1, max_tokens);
  dasco::DepTree tree;
  tree.sent_id = "rand";
  static const char* kPos[] = {"NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "PROPN"};
  const int root = rng.uniform_int(1, n);
  for (int i = 1; i <= n; ++i) {
    dasco::Token t;
    t.index = i;
    t.form = "w" + std::to_string(i);
    t.upos = kPos[rng.uniform_int(0, 6)];
    t.deprel = i == root ? "root" : "dep";
    tree.tokens.push_back(t);
  }
  tree.tokens[root - 1].head = 0;
  tree.root = root;
  // attach every other node to a node already in the tree
  std::vector<int> in_tree{root};
  std::vector<int> rest;
  for (int i = 1; i <= n; ++i)
    if (i != root) rest.push_back(i);
  rng.shuffle(rest);
  for (int v : rest) {
    tree.tokens[v - 1].head = in_tree[rng.uniform_int(0, static_cast<int>(in_tree.size()) - 1)];
    in_tree.push_back(v);
  }
  dasco::validate_tree(tree);
  return tree;
}

}  // namespace oracle
