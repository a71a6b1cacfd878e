#include <doctest.h>

#include <cmath>

#include "dasco/contrast.hpp"
#include "dasco/errors.hpp"
#include "dasco/gradcheck.hpp"
#include "oracles.hpp"

using namespace dasco;

namespace {

Scope interval(int anchor, int start, int end) {
  Scope s;
  s.target_start = s.target_end = s.anchor = anchor;
  s.start = start;
  s.end = end;
  return s;
}

Tensor random_nodes(Rng& rng, int s, int d) {
  Tensor t = Tensor::zeros({s, d});
  for (auto& v : t.data) v = rng.uniform(-1, 1);
  return t;
}

oracle::Matrix to_matrix(const Tensor& t) {
  oracle::Matrix m = oracle::make(t.shape[0], t.shape[1]);
  for (int i = 0; i < t.shape[0]; ++i)
    for (int j = 0; j < t.shape[1]; ++j) m[i][j] = t.at(i, j);
  return m;
}

std::vector<Scope> random_scopes(Rng& rng, int s) {
  std::vector<Scope> scopes;
  const int t = rng.uniform_int(1, 3);
  for (int k = 0; k < t; ++k) {
    int start = rng.uniform_int(1, s);
    int end = rng.uniform_int(start, s);
    scopes.push_back(interval(rng.uniform_int(start, end), start, end));
  }
  return scopes;
}

}  // namespace

TEST_CASE("uniform similarities give the k ln S closed form") {
  // identical rows: every cosine similarity is 1
  const int s = 6, d = 3;
  Tape t;
  std::vector<double> data;
  for (int i = 0; i < s; ++i) {
    data.push_back(0.4);
    data.push_back(-0.7);
    data.push_back(0.2);
  }
  Value nodes = t.input({s, d}, data);
  const int k = 3;  // positives: interval of 4 minus the anchor
  Value loss = cross_scope_loss(nodes, {interval(1, 1, 4)}, 0.25);
  CHECK(loss.scalar() == doctest::Approx(k * std::log(double(s))).epsilon(1e-9));
}

TEST_CASE("zero targets yield zero loss") {
  Tape t;
  Value nodes = t.input({3, 2}, {1, 2, 3, 4, 5, 6});
  CHECK(cross_scope_loss(nodes, {}, 0.1).scalar() == 0.0);
  CHECK(cross_graph_loss(nodes, nodes, {}, 0.1).scalar() == 0.0);
  CHECK(asi_loss({nodes, nodes, {}, 0.1}).scalar() == 0.0);
}

TEST_CASE("non-positive temperature is rejected") {
  Tape t;
  Value nodes = t.input({2, 2}, {1, 0, 0, 1});
  auto scopes = std::vector<Scope>{interval(1, 1, 2)};
  CHECK_THROWS_AS(cross_scope_loss(nodes, scopes, 0.0), parameter_error);
  CHECK_THROWS_AS(cross_graph_loss(nodes, nodes, scopes, -1.0), parameter_error);
}

TEST_CASE("cross-scope matches the brute-force loops and its gradients check out") {
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const int s = 6, d = 4;
    Tensor nodes = random_nodes(rng, s, d);
    auto scopes = random_scopes(rng, s);
    Tape t;
    double got = cross_scope_loss(t.input(nodes), scopes, 0.1).scalar();
    double expected = oracle::cross_scope(to_matrix(nodes), scopes, 0.1);
    CHECK(std::fabs(got - expected) < 1e-10);
  }
  GradCheckCase c;
  c.name = "cross_scope";
  c.inputs = {random_nodes(rng, 6, 4)};
  auto scopes = std::vector<Scope>{interval(2, 1, 4), interval(5, 4, 6)};
  c.build = [scopes](Tape&, const std::vector<Value>& in) {
    return cross_scope_loss(in[0], scopes, 0.1);
  };
  CHECK(run_gradcheck(c).pass);
}

TEST_CASE("symmetric cross-graph case gives k (ln S - ln 2)") {
  const int s = 5, d = 2;
  Tape t;
  std::vector<double> data;
  for (int i = 0; i < s; ++i) {
    data.push_back(1.0);
    data.push_back(2.0);
  }
  Value nodes = t.input({s, d}, data);
  const int k = 2;  // interval of 3 minus the anchor
  Value loss = cross_graph_loss(nodes, nodes, {interval(1, 1, 3)}, 0.5);
  CHECK(loss.scalar() ==
        doctest::Approx(k * (std::log(double(s)) - std::log(2.0))).epsilon(1e-9));
}

TEST_CASE("cross-graph matches the brute-force loops and its gradients check out") {
  Rng rng(43);
  for (int rep = 0; rep < 50; ++rep) {
    const int s = 6, d = 4;
    Tensor anchors = random_nodes(rng, s, d);
    Tensor others = random_nodes(rng, s, d);
    auto scopes = random_scopes(rng, s);
    Tape t;
    double got = cross_graph_loss(t.input(anchors), t.input(others), scopes, 0.1).scalar();
    double expected = oracle::cross_graph(to_matrix(anchors), to_matrix(others), scopes, 0.1);
    CHECK(std::fabs(got - expected) < 1e-10);
  }
  GradCheckCase c;
  c.name = "cross_graph";
  c.inputs = {random_nodes(rng, 6, 4), random_nodes(rng, 6, 4)};
  auto scopes = std::vector<Scope>{interval(2, 1, 4), interval(5, 4, 6)};
  c.build = [scopes](Tape&, const std::vector<Value>& in) {
    return cross_graph_loss(in[0], in[1], scopes, 0.1);
  };
  CHECK(run_gradcheck(c).pass);
}

TEST_CASE("combined objective is exactly the sum of its four terms") {
  Rng rng(44);
  for (int rep = 0; rep < 20; ++rep) {
    const int s = 6, d = 4;
    Tensor syn = random_nodes(rng, s, d);
    Tensor sem = random_nodes(rng, s, d);
    auto scopes = random_scopes(rng, s);
    Tape t;
    Value syn_v = t.input(syn), sem_v = t.input(sem);
    double total = asi_loss({syn_v, sem_v, scopes, 0.1}).scalar();
    double a = cross_scope_loss(syn_v, scopes, 0.1).scalar();
    double b = cross_scope_loss(sem_v, scopes, 0.1).scalar();
    double c = cross_graph_loss(syn_v, sem_v, scopes, 0.1).scalar();
    double d2 = cross_graph_loss(sem_v, syn_v, scopes, 0.1).scalar();
    CHECK(total == ((a + b) + c) + d2);  // same summation order, bit-exact
    CHECK(std::fabs(total - oracle::asi(to_matrix(syn), to_matrix(sem), scopes, 0.1)) < 1e-10);
  }
}

TEST_CASE("brute-force equivalence holds over 200 random instances") {
  Rng rng(45);
  for (int rep = 0; rep < 200; ++rep) {
    const int s = rng.uniform_int(2, 8);
    const int d = rng.uniform_int(2, 6);
    Tensor syn = random_nodes(rng, s, d);
    Tensor sem = random_nodes(rng, s, d);
    auto scopes = random_scopes(rng, s);
    Tape t;
    double got = asi_loss({t.input(syn), t.input(sem), scopes, 0.1}).scalar();
    double expected = oracle::asi(to_matrix(syn), to_matrix(sem), scopes, 0.1);
    CHECK(std::fabs(got - expected) < 1e-10);
  }
}

TEST_CASE("cross-scope loss is nonnegative") {
  Rng rng(46);
  for (int rep = 0; rep < 100; ++rep) {
    const int s = rng.uniform_int(2, 8);
    Tensor nodes = random_nodes(rng, s, 4);
    Tape t;
    CHECK(cross_scope_loss(t.input(nodes), random_scopes(rng, s), 0.1).scalar() >= 0.0);
  }
}

TEST_CASE("losses are invariant to positive rescaling of one node vector") {
  Rng rng(47);
  const int s = 6, d = 4;
  Tensor syn = random_nodes(rng, s, d);
  Tensor sem = random_nodes(rng, s, d);
  auto scopes = std::vector<Scope>{interval(2, 1, 4)};

  Tensor syn_scaled = syn;
  for (int j = 0; j < d; ++j) syn_scaled.at(3, j) *= 7.0;

  Tape t;
  double base_scope = cross_scope_loss(t.input(syn), scopes, 0.1).scalar();
  double scaled_scope = cross_scope_loss(t.input(syn_scaled), scopes, 0.1).scalar();
  CHECK(std::fabs(base_scope - scaled_scope) < 1e-9);

  double base_graph = cross_graph_loss(t.input(sem), t.input(syn), scopes, 0.1).scalar();
  double scaled_graph = cross_graph_loss(t.input(sem), t.input(syn_scaled), scopes, 0.1).scalar();
  CHECK(std::fabs(base_graph - scaled_graph) < 1e-9);
}

TEST_CASE("asi gradients pass finite differences at S=8, D=6") {
  Rng rng(48);
  GradCheckCase c;
  c.name = "asi";
  c.inputs = {random_nodes(rng, 8, 6), random_nodes(rng, 8, 6)};
  auto scopes = std::vector<Scope>{interval(2, 1, 5), interval(7, 6, 8)};
  c.build = [scopes](Tape&, const std::vector<Value>& in) {
    return asi_loss({in[0], in[1], scopes, 0.1});
  };
  auto rep = run_gradcheck(c);
  CHECK(rep.pass);
  CHECK(rep.max_rel_err < 1e-4);
}
