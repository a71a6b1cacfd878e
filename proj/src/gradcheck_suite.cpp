#include <cmath>

#include "dasco/contrast.hpp"
#include "dasco/gradcheck.hpp"
#include "dasco/graphs.hpp"
#include "dasco/model.hpp"
#include "dasco/pretrain.hpp"
#include "dasco/rng.hpp"
#include "dasco/scope.hpp"

namespace dasco {

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// A 9-token sentence with a branching tree: two noun phrases with modifiers
// hanging off a verbal root, so scopes of different targets overlap partially.
DepTree check_tree() {
  DepTree tree;
  tree.sent_id = "gradcheck";
  auto tok = [](int i, const char* form, const char* upos, int head, const char* rel) {
    Token t;
    t.index = i;
    t.form = form;
    t.upos = upos;
    t.head = head;
    t.deprel = rel;
    return t;
  };
  tree.tokens = {tok(1, "t1", "DET", 3, "det"),   tok(2, "t2", "ADJ", 3, "amod"),
                 tok(3, "t3", "NOUN", 5, "nsubj"), tok(4, "t4", "ADV", 5, "advmod"),
                 tok(5, "t5", "VERB", 0, "root"),  tok(6, "t6", "DET", 9, "det"),
                 tok(7, "t7", "ADJ", 9, "amod"),   tok(8, "t8", "NOUN", 9, "compound"),
                 tok(9, "t9", "NOUN", 5, "obj")};
  tree.root = 5;
  validate_tree(tree);
  return tree;
}

AnnotatedSample check_sample() {
  AnnotatedSample s;
  s.sample_id = "gradcheck";
  s.tree = check_tree();
  s.aspects = {{3, 3, kPositive}, {8, 9, kNegative}};
  return s;
}

std::vector<Scope> check_scopes(const DepTree& tree) {
  return {compute_scope(tree, 3), compute_scope(tree, 8, 9)};
}

GradCheckCase tensor_chain_case(Rng& rng) {
  GradCheckCase c;
  c.name = "tensor_chain";
  c.inputs = {random_tensor({4, 4}, rng), random_tensor({4, 4}, rng)};
  c.build = [](Tape&, const std::vector<Value>& in) {
    return vsum(relu(matmul(in[0], in[1])));
  };
  return c;
}

GradCheckCase sem_gnn_case(Rng& rng) {
  const int s = 7, d = 6, layers = 4;
  GradCheckCase c;
  c.name = "sem_adjacency_gnn";
  c.inputs.push_back(random_tensor({s, d}, rng));
  c.inputs.push_back(random_tensor({d, d}, rng));
  c.inputs.push_back(random_tensor({d, d}, rng));
  for (int l = 0; l < layers; ++l) {
    c.inputs.push_back(random_tensor({d, d}, rng, -0.5, 0.5));
    c.inputs.push_back(random_tensor({d}, rng, -0.5, 0.5));
  }
  c.build = [layers](Tape&, const std::vector<Value>& in) {
    Value a = build_sem_adjacency(in[0], in[1], in[2]);
    std::vector<Value> ws, bs;
    for (int l = 0; l < layers; ++l) {
      ws.push_back(in[3 + 2 * l]);
      bs.push_back(in[4 + 2 * l]);
    }
    return vsum(gnn_forward(a, in[0], ws, bs));
  };
  return c;
}

GradCheckCase syn_gnn_case(Rng& rng) {
  const int d = 6, layers = 4;
  DepTree tree = check_tree();
  Tensor adj = build_syn_adjacency(tree);
  GradCheckCase c;
  c.name = "syn_gnn";
  c.inputs.push_back(random_tensor({tree.size(), d}, rng));
  for (int l = 0; l < layers; ++l) {
    c.inputs.push_back(random_tensor({d, d}, rng, -0.5, 0.5));
    c.inputs.push_back(random_tensor({d}, rng, -0.5, 0.5));
  }
  c.build = [adj, layers](Tape& tape, const std::vector<Value>& in) {
    Value a = tape.input(adj);
    std::vector<Value> ws, bs;
    for (int l = 0; l < layers; ++l) {
      ws.push_back(in[1 + 2 * l]);
      bs.push_back(in[2 + 2 * l]);
    }
    return vsum(gnn_forward(a, in[0], ws, bs));
  };
  return c;
}

GradCheckCase cross_scope_case(Rng& rng) {
  DepTree tree = check_tree();
  auto scopes = check_scopes(tree);
  GradCheckCase c;
  c.name = "cross_scope_loss";
  c.inputs = {random_tensor({tree.size(), 4}, rng)};
  c.build = [scopes](Tape&, const std::vector<Value>& in) {
    return cross_scope_loss(in[0], scopes, 0.1);
  };
  return c;
}

GradCheckCase cross_graph_case(Rng& rng) {
  DepTree tree = check_tree();
  auto scopes = check_scopes(tree);
  GradCheckCase c;
  c.name = "cross_graph_loss";
  c.inputs = {random_tensor({tree.size(), 4}, rng), random_tensor({tree.size(), 4}, rng)};
  c.build = [scopes](Tape&, const std::vector<Value>& in) {
    return cross_graph_loss(in[0], in[1], scopes, 0.1);
  };
  return c;
}

GradCheckCase asi_case(Rng& rng) {
  DepTree tree = check_tree();
  auto scopes = check_scopes(tree);
  GradCheckCase c;
  c.name = "asi_loss";
  c.inputs = {random_tensor({tree.size(), 4}, rng), random_tensor({tree.size(), 4}, rng)};
  c.build = [scopes](Tape&, const std::vector<Value>& in) {
    return asi_loss({in[0], in[1], scopes, 0.1});
  };
  return c;
}

GradCheckCase task_case(Task task, std::uint64_t seed) {
  AnnotatedSample sample = check_sample();
  TrainConfig cfg;
  cfg.dim = 6;
  cfg.layers = 4;
  cfg.lambda = 0.2;
  cfg.seed = seed;
  Model model = init_model(task, Vocab::build({sample}), cfg);

  GradCheckCase c;
  c.name = task == Task::Mate ? "mate_loss" : "masc_loss";
  std::vector<std::string> names;
  for (const auto& [name, tensor] : model.params.tensors) {
    names.push_back(name);
    c.inputs.push_back(tensor);
  }
  c.build = [model, names, sample](Tape& tape, const std::vector<Value>& in) {
    BoundParams bp;
    for (std::size_t i = 0; i < names.size(); ++i) bp.values[names[i]] = in[i];
    return task_sample_loss(tape, bp, model, sample);
  };
  return c;
}

GradCheckCase assc_case(Rng& rng) {
  const int d = 5;
  AnnotatedSample sample = check_sample();
  auto instances = build_assc_instances({sample});
  const ScopeMask masks = instances[0].masks;
  const std::vector<int> labels = instances[0].labels;
  GradCheckCase c;
  c.name = "assc_loss";
  c.inputs = {random_tensor({sample.tree.size(), d}, rng), random_tensor({d, 3}, rng),
              random_tensor({3}, rng)};
  c.build = [masks, labels](Tape&, const std::vector<Value>& in) {
    return assc_loss(in[0], masks, labels, in[1], in[2]);
  };
  return c;
}

}  // namespace

std::vector<GradCheckReport> gradcheck_suite(std::uint64_t seed, bool inject_fault) {
  Rng rng(seed);
  std::vector<GradCheckCase> cases;
  cases.push_back(tensor_chain_case(rng));
  cases.push_back(sem_gnn_case(rng));
  cases.push_back(syn_gnn_case(rng));
  cases.push_back(cross_scope_case(rng));
  cases.push_back(cross_graph_case(rng));
  cases.push_back(asi_case(rng));
  cases.push_back(task_case(Task::Mate, seed));
  cases.push_back(task_case(Task::Masc, seed));
  cases.push_back(assc_case(rng));
  if (inject_fault) cases.front().analytic_bias = 1.0;

  std::vector<GradCheckReport> reports;
  reports.reserve(cases.size());
  for (const auto& c : cases) reports.push_back(run_gradcheck(c));
  return reports;
}

}  // namespace dasco
