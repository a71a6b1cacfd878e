#include "dasco/contrast.hpp"

#include "dasco/errors.hpp"

namespace dasco {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0)) throw parameter_error("temperature must be positive, got " + std::to_string(tau));
}

std::vector<Value> split_rows(Value m) {
  std::vector<Value> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) rows.push_back(row(m, i));
  return rows;
}

}  // namespace

Value cross_scope_loss(Value nodes, const std::vector<Scope>& scopes, double tau) {
  check_tau(tau);
  Tape& tape = *nodes.tape;
  const int s = nodes.rows();
  if (scopes.empty()) return tape.scalar(0.0);

  auto rows = split_rows(nodes);
  Value total = tape.scalar(0.0);
  for (const Scope& sc : scopes) {
    const int t = sc.anchor;
    // exp(sim(n_t, n_i)/tau) for all i, reused for denominator and positives
    std::vector<Value> sims(static_cast<std::size_t>(s));
    Value denom = tape.scalar(0.0);
    for (int i = 0; i < s; ++i) {
      sims[i] = cosine_sim(rows[t - 1], rows[i]);
      denom = add(denom, vexp(scale(sims[i], 1.0 / tau)));
    }
    Value log_denom = vlog(denom);
    for (int j = sc.start; j <= sc.end; ++j) {
      if (j == t) continue;
      total = add(total, sub(log_denom, scale(sims[j - 1], 1.0 / tau)));
    }
  }
  return scale(total, 1.0 / static_cast<double>(scopes.size()));
}

Value cross_graph_loss(Value anchor_nodes, Value other_nodes,
                       const std::vector<Scope>& scopes, double tau) {
  check_tau(tau);
  Tape& tape = *anchor_nodes.tape;
  if (anchor_nodes.shape() != other_nodes.shape())
    throw shape_error("cross_graph_loss: " + shape_str(anchor_nodes.shape()) + " vs " +
                      shape_str(other_nodes.shape()));
  const int s = anchor_nodes.rows();
  if (scopes.empty()) return tape.scalar(0.0);

  auto anchors = split_rows(anchor_nodes);
  auto others = split_rows(other_nodes);
  Value total = tape.scalar(0.0);
  for (const Scope& sc : scopes) {
    const int t = sc.anchor;
    std::vector<Value> sims(static_cast<std::size_t>(s));
    Value denom = tape.scalar(0.0);
    for (int i = 0; i < s; ++i) {
      sims[i] = cosine_sim(anchors[t - 1], others[i]);
      denom = add(denom, vexp(scale(sims[i], 1.0 / tau)));
    }
    Value omega = sims[t - 1];  // sim(n_t, m_t)
    Value exp_omega = vexp(scale(omega, 1.0 / tau));
    for (int j = sc.start; j <= sc.end; ++j) {
      if (j == t) continue;
      Value numer = add(exp_omega, vexp(scale(mul(omega, sims[j - 1]), 1.0 / tau)));
      total = sub(total, vlog(numer));
      total = add(total, vlog(denom));
    }
  }
  return scale(total, 1.0 / static_cast<double>(scopes.size()));
}

Value asi_loss(const ContrastInput& in) {
  Value scope_syn = cross_scope_loss(in.syn_nodes, in.scopes, in.tau);
  Value scope_sem = cross_scope_loss(in.sem_nodes, in.scopes, in.tau);
  Value graph_syn = cross_graph_loss(in.syn_nodes, in.sem_nodes, in.scopes, in.tau);
  Value graph_sem = cross_graph_loss(in.sem_nodes, in.syn_nodes, in.scopes, in.tau);
  return add(add(add(scope_syn, scope_sem), graph_syn), graph_sem);
}

}  // namespace dasco
