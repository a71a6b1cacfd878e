#include <cmath>

#include "dasco/gradcheck.hpp"

namespace dasco {

GradCheckReport run_gradcheck(const GradCheckCase& c, double step, double tol) {
  GradCheckReport rep;
  rep.name = c.name;

  // Analytic gradients from one recorded forward/backward pass.
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    std::vector<Value> leaves;
    leaves.reserve(c.inputs.size());
    for (const auto& in : c.inputs) leaves.push_back(tape.input(in));
    Value loss = c.build(tape, leaves);
    backward(loss);
    for (Value v : leaves) analytic.emplace_back(v.grad().begin(), v.grad().end());
    if (c.analytic_bias != 0.0 && !analytic.empty() && !analytic[0].empty())
      analytic[0][0] += c.analytic_bias;
  }

  auto eval = [&](const std::vector<Tensor>& ins) {
    Tape tape;
    std::vector<Value> leaves;
    leaves.reserve(ins.size());
    for (const auto& in : ins) leaves.push_back(tape.input(in));
    return c.build(tape, leaves).scalar();
  };

  std::vector<Tensor> work = c.inputs;
  for (std::size_t t = 0; t < work.size(); ++t) {
    for (std::size_t i = 0; i < work[t].data.size(); ++i) {
      const double orig = work[t].data[i];
      work[t].data[i] = orig + step;
      const double fp = eval(work);
      work[t].data[i] = orig - step;
      const double fm = eval(work);
      work[t].data[i] = orig;
      const double numeric = (fp - fm) / (2.0 * step);
      const double a = analytic[t][i];
      const double denom = std::max({1.0, std::fabs(a), std::fabs(numeric)});
      rep.max_rel_err = std::max(rep.max_rel_err, std::fabs(a - numeric) / denom);
      ++rep.checked;
    }
  }
  rep.pass = rep.max_rel_err < tol;
  return rep;
}

}  // namespace dasco
