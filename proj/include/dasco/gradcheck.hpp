#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dasco/tensor.hpp"

namespace dasco {

// One finite-difference check: `build` constructs a scalar loss on a fresh
// tape from leaf values created from `inputs`, in order. The numeric side
// only ever calls `build` forward, so it is independent of the recorded
// gradients it is checking.
struct GradCheckCase {
  std::string name;
  std::vector<Tensor> inputs;
  std::function<Value(Tape&, const std::vector<Value>&)> build;
  // Test hook: added to the first analytic gradient entry, so a nonzero value
  // must make the check fail.
  double analytic_bias = 0.0;
};

struct GradCheckReport {
  std::string name;
  double max_rel_err = 0.0;
  int checked = 0;
  bool pass = false;
};

// Central differences with the given step; relative error uses
// |a - n| / max(1, |a|, |n|) so near-zero gradients are compared absolutely.
GradCheckReport run_gradcheck(const GradCheckCase& c, double step = 1e-5,
                              double tol = 1e-4);

// The full verification suite over every differentiable component
// (tensor chain, attention + GNN stack, contrastive losses, task losses).
// `inject_fault` corrupts one analytic gradient to prove the harness trips.
std::vector<GradCheckReport> gradcheck_suite(std::uint64_t seed, bool inject_fault = false);

}  // namespace dasco
