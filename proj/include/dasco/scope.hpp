#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "dasco/conllu.hpp"

namespace dasco {

// A target-specific scope: the contiguous token interval spanned by the
// target's parent-child path set in the dependency tree.
struct Scope {
  int target_start = 0;  // 1-based aspect/target span, inclusive
  int target_end = 0;
  int anchor = 0;        // representative token used as the contrast anchor
  int start = 0;         // 1-based scope interval, inclusive
  int end = 0;
};

using MaskRow = std::vector<std::uint8_t>;
using ScopeMask = std::vector<MaskRow>;

// {target} plus all transitive descendants of target, plus the target's
// head unless the target is the root.
std::set<int> path_set(const DepTree& tree, int target);

// Interval [min, max] of the target's path set.
Scope compute_scope(const DepTree& tree, int target);

// Multi-token aspect span: the union of per-token path sets, then the
// interval extremes. The anchor is the span token whose head falls outside
// the span (the span's syntactic head); first span token if none does.
Scope compute_scope(const DepTree& tree, int span_start, int span_end);

// N x S binary matrix; row t has ones exactly on [start_t, end_t].
ScopeMask scope_mask(const std::vector<Scope>& scopes, int sentence_len);

MaskRow all_ones_mask(int sentence_len);

}  // namespace dasco
