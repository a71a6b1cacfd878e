#include "dasco/scope.hpp"

#include <algorithm>

#include "dasco/errors.hpp"

namespace dasco {

namespace {

void require_in_bounds(const DepTree& tree, int index) {
  if (index < 1 || index > tree.size())
    throw shape_error("target index " + std::to_string(index) + " out of range [1," +
                      std::to_string(tree.size()) + "]");
}

void collect_descendants(const std::vector<std::vector<int>>& children, int node,
                         std::set<int>& out) {
  for (int c : children[node]) {
    out.insert(c);
    collect_descendants(children, c, out);
  }
}

}  // namespace

std::set<int> path_set(const DepTree& tree, int target) {
  require_in_bounds(tree, target);
  std::vector<std::vector<int>> children(tree.size() + 1);
  for (const Token& t : tree.tokens)
    if (t.head != 0) children[t.head].push_back(t.index);
  std::set<int> out{target};
  collect_descendants(children, target, out);
  const int head = tree.token(target).head;
  if (head != 0) out.insert(head);
  return out;
}

Scope compute_scope(const DepTree& tree, int target) {
  return compute_scope(tree, target, target);
}

Scope compute_scope(const DepTree& tree, int span_start, int span_end) {
  require_in_bounds(tree, span_start);
  require_in_bounds(tree, span_end);
  if (span_end < span_start)
    throw shape_error("aspect span end " + std::to_string(span_end) + " before start " +
                      std::to_string(span_start));
  std::set<int> members;
  for (int t = span_start; t <= span_end; ++t) {
    auto ps = path_set(tree, t);
    members.insert(ps.begin(), ps.end());
  }
  Scope s;
  s.target_start = span_start;
  s.target_end = span_end;
  s.start = *members.begin();
  s.end = *members.rbegin();
  s.anchor = span_start;
  for (int t = span_start; t <= span_end; ++t) {
    const int head = tree.token(t).head;
    if (head == 0 || head < span_start || head > span_end) {
      s.anchor = t;
      break;
    }
  }
  return s;
}

ScopeMask scope_mask(const std::vector<Scope>& scopes, int sentence_len) {
  ScopeMask mask;
  mask.reserve(scopes.size());
  for (const Scope& s : scopes) {
    if (s.start < 1 || s.end > sentence_len)
      throw shape_error("scope [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                        "] outside sentence of length " + std::to_string(sentence_len));
    MaskRow r(static_cast<std::size_t>(sentence_len), 0);
    for (int i = s.start; i <= s.end; ++i) r[static_cast<std::size_t>(i - 1)] = 1;
    mask.push_back(std::move(r));
  }
  return mask;
}

MaskRow all_ones_mask(int sentence_len) {
  return MaskRow(static_cast<std::size_t>(sentence_len), 1);
}

}  // namespace dasco
