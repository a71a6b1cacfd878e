#pragma once

#include <stdexcept>
#include <string>

namespace dasco {

// Shape/dimension mismatch on a tensor operation.
struct shape_error : std::runtime_error {
  explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerically invalid input (log of non-positive entry, and the like).
struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad hyperparameter (non-positive temperature, negative rate, ...).
struct parameter_error : std::runtime_error {
  explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Pooling mask selects no positions.
struct empty_scope_error : std::runtime_error {
  explicit empty_scope_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; carries the 1-based line number when known.
struct parse_error : std::runtime_error {
  int line;
  parse_error(int line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

// Structurally invalid dependency tree (cycle, multiple roots, bad head).
struct tree_error : std::runtime_error {
  explicit tree_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid annotation record (unknown sample, bad span, unknown polarity).
struct annotation_error : std::runtime_error {
  explicit annotation_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced a non-finite loss.
struct divergence_error : std::runtime_error {
  explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dasco
