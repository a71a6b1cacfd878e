#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dasco {

// Rank conventions: {} scalar, {n} vector, {rows, cols} matrix.
using Shape = std::vector<int>;

std::int64_t numel(const Shape& s);
std::string shape_str(const Shape& s);

// Plain dense storage for quantities that outlive a tape (parameters,
// adjacency constants, serialized weights). Row-major, double precision.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(Shape s, std::vector<double> d);

  static Tensor zeros(Shape s);
  static Tensor scalar(double v);

  double& at(int i, int j);
  double at(int i, int j) const;
};

class Tape;

// Handle to one node of a Tape. Cheap to copy; valid while the tape lives.
struct Value {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Shape& shape() const;
  std::span<const double> data() const;
  std::span<const double> grad() const;  // populated by backward()
  double scalar() const;                 // requires numel == 1
  int rows() const;
  int cols() const;
};

// Define-by-run recording tape. Nodes are appended in topological order
// (operands always precede the operation), so reverse-mode differentiation
// is a single reverse sweep. Rebuilt per forward pass. Not thread-safe;
// distinct tapes may be used from distinct threads.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf nodes.
  Value input(Shape shape, std::vector<double> data);
  Value input(const Tensor& t);
  Value scalar(double v);

  int size() const { return static_cast<int>(nodes_.size()); }

  // Low-level node access, used by the recorded operations and backward().
  using BackFn = std::function<void(Tape&, int)>;
  Value emplace(Shape shape, std::vector<double> data, std::vector<int> inputs,
                const char* op, BackFn back);
  const Shape& shape_of(int id) const { return nodes_[id].shape; }
  const std::vector<double>& data_of(int id) const { return nodes_[id].data; }
  const std::vector<double>& grad_of(int id) const { return nodes_[id].grad; }
  std::vector<double>& grad_slot(int id) { return nodes_[id].grad; }
  const char* op_of(int id) const { return nodes_[id].op; }

  void run_backward(int loss_id);

 private:
  struct Node {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    std::vector<int> inputs;
    const char* op = "";
    BackFn back;  // empty for leaves
  };
  std::vector<Node> nodes_;
};

// ---- recorded operations ---------------------------------------------------

Value matmul(Value a, Value b);                  // [m,k] x [k,n] -> [m,n]
Value transpose(Value a);                        // [m,n] -> [n,m]
Value softmax_rows(Value a);                     // row-stable softmax, [m,n]
Value relu(Value a);
Value sigmoid(Value a);
Value vexp(Value a);
Value vlog(Value a);                             // domain error on entries <= 0
Value add(Value a, Value b);                     // same shape, or scalar broadcast
Value sub(Value a, Value b);
Value mul(Value a, Value b);                     // same shape, or scalar broadcast
Value scale(Value a, double c);
Value clamp(Value a, double lo, double hi);      // subgradient 1 inside, 0 outside
Value vsum(Value a);                             // all elements -> scalar
Value reshape(Value a, Shape s);
Value concat_cols(Value a, Value b);             // [s,p] ++ [s,q] -> [s,p+q]
Value concat(const std::vector<Value>& parts);   // rank-1 concat
Value row(Value a, int i);                       // [m,n] -> [n]
Value pick(Value a, int i);                      // [n] -> scalar
Value gather_rows(Value table, const std::vector<int>& ids);  // [v,d] -> [s,d]
Value add_bias_rows(Value x, Value b);           // [s,d] + [d] per row

// u.v / (|u||v| + eps), eps = 1e-12. Rank-1 inputs of equal length.
Value cosine_sim(Value u, Value v);

// Mean over rows of x where mask is 1; empty mask -> empty_scope_error.
Value masked_mean_pool(Value x, const std::vector<std::uint8_t>& mask);

// ---- composites -------------------------------------------------------------

Value dot(Value u, Value v);                     // vsum(mul(u, v))
Value affine(Value x, Value w, Value b);         // [k], [k,c], [c] -> [c]
Value matvec(Value m, Value v);                  // [r,c] x [c] -> [r]

// -[y log p + (1-y) log(1-p)] with p clamped to [1e-12, 1-1e-12].
Value binary_cross_entropy(Value prob, int label);

// Reverse sweep from a scalar loss; fills grad() of every antecedent.
void backward(Value loss);

}  // namespace dasco
