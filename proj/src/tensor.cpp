#include "dasco/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dasco/errors.hpp"

namespace dasco {

std::int64_t numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (numel(shape) != static_cast<std::int64_t>(data.size()))
    throw shape_error("tensor: " + shape_str(shape) + " does not hold " +
                      std::to_string(data.size()) + " elements");
}

Tensor Tensor::zeros(Shape s) {
  auto n = numel(s);
  return Tensor(std::move(s), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

double& Tensor::at(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
double Tensor::at(int i, int j) const { return data[static_cast<std::size_t>(i) * shape[1] + j]; }

// ---- Value accessors ---------------------------------------------------------

const Shape& Value::shape() const { return tape->shape_of(id); }
std::span<const double> Value::data() const { return tape->data_of(id); }
std::span<const double> Value::grad() const { return tape->grad_of(id); }

double Value::scalar() const {
  const auto& d = tape->data_of(id);
  if (d.size() != 1)
    throw shape_error("scalar(): value has shape " + shape_str(shape()));
  return d[0];
}

int Value::rows() const {
  const auto& s = shape();
  if (s.size() != 2) throw shape_error("rows(): value has shape " + shape_str(s));
  return s[0];
}

int Value::cols() const {
  const auto& s = shape();
  if (s.size() != 2) throw shape_error("cols(): value has shape " + shape_str(s));
  return s[1];
}

// ---- Tape --------------------------------------------------------------------

Value Tape::emplace(Shape shape, std::vector<double> data, std::vector<int> inputs,
                    const char* op, BackFn back) {
  if (numel(shape) != static_cast<std::int64_t>(data.size()))
    throw shape_error(std::string(op) + ": result buffer does not match " + shape_str(shape));
  Node n;
  n.shape = std::move(shape);
  n.data = std::move(data);
  n.inputs = std::move(inputs);
  n.op = op;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Value{this, static_cast<int>(nodes_.size()) - 1};
}

Value Tape::input(Shape shape, std::vector<double> data) {
  return emplace(std::move(shape), std::move(data), {}, "input", nullptr);
}

Value Tape::input(const Tensor& t) { return input(t.shape, t.data); }

Value Tape::scalar(double v) { return input(Shape{}, {v}); }

void Tape::run_backward(int loss_id) {
  if (loss_id < 0 || loss_id >= size()) throw shape_error("backward: loss not on this tape");
  for (int i = 0; i <= loss_id; ++i)
    nodes_[i].grad.assign(nodes_[i].data.size(), 0.0);
  nodes_[loss_id].grad[0] = 1.0;
  for (int i = loss_id; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back(*this, i);
  }
}

void backward(Value loss) {
  if (!loss.valid()) throw shape_error("backward: invalid value");
  if (numel(loss.shape()) != 1)
    throw shape_error("backward: loss has shape " + shape_str(loss.shape()) + ", expected scalar");
  loss.tape->run_backward(loss.id);
}

// ---- helpers -----------------------------------------------------------------

namespace {

Tape& same_tape(Value a, Value b, const char* op) {
  if (!a.valid() || !b.valid() || a.tape != b.tape)
    throw shape_error(std::string(op) + ": operands on different tapes");
  return *a.tape;
}

void require_rank(Value v, std::size_t rank, const char* op) {
  if (v.shape().size() != rank)
    throw shape_error(std::string(op) + ": expected rank " + std::to_string(rank) +
                      ", got " + shape_str(v.shape()));
}

// Elementwise unary op with local derivative computed from (x, y).
Value unary(Value a, const char* op, double (*fwd)(double),
            double (*dfd)(double x, double y)) {
  Tape& t = *a.tape;
  const auto& x = t.data_of(a.id);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
  return t.emplace(a.shape(), std::move(y), {a.id}, op,
                   [aid = a.id, dfd](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     const auto& x = t.data_of(aid);
                     const auto& y = t.data_of(out);
                     auto& ga = t.grad_slot(aid);
                     for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfd(x[i], y[i]);
                   });
}

enum class Arith { Add, Sub, Mul };

// Same-shape elementwise with scalar broadcasting on either side.
Value arith(Value a, Value b, Arith kind, const char* op) {
  Tape& t = same_tape(a, b, op);
  const auto& xs = t.data_of(a.id);
  const auto& ys = t.data_of(b.id);
  const bool a_scalar = xs.size() == 1 && a.shape().empty();
  const bool b_scalar = ys.size() == 1 && b.shape().empty();
  if (!(a.shape() == b.shape() || a_scalar || b_scalar))
    throw shape_error(std::string(op) + ": shapes " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
  const Shape out_shape = a_scalar ? b.shape() : a.shape();
  const std::size_t n = std::max(xs.size(), ys.size());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[a_scalar ? 0 : i];
    const double y = ys[b_scalar ? 0 : i];
    out[i] = kind == Arith::Add ? x + y : kind == Arith::Sub ? x - y : x * y;
  }
  return t.emplace(out_shape, std::move(out), {a.id, b.id}, op,
                   [aid = a.id, bid = b.id, a_scalar, b_scalar, kind](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     const auto& xs = t.data_of(aid);
                     const auto& ys = t.data_of(bid);
                     auto& ga = t.grad_slot(aid);
                     auto& gb = t.grad_slot(bid);
                     for (std::size_t i = 0; i < g.size(); ++i) {
                       double da, db;
                       switch (kind) {
                         case Arith::Add: da = g[i]; db = g[i]; break;
                         case Arith::Sub: da = g[i]; db = -g[i]; break;
                         default:
                           da = g[i] * ys[b_scalar ? 0 : i];
                           db = g[i] * xs[a_scalar ? 0 : i];
                       }
                       ga[a_scalar ? 0 : i] += da;
                       gb[b_scalar ? 0 : i] += db;
                     }
                   });
}

}  // namespace

// ---- operations ----------------------------------------------------------------

Value matmul(Value a, Value b) {
  Tape& t = same_tape(a, b, "matmul");
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const int m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k)
    throw shape_error("matmul: inner dimensions disagree: " + shape_str(a.shape()) + " x " +
                      shape_str(b.shape()));
  const auto& A = t.data_of(a.id);
  const auto& B = t.data_of(b.id);
  std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double aip = A[static_cast<std::size_t>(i) * k + p];
      if (aip == 0.0) continue;
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(i) * n + j] += aip * B[static_cast<std::size_t>(p) * n + j];
    }
  return t.emplace({m, n}, std::move(out), {a.id, b.id}, "matmul",
                   [aid = a.id, bid = b.id, m, k, n](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     const auto& A = t.data_of(aid);
                     const auto& B = t.data_of(bid);
                     auto& ga = t.grad_slot(aid);
                     auto& gb = t.grad_slot(bid);
                     // a.grad += g b^T, b.grad += a^T g
                     for (int i = 0; i < m; ++i)
                       for (int j = 0; j < n; ++j) {
                         const double gij = g[static_cast<std::size_t>(i) * n + j];
                         if (gij == 0.0) continue;
                         for (int p = 0; p < k; ++p) {
                           ga[static_cast<std::size_t>(i) * k + p] +=
                               gij * B[static_cast<std::size_t>(p) * n + j];
                           gb[static_cast<std::size_t>(p) * n + j] +=
                               gij * A[static_cast<std::size_t>(i) * k + p];
                         }
                       }
                   });
}

Value transpose(Value a) {
  Tape& t = *a.tape;
  require_rank(a, 2, "transpose");
  const int m = a.rows(), n = a.cols();
  const auto& x = t.data_of(a.id);
  std::vector<double> y(x.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      y[static_cast<std::size_t>(j) * m + i] = x[static_cast<std::size_t>(i) * n + j];
  return t.emplace({n, m}, std::move(y), {a.id}, "transpose",
                   [aid = a.id, m, n](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& ga = t.grad_slot(aid);
                     for (int i = 0; i < m; ++i)
                       for (int j = 0; j < n; ++j)
                         ga[static_cast<std::size_t>(i) * n + j] +=
                             g[static_cast<std::size_t>(j) * m + i];
                   });
}

Value softmax_rows(Value a) {
  Tape& t = *a.tape;
  require_rank(a, 2, "softmax_rows");
  const int m = a.rows(), n = a.cols();
  const auto& x = t.data_of(a.id);
  std::vector<double> y(x.size());
  for (int i = 0; i < m; ++i) {
    const std::size_t off = static_cast<std::size_t>(i) * n;
    double mx = x[off];
    for (int j = 1; j < n; ++j) mx = std::max(mx, x[off + j]);
    double z = 0.0;
    for (int j = 0; j < n; ++j) {
      y[off + j] = std::exp(x[off + j] - mx);
      z += y[off + j];
    }
    for (int j = 0; j < n; ++j) y[off + j] /= z;
  }
  return t.emplace({m, n}, std::move(y), {a.id}, "softmax_rows",
                   [aid = a.id, m, n](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     const auto& y = t.data_of(out);
                     auto& ga = t.grad_slot(aid);
                     for (int i = 0; i < m; ++i) {
                       const std::size_t off = static_cast<std::size_t>(i) * n;
                       double gy = 0.0;
                       for (int j = 0; j < n; ++j) gy += g[off + j] * y[off + j];
                       for (int j = 0; j < n; ++j)
                         ga[off + j] += y[off + j] * (g[off + j] - gy);
                     }
                   });
}

Value relu(Value a) {
  return unary(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Value sigmoid(Value a) {
  return unary(a, "sigmoid",
               [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
               [](double, double y) { return y * (1.0 - y); });
}

Value vexp(Value a) {
  return unary(a, "exp", [](double x) { return std::exp(x); },
               [](double, double y) { return y; });
}

Value vlog(Value a) {
  const auto& x = a.tape->data_of(a.id);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] <= 0.0)
      throw domain_error("log: non-positive entry " + std::to_string(x[i]) + " at index " +
                         std::to_string(i));
  return unary(a, "log", [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Value add(Value a, Value b) { return arith(a, b, Arith::Add, "add"); }
Value sub(Value a, Value b) { return arith(a, b, Arith::Sub, "sub"); }
Value mul(Value a, Value b) { return arith(a, b, Arith::Mul, "mul"); }

Value scale(Value a, double c) {
  Tape& t = *a.tape;
  const auto& x = t.data_of(a.id);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i];
  return t.emplace(a.shape(), std::move(y), {a.id}, "scale",
                   [aid = a.id, c](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& ga = t.grad_slot(aid);
                     for (std::size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
                   });
}

Value clamp(Value a, double lo, double hi) {
  Tape& t = *a.tape;
  const auto& x = t.data_of(a.id);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::min(hi, std::max(lo, x[i]));
  return t.emplace(a.shape(), std::move(y), {a.id}, "clamp",
                   [aid = a.id, lo, hi](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     const auto& x = t.data_of(aid);
                     auto& ga = t.grad_slot(aid);
                     for (std::size_t i = 0; i < g.size(); ++i)
                       if (x[i] >= lo && x[i] <= hi) ga[i] += g[i];
                   });
}

Value vsum(Value a) {
  Tape& t = *a.tape;
  const auto& x = t.data_of(a.id);
  double s = 0.0;
  for (double v : x) s += v;
  return t.emplace({}, {s}, {a.id}, "sum",
                   [aid = a.id](Tape& t, int out) {
                     const double g = t.grad_of(out)[0];
                     auto& ga = t.grad_slot(aid);
                     for (auto& v : ga) v += g;
                   });
}

Value reshape(Value a, Shape s) {
  Tape& t = *a.tape;
  if (numel(s) != numel(a.shape()))
    throw shape_error("reshape: " + shape_str(a.shape()) + " -> " + shape_str(s));
  return t.emplace(std::move(s), std::vector<double>(t.data_of(a.id)), {a.id}, "reshape",
                   [aid = a.id](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& ga = t.grad_slot(aid);
                     for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                   });
}

Value concat_cols(Value a, Value b) {
  Tape& t = same_tape(a, b, "concat_cols");
  require_rank(a, 2, "concat_cols");
  require_rank(b, 2, "concat_cols");
  const int s = a.rows(), p = a.cols(), q = b.cols();
  if (b.rows() != s)
    throw shape_error("concat_cols: row counts disagree: " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
  const auto& x = t.data_of(a.id);
  const auto& y = t.data_of(b.id);
  std::vector<double> out(static_cast<std::size_t>(s) * (p + q));
  for (int i = 0; i < s; ++i) {
    std::copy_n(&x[static_cast<std::size_t>(i) * p], p, &out[static_cast<std::size_t>(i) * (p + q)]);
    std::copy_n(&y[static_cast<std::size_t>(i) * q], q,
                &out[static_cast<std::size_t>(i) * (p + q) + p]);
  }
  return t.emplace({s, p + q}, std::move(out), {a.id, b.id}, "concat_cols",
                   [aid = a.id, bid = b.id, s, p, q](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& ga = t.grad_slot(aid);
                     auto& gb = t.grad_slot(bid);
                     for (int i = 0; i < s; ++i) {
                       const std::size_t off = static_cast<std::size_t>(i) * (p + q);
                       for (int j = 0; j < p; ++j) ga[static_cast<std::size_t>(i) * p + j] += g[off + j];
                       for (int j = 0; j < q; ++j)
                         gb[static_cast<std::size_t>(i) * q + j] += g[off + p + j];
                     }
                   });
}

Value concat(const std::vector<Value>& parts) {
  if (parts.empty()) throw shape_error("concat: no operands");
  Tape& t = *parts[0].tape;
  std::vector<double> out;
  std::vector<int> ids;
  std::vector<int> sizes;
  for (Value v : parts) {
    same_tape(parts[0], v, "concat");
    require_rank(v, 1, "concat");
    const auto& x = t.data_of(v.id);
    out.insert(out.end(), x.begin(), x.end());
    ids.push_back(v.id);
    sizes.push_back(static_cast<int>(x.size()));
  }
  const int n = static_cast<int>(out.size());
  return t.emplace({n}, std::move(out), ids, "concat",
                   [ids, sizes](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     std::size_t off = 0;
                     for (std::size_t k = 0; k < ids.size(); ++k) {
                       auto& gp = t.grad_slot(ids[k]);
                       for (int j = 0; j < sizes[k]; ++j) gp[j] += g[off + j];
                       off += static_cast<std::size_t>(sizes[k]);
                     }
                   });
}

Value row(Value a, int i) {
  Tape& t = *a.tape;
  require_rank(a, 2, "row");
  const int m = a.rows(), n = a.cols();
  if (i < 0 || i >= m) throw shape_error("row: index " + std::to_string(i) + " out of range");
  const auto& x = t.data_of(a.id);
  std::vector<double> y(x.begin() + static_cast<std::size_t>(i) * n,
                        x.begin() + static_cast<std::size_t>(i + 1) * n);
  return t.emplace({n}, std::move(y), {a.id}, "row",
                   [aid = a.id, i, n](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& ga = t.grad_slot(aid);
                     for (int j = 0; j < n; ++j) ga[static_cast<std::size_t>(i) * n + j] += g[j];
                   });
}

Value pick(Value a, int i) {
  Tape& t = *a.tape;
  require_rank(a, 1, "pick");
  const int n = a.shape()[0];
  if (i < 0 || i >= n) throw shape_error("pick: index " + std::to_string(i) + " out of range");
  return t.emplace({}, {t.data_of(a.id)[i]}, {a.id}, "pick",
                   [aid = a.id, i](Tape& t, int out) {
                     t.grad_slot(aid)[i] += t.grad_of(out)[0];
                   });
}

Value gather_rows(Value table, const std::vector<int>& ids) {
  Tape& t = *table.tape;
  require_rank(table, 2, "gather_rows");
  const int v = table.rows(), d = table.cols();
  const auto& x = t.data_of(table.id);
  std::vector<double> out(ids.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= v)
      throw shape_error("gather_rows: row " + std::to_string(ids[i]) + " out of range");
    std::copy_n(&x[static_cast<std::size_t>(ids[i]) * d], d, &out[i * static_cast<std::size_t>(d)]);
  }
  return t.emplace({static_cast<int>(ids.size()), d}, std::move(out), {table.id}, "gather_rows",
                   [tid = table.id, ids, d](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& gt = t.grad_slot(tid);
                     for (std::size_t i = 0; i < ids.size(); ++i)
                       for (int j = 0; j < d; ++j)
                         gt[static_cast<std::size_t>(ids[i]) * d + j] +=
                             g[i * static_cast<std::size_t>(d) + j];
                   });
}

Value add_bias_rows(Value x, Value b) {
  Tape& t = same_tape(x, b, "add_bias_rows");
  require_rank(x, 2, "add_bias_rows");
  require_rank(b, 1, "add_bias_rows");
  const int s = x.rows(), d = x.cols();
  if (b.shape()[0] != d)
    throw shape_error("add_bias_rows: " + shape_str(x.shape()) + " vs bias " +
                      shape_str(b.shape()));
  const auto& xv = t.data_of(x.id);
  const auto& bv = t.data_of(b.id);
  std::vector<double> out(xv.size());
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < d; ++j)
      out[static_cast<std::size_t>(i) * d + j] = xv[static_cast<std::size_t>(i) * d + j] + bv[j];
  return t.emplace({s, d}, std::move(out), {x.id, b.id}, "add_bias_rows",
                   [xid = x.id, bid = b.id, s, d](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& gx = t.grad_slot(xid);
                     auto& gb = t.grad_slot(bid);
                     for (int i = 0; i < s; ++i)
                       for (int j = 0; j < d; ++j) {
                         gx[static_cast<std::size_t>(i) * d + j] += g[static_cast<std::size_t>(i) * d + j];
                         gb[j] += g[static_cast<std::size_t>(i) * d + j];
                       }
                   });
}

Value cosine_sim(Value u, Value v) {
  Tape& t = same_tape(u, v, "cosine_sim");
  require_rank(u, 1, "cosine_sim");
  require_rank(v, 1, "cosine_sim");
  if (u.shape() != v.shape())
    throw shape_error("cosine_sim: lengths disagree: " + shape_str(u.shape()) + " vs " +
                      shape_str(v.shape()));
  constexpr double kEps = 1e-12;
  const auto& uv = t.data_of(u.id);
  const auto& vv = t.data_of(v.id);
  double s = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < uv.size(); ++i) {
    s += uv[i] * vv[i];
    nu += uv[i] * uv[i];
    nv += vv[i] * vv[i];
  }
  const double a = std::sqrt(nu), b = std::sqrt(nv);
  const double c = a * b + kEps;
  const double f = s / c;
  return t.emplace({}, {f}, {u.id, v.id}, "cosine_sim",
                   [uid = u.id, vid = v.id, a, b, c, f](Tape& t, int out) {
                     const double g = t.grad_of(out)[0];
                     const auto& uv = t.data_of(uid);
                     const auto& vv = t.data_of(vid);
                     auto& gu = t.grad_slot(uid);
                     auto& gv = t.grad_slot(vid);
                     const double sa = a > 0.0 ? a : 1.0;
                     const double sb = b > 0.0 ? b : 1.0;
                     for (std::size_t i = 0; i < uv.size(); ++i) {
                       gu[i] += g * (vv[i] / c - f * b / (sa * c) * uv[i]);
                       gv[i] += g * (uv[i] / c - f * a / (sb * c) * vv[i]);
                     }
                   });
}

Value masked_mean_pool(Value x, const std::vector<std::uint8_t>& mask) {
  Tape& t = *x.tape;
  require_rank(x, 2, "masked_mean_pool");
  const int s = x.rows(), d = x.cols();
  if (static_cast<int>(mask.size()) != s)
    throw shape_error("masked_mean_pool: mask length " + std::to_string(mask.size()) +
                      " vs " + std::to_string(s) + " rows");
  int cnt = 0;
  for (auto m : mask) cnt += m ? 1 : 0;
  if (cnt == 0) throw empty_scope_error("masked_mean_pool: mask selects no rows");
  const auto& xv = t.data_of(x.id);
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < s; ++i) {
    if (!mask[i]) continue;
    for (int j = 0; j < d; ++j) out[j] += xv[static_cast<std::size_t>(i) * d + j];
  }
  for (int j = 0; j < d; ++j) out[j] /= cnt;
  return t.emplace({d}, std::move(out), {x.id}, "masked_mean_pool",
                   [xid = x.id, mask, s, d, cnt](Tape& t, int out) {
                     const auto& g = t.grad_of(out);
                     auto& gx = t.grad_slot(xid);
                     for (int i = 0; i < s; ++i) {
                       if (!mask[i]) continue;
                       for (int j = 0; j < d; ++j)
                         gx[static_cast<std::size_t>(i) * d + j] += g[j] / cnt;
                     }
                   });
}

Value dot(Value u, Value v) { return vsum(mul(u, v)); }

Value affine(Value x, Value w, Value b) {
  require_rank(x, 1, "affine");
  require_rank(w, 2, "affine");
  const int k = x.shape()[0];
  if (w.rows() != k)
    throw shape_error("affine: input " + shape_str(x.shape()) + " vs weights " +
                      shape_str(w.shape()));
  const int c = w.cols();
  return add(reshape(matmul(reshape(x, {1, k}), w), {c}), b);
}

Value matvec(Value m, Value v) {
  require_rank(m, 2, "matvec");
  require_rank(v, 1, "matvec");
  if (m.cols() != v.shape()[0])
    throw shape_error("matvec: " + shape_str(m.shape()) + " x " + shape_str(v.shape()));
  return reshape(matmul(m, reshape(v, {m.cols(), 1})), {m.rows()});
}

Value binary_cross_entropy(Value prob, int label) {
  constexpr double kEps = 1e-12;
  Tape& t = *prob.tape;
  Value p = clamp(prob, kEps, 1.0 - kEps);
  if (label == 1) return scale(vlog(p), -1.0);
  return scale(vlog(sub(t.scalar(1.0), p)), -1.0);
}

}  // namespace dasco
