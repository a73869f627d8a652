#include "prism/autodiff.hpp"

#include <cmath>

#include "prism/error.hpp"

namespace prism::ad {

const Matrix& Var::value() const { return tape_->node(id_).value; }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, -1, {}});
  return Var(this, int(nodes_.size()) - 1);
}

Var Tape::param(std::string_view name) {
  if (params_ == nullptr) throw ConfigError("tape has no parameter store");
  const int idx = params_->index(name);
  if (param_vars_.size() < params_->size()) param_vars_.resize(params_->size(), -1);
  if (param_vars_[std::size_t(idx)] >= 0) return Var(this, param_vars_[std::size_t(idx)]);
  nodes_.push_back(Node{params_->value(idx), {}, record_, idx, {}});
  const int id = int(nodes_.size()) - 1;
  param_vars_[std::size_t(idx)] = id;
  return Var(this, id);
}

Var Tape::push(Matrix value, std::initializer_list<Var> inputs,
               std::function<void(Tape&, const Matrix&)> backprop) {
  bool needs = false;
  if (record_)
    for (const auto& in : inputs) needs = needs || nodes_[std::size_t(in.id())].needs_grad;
  if (!value.allFinite()) throw NonFinite("non-finite value produced during forward pass");
  nodes_.push_back(Node{std::move(value), {}, needs, -1, needs ? std::move(backprop) : nullptr});
  return Var(this, int(nodes_.size()) - 1);
}

void Tape::add_grad(const Var& v, const Matrix& delta) {
  auto& n = nodes_[std::size_t(v.id())];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0)
    n.grad = delta;
  else
    n.grad += delta;
}

void Tape::backward(const Var& output) {
  if (!record_) throw ConfigError("backward() on a tape that does not record gradients");
  if (output.rows() != 1 || output.cols() != 1) throw ShapeMismatch("backward() needs a 1x1 output");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[std::size_t(output.id())].grad = Matrix::Ones(1, 1);
  for (int id = output.id(); id >= 0; --id) {
    auto& n = nodes_[std::size_t(id)];
    if (!n.needs_grad || n.grad.size() == 0 || !n.backprop) continue;
    n.backprop(*this, n.grad);
  }
}

Gradients Tape::gradients() const {
  Gradients g = zero_gradients(*params_);
  for (std::size_t p = 0; p < param_vars_.size(); ++p) {
    const int id = param_vars_[p];
    if (id < 0) continue;
    const auto& grad = nodes_[std::size_t(id)].grad;
    if (grad.size() != 0) g[p] = grad;
  }
  return g;
}

namespace {

void check_same_tape(const Var& a, const Var& b) {
  if (a.tape() != b.tape()) throw ShapeMismatch("variables belong to different tapes");
}

void check_shape(bool ok, const char* op) {
  if (!ok) throw ShapeMismatch(std::string("shape mismatch in ") + op);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Var matmul(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.cols() == b.rows(), "matmul");
  Tape& t = *a.tape();
  return t.push(a.value() * b.value(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.needs_grad(a)) t.add_grad(a, g * b.value().transpose());
    if (t.needs_grad(b)) t.add_grad(b, a.value().transpose() * g);
  });
}

Var add(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  return a.tape()->push(a.value() + b.value(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.add_grad(a, g);
    t.add_grad(b, g);
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_tape(a, b);
  check_shape(a.rows() == b.rows() && a.cols() == b.cols(), "sub");
  return a.tape()->push(a.value() - b.value(), {a, b}, [a, b](Tape& t, const Matrix& g) {
    t.add_grad(a, g);
    if (t.needs_grad(b)) t.add_grad(b, -g);
  });
}

Var add_row(const Var& a, const Var& row) {
  check_same_tape(a, row);
  check_shape(row.rows() == 1 && row.cols() == a.cols(), "add_row");
  Matrix v = a.value();
  v.rowwise() += row.value().row(0);
  return a.tape()->push(std::move(v), {a, row}, [a, row](Tape& t, const Matrix& g) {
    t.add_grad(a, g);
    if (t.needs_grad(row)) t.add_grad(row, g.colwise().sum());
  });
}

Var silu(const Var& a) {
  const Matrix& x = a.value();
  Matrix v = x.unaryExpr([](double z) { return z * logistic(z); });
  return a.tape()->push(std::move(v), {a}, [a](Tape& t, const Matrix& g) {
    const Matrix d = a.value().unaryExpr([](double z) {
      const double s = logistic(z);
      return s * (1.0 + z * (1.0 - s));
    });
    t.add_grad(a, g.cwiseProduct(d));
  });
}

Var sigmoid(const Var& a) {
  Matrix v = a.value().unaryExpr([](double z) { return logistic(z); });
  Tape& t = *a.tape();
  const int out_id = int(t.size());
  return t.push(std::move(v), {a}, [a, out_id](Tape& t, const Matrix& g) {
    const Matrix& s = t.node(out_id).value;
    t.add_grad(a, g.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix())));
  });
}

Var one_minus(const Var& a) {
  Matrix v = (1.0 - a.value().array()).matrix();
  return a.tape()->push(std::move(v), {a}, [a](Tape& t, const Matrix& g) { t.add_grad(a, -g); });
}

Var mul_scalar(const Var& a, const Var& s) {
  check_same_tape(a, s);
  check_shape(s.rows() == 1 && s.cols() == 1, "mul_scalar");
  return a.tape()->push(a.value() * s.scalar(), {a, s}, [a, s](Tape& t, const Matrix& g) {
    if (t.needs_grad(a)) t.add_grad(a, g * s.scalar());
    if (t.needs_grad(s)) t.add_grad(s, Matrix::Constant(1, 1, g.cwiseProduct(a.value()).sum()));
  });
}

Var scale(const Var& a, double c) {
  return a.tape()->push(a.value() * c, {a}, [a, c](Tape& t, const Matrix& g) { t.add_grad(a, g * c); });
}

Var add_constant(const Var& a, double c) {
  Matrix v = (a.value().array() + c).matrix();
  return a.tape()->push(std::move(v), {a}, [a](Tape& t, const Matrix& g) { t.add_grad(a, g); });
}

Var concat_cols(std::initializer_list<Var> parts) {
  if (parts.size() == 0) throw ShapeMismatch("concat_cols of nothing");
  const Var first = *parts.begin();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    check_same_tape(first, p);
    check_shape(p.rows() == first.rows(), "concat_cols");
    cols += p.cols();
  }
  Matrix v(first.rows(), cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts);
  Tape& t = *first.tape();
  return t.push(std::move(v), parts, [inputs](Tape& t, const Matrix& g) {
    Eigen::Index at = 0;
    for (const auto& p : inputs) {
      if (t.needs_grad(p)) t.add_grad(p, g.middleCols(at, p.cols()));
      at += p.cols();
    }
  });
}

Var gather_rows(const Var& a, const std::vector<int>& rows) {
  Matrix v(Eigen::Index(rows.size()), a.cols());
  for (std::size_t e = 0; e < rows.size(); ++e) {
    check_shape(rows[e] >= 0 && rows[e] < a.rows(), "gather_rows");
    v.row(Eigen::Index(e)) = a.value().row(rows[e]);
  }
  return a.tape()->push(std::move(v), {a}, [a, rows](Tape& t, const Matrix& g) {
    Matrix d = Matrix::Zero(a.rows(), a.cols());
    for (std::size_t e = 0; e < rows.size(); ++e) d.row(rows[e]) += g.row(Eigen::Index(e));
    t.add_grad(a, d);
  });
}

Var scatter_add_rows(const Var& a, const std::vector<int>& idx, Eigen::Index n_rows) {
  check_shape(Eigen::Index(idx.size()) == a.rows(), "scatter_add_rows");
  Matrix v = Matrix::Zero(n_rows, a.cols());
  for (std::size_t e = 0; e < idx.size(); ++e) {
    check_shape(idx[e] >= 0 && idx[e] < n_rows, "scatter_add_rows");
    v.row(idx[e]) += a.value().row(Eigen::Index(e));
  }
  return a.tape()->push(std::move(v), {a}, [a, idx](Tape& t, const Matrix& g) {
    Matrix d(a.rows(), a.cols());
    for (std::size_t e = 0; e < idx.size(); ++e) d.row(Eigen::Index(e)) = g.row(idx[e]);
    t.add_grad(a, d);
  });
}

Var sum_rows(const Var& a) {
  return a.tape()->push(a.value().colwise().sum(), {a}, [a](Tape& t, const Matrix& g) {
    t.add_grad(a, g.replicate(a.rows(), 1));
  });
}

Var mean_rows(const Var& a) {
  if (a.rows() == 0) throw EmptyInput("mean over zero rows");
  const double inv = 1.0 / double(a.rows());
  return a.tape()->push(a.value().colwise().mean(), {a}, [a, inv](Tape& t, const Matrix& g) {
    t.add_grad(a, (g * inv).replicate(a.rows(), 1));
  });
}

Var broadcast_rows(const Var& row, Eigen::Index n) {
  check_shape(row.rows() == 1, "broadcast_rows");
  return row.tape()->push(row.value().replicate(n, 1), {row}, [row](Tape& t, const Matrix& g) {
    t.add_grad(row, g.colwise().sum());
  });
}

namespace {

Var softmax_vector(const Var& a, bool column) {
  const Matrix& x = a.value();
  Matrix v = (x.array() - x.maxCoeff()).exp().matrix();
  v /= v.sum();
  Tape& t = *a.tape();
  const int out_id = int(t.size());
  (void)column;
  return t.push(std::move(v), {a}, [a, out_id](Tape& t, const Matrix& g) {
    const Matrix& y = t.node(out_id).value;
    const double dot = g.cwiseProduct(y).sum();
    t.add_grad(a, y.cwiseProduct((g.array() - dot).matrix()));
  });
}

}  // namespace

Var softmax_col(const Var& a) {
  check_shape(a.cols() == 1 && a.rows() >= 1, "softmax_col");
  return softmax_vector(a, true);
}

Var softmax_row(const Var& a) {
  check_shape(a.rows() == 1 && a.cols() >= 1, "softmax_row");
  return softmax_vector(a, false);
}

Var select_cols(const Var& a, const std::vector<int>& cols) {
  Matrix v(a.rows(), Eigen::Index(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    check_shape(cols[k] >= 0 && cols[k] < a.cols(), "select_cols");
    v.col(Eigen::Index(k)) = a.value().col(cols[k]);
  }
  return a.tape()->push(std::move(v), {a}, [a, cols](Tape& t, const Matrix& g) {
    Matrix d = Matrix::Zero(a.rows(), a.cols());
    for (std::size_t k = 0; k < cols.size(); ++k) d.col(cols[k]) += g.col(Eigen::Index(k));
    t.add_grad(a, d);
  });
}

Var transpose(const Var& a) {
  return a.tape()->push(a.value().transpose(), {a},
                        [a](Tape& t, const Matrix& g) { t.add_grad(a, g.transpose()); });
}

Var huber(const Var& a, double target, double delta) {
  check_shape(a.rows() == 1 && a.cols() == 1, "huber");
  const double r = a.scalar() - target;
  const double loss = std::abs(r) < delta ? 0.5 * r * r / delta : std::abs(r) - 0.5 * delta;
  const double slope = std::abs(r) < delta ? r / delta : (r > 0 ? 1.0 : -1.0);
  return a.tape()->push(Matrix::Constant(1, 1, loss), {a}, [a, slope](Tape& t, const Matrix& g) {
    t.add_grad(a, g * slope);
  });
}

}  // namespace prism::ad
