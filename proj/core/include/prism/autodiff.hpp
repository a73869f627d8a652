#pragma once

// Minimal reverse-mode differentiation over dense matrices. A Tape records
// every operation in creation order; backward() walks it in reverse, so the
// record is its own topological order. Each op below carries its hand-derived
// adjoint.

#include <functional>
#include <initializer_list>
#include <vector>

#include "prism/params.hpp"

namespace prism::ad {

class Tape;

class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 variable.
  double scalar() const { return value()(0, 0); }

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  /// With record_gradients = false only forward values are kept.
  explicit Tape(const ParamStore* params = nullptr, bool record_gradients = true)
      : params_(params), record_(record_gradients) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to a stored parameter; repeated calls return the same Var.
  Var param(std::string_view name);

  /// Seeds d(output)/d(output) = 1 for a 1x1 output and propagates.
  void backward(const Var& output);
  /// Gradients of the last backward() per parameter (zeros where unused).
  Gradients gradients() const;

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  // Internal interface used by the op implementations.
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    int param_index = -1;
    std::function<void(Tape&, const Matrix&)> backprop;
  };
  Var push(Matrix value, std::initializer_list<Var> inputs,
           std::function<void(Tape&, const Matrix&)> backprop);
  const Node& node(int id) const { return nodes_[std::size_t(id)]; }
  bool needs_grad(const Var& v) const { return nodes_[std::size_t(v.id())].needs_grad; }
  /// grad(v) += delta, allocating lazily.
  void add_grad(const Var& v, const Matrix& delta);

 private:
  const ParamStore* params_;
  bool record_;
  std::vector<Node> nodes_;
  std::vector<int> param_vars_;
};

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
/// a (n x k) + row (1 x k) broadcast over rows.
Var add_row(const Var& a, const Var& row);
Var silu(const Var& a);
Var sigmoid(const Var& a);
Var one_minus(const Var& a);
/// a * s where s is 1x1.
Var mul_scalar(const Var& a, const Var& s);
Var scale(const Var& a, double c);
Var add_constant(const Var& a, double c);
Var concat_cols(std::initializer_list<Var> parts);
Var gather_rows(const Var& a, const std::vector<int>& rows);
/// out (n_rows x k), out[idx[e]] += a[e] in edge order.
Var scatter_add_rows(const Var& a, const std::vector<int>& idx, Eigen::Index n_rows);
Var sum_rows(const Var& a);
Var mean_rows(const Var& a);
Var broadcast_rows(const Var& row, Eigen::Index n);
/// Softmax down a column vector (n x 1).
Var softmax_col(const Var& a);
/// Softmax along a row vector (1 x k).
Var softmax_row(const Var& a);
Var select_cols(const Var& a, const std::vector<int>& cols);
Var transpose(const Var& a);
/// Smooth-L1: 0.5 r^2 / delta for |r| < delta, |r| - delta / 2 otherwise. a is 1x1.
Var huber(const Var& a, double target, double delta);

}  // namespace prism::ad
