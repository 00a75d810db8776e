#pragma once

// Define-by-run reverse-mode differentiation over Tensor values.
//
// Every op appends one node to a Tape; the node records its value, the
// parents it was computed from and a closure that scatters its gradient into
// those parents. Nodes are appended in evaluation order, so walking the tape
// backwards is a valid topological order. A tape is single-owner and its
// backward pass may run once.

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "topicsent/tensor.hpp"

namespace topicsent::ag {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trainable tensor plus its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

  void zero_grad() {
    if (grad.shape() == value.shape()) {
      grad.fill(0.0);
    } else {
      grad = Tensor(value.shape());
    }
  }
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor::Shape& shape() const { return value().shape(); }
  Tape& tape() const { return *tape_; }
  std::uint32_t index() const { return index_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

class Tape {
 public:
  /// Receives the node's forward value and its incoming gradient.
  using Backward = std::function<void(Tape&, const Tensor& value, const Tensor& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to a Parameter; backward() adds into param.grad.
  Var parameter(Parameter& param);

  /// Appends an op result. The node needs a gradient only if one of its
  /// parents does; otherwise the closure is dropped.
  Var record(Tensor value, std::initializer_list<Var> parents, Backward backward);
  Var record(Tensor value, std::span<const Var> parents, Backward backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates to every parameter leaf.
  void backward(Var loss);

  const Tensor& value(Var v) const { return nodes_.at(v.index()).value; }
  const Tensor& value(std::uint32_t index) const { return nodes_.at(index).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.index()).requires_grad; }
  bool requires_grad(std::uint32_t index) const { return nodes_.at(index).requires_grad; }

  /// Gradient of the last backward() with respect to v (zeros if untouched).
  Tensor grad(Var v) const;

  /// Mutable gradient accumulator, allocated as zeros on first use.
  Tensor& grad_buffer(std::uint32_t index);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  std::deque<Node> nodes_;
  bool consumed_ = false;
};

// Elementwise and linear-algebra ops. Shapes are checked; mismatches throw
// ShapeError. Results that contain NaN or Inf throw NumericError.

Var matmul(Var a, Var b);                 // [m,k] x [k,n]
Var add(Var a, Var b);                    // same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);                    // Hadamard
Var add_row(Var a, Var bias);             // [m,n] + [n] broadcast over rows
Var scale(Var a, double factor);
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var concat_cols(std::span<const Var> parts);  // along the last axis of 2-D inputs
Var slice_cols(Var a, std::size_t begin, std::size_t count);
Var reshape(Var a, Tensor::Shape shape);

/// Row lookup: out[i] = table[ids[i]], or zeros where ids[i] < 0. Equal to
/// one_hot(ids) x table without materializing the one-hot matrix.
Var gather_rows(Var table, std::span<const int> ids);
Var sum(Var a);
Var mean(Var a);

/// Mean over all elements of (pred - target)^2.
Var mse(Var pred, const Tensor& target);

/// Mean over rows of -log softmax(logits)[row, label].
Var softmax_cross_entropy(Var logits, std::span<const int> labels);

/// Valid 1-D convolution (cross-correlation).
/// input [batch, length, channels], kernel [filters, channels, width],
/// bias [filters] -> [batch, length - width + 1, filters].
/// Zero input entries are skipped, which makes one-hot inputs cheap.
Var conv1d(Var input, Var kernel, Var bias);

/// Fused LSTM cell. pre [batch, 4H] holds gate pre-activations in the order
/// [i, f, g, o]; c_prev is [batch, H]. Returns [batch, 2H] = [h | c].
Var lstm_cell(Var pre, Var c_prev);

// Non-differentiable helpers.

std::vector<double> softmax(std::span<const double> logits);
Tensor softmax_rows(const Tensor& logits);
double logsumexp(std::span<const double> values);

}  // namespace topicsent::ag
