#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "topicsent/autograd.hpp"
#include "topicsent/rng.hpp"

namespace topicsent::nn {

using ag::Parameter;
using ag::Tape;
using ag::Var;

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform(Tensor::Shape shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Fully connected layer: x [batch, in] -> x W + b [batch, out].
class Dense {
 public:
  Dense() = default;
  Dense(std::string name, std::size_t in, std::size_t out, Rng& rng);

  Var operator()(Tape& tape, Var x);
  std::vector<Parameter*> parameters() { return {&weight_, &bias_}; }
  std::size_t in_features() const { return weight_.value.rows(); }
  std::size_t out_features() const { return weight_.value.cols(); }

 private:
  Parameter weight_;
  Parameter bias_;
};

/// Valid 1-D convolution over [batch, length, channels] inputs.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(std::string name, std::size_t channels, std::size_t filters, std::size_t width,
         Rng& rng);

  Var operator()(Tape& tape, Var x);
  std::vector<Parameter*> parameters() { return {&kernel_, &bias_}; }
  std::size_t filters() const { return kernel_.value.dim(0); }
  std::size_t width() const { return kernel_.value.dim(2); }

 private:
  Parameter kernel_;
  Parameter bias_;
};

struct LstmState {
  Var h;
  Var c;
};

/// Single-direction LSTM. Gate blocks are laid out [input, forget, candidate,
/// output] along the 4*hidden axis of every weight.
class Lstm {
 public:
  Lstm() = default;
  Lstm(std::string name, std::size_t input, std::size_t hidden, Rng& rng);

  std::size_t hidden() const { return hidden_; }
  std::size_t input() const { return input_; }

  /// One step: i,f,o = sigmoid(.), g = tanh(.), c = f*c_prev + i*g, h = o*tanh(c).
  LstmState step(Tape& tape, Var x, const LstmState& prev);

  /// Runs over seq (each [batch, input]) from a zero state. When reverse is
  /// set the sequence is consumed back to front; outputs are still returned in
  /// sequence order.
  std::vector<Var> run(Tape& tape, const std::vector<Var>& seq, bool reverse = false);

  std::vector<Parameter*> parameters() { return {&w_input_, &w_hidden_, &bias_}; }

 private:
  std::size_t input_ = 0;
  std::size_t hidden_ = 0;
  Parameter w_input_;
  Parameter w_hidden_;
  Parameter bias_;
};

struct BiSequence {
  std::vector<Var> forward;
  std::vector<Var> backward;

  /// Per-step concatenation [h_fwd, h_bwd].
  std::vector<Var> concat() const;
  /// Final states of both directions: h_fwd at the last step, h_bwd at step 0.
  Var final_state() const;
};

class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(std::string name, std::size_t input, std::size_t hidden, Rng& rng);

  BiSequence run(Tape& tape, const std::vector<Var>& seq);
  std::vector<Parameter*> parameters();
  std::size_t hidden() const { return forward_.hidden(); }

 private:
  Lstm forward_;
  Lstm backward_;
};

/// Plain (tape-free) weights for one LSTM step, as used by the reference
/// evaluation in lstm_step().
struct LstmWeights {
  Tensor w_input;   // [input, 4*hidden]
  Tensor w_hidden;  // [hidden, 4*hidden]
  Tensor bias;      // [4*hidden]
};

std::pair<std::vector<double>, std::vector<double>> lstm_step(
    std::span<const double> x, std::span<const double> h_prev,
    std::span<const double> c_prev, const LstmWeights& weights);

}  // namespace topicsent::nn
