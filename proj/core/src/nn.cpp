#include "topicsent/nn.hpp"

#include <cmath>

namespace topicsent::nn {

Tensor glorot_uniform(Tensor::Shape shape, std::size_t fan_in, std::size_t fan_out,
                      Rng& rng) {
  Tensor out(std::move(shape));
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : out.values()) v = rng.uniform(-limit, limit);
  return out;
}

Dense::Dense(std::string name, std::size_t in, std::size_t out, Rng& rng)
    : weight_(name + ".weight", glorot_uniform({in, out}, in, out, rng)),
      bias_(name + ".bias", Tensor({out})) {}

Var Dense::operator()(Tape& tape, Var x) {
  return ag::add_row(ag::matmul(x, tape.parameter(weight_)), tape.parameter(bias_));
}

Conv1d::Conv1d(std::string name, std::size_t channels, std::size_t filters,
               std::size_t width, Rng& rng)
    : kernel_(name + ".kernel", glorot_uniform({filters, channels, width}, channels * width,
                                               filters * width, rng)),
      bias_(name + ".bias", Tensor({filters})) {}

Var Conv1d::operator()(Tape& tape, Var x) {
  return ag::conv1d(x, tape.parameter(kernel_), tape.parameter(bias_));
}

Lstm::Lstm(std::string name, std::size_t input, std::size_t hidden, Rng& rng)
    : input_(input), hidden_(hidden) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden));
  Tensor wi({input, 4 * hidden});
  Tensor wh({hidden, 4 * hidden});
  for (double& v : wi.values()) v = rng.uniform(-limit, limit);
  for (double& v : wh.values()) v = rng.uniform(-limit, limit);
  Tensor b({4 * hidden});
  for (std::size_t j = hidden; j < 2 * hidden; ++j) b[j] = 1.0;  // forget gate
  w_input_ = Parameter(name + ".w_input", std::move(wi));
  w_hidden_ = Parameter(name + ".w_hidden", std::move(wh));
  bias_ = Parameter(name + ".bias", std::move(b));
}

LstmState Lstm::step(Tape& tape, Var x, const LstmState& prev) {
  Var pre = ag::add_row(
      ag::add(ag::matmul(x, tape.parameter(w_input_)),
              ag::matmul(prev.h, tape.parameter(w_hidden_))),
      tape.parameter(bias_));
  Var hc = ag::lstm_cell(pre, prev.c);
  return {ag::slice_cols(hc, 0, hidden_), ag::slice_cols(hc, hidden_, hidden_)};
}

std::vector<Var> Lstm::run(Tape& tape, const std::vector<Var>& seq, bool reverse) {
  std::vector<Var> out(seq.size());
  if (seq.empty()) return out;
  const std::size_t batch = seq.front().value().rows();
  // Parameters are bound once per run so the tape holds one leaf per weight.
  Var wi = tape.parameter(w_input_);
  Var wh = tape.parameter(w_hidden_);
  Var b = tape.parameter(bias_);
  LstmState state{tape.constant(Tensor::matrix(batch, hidden_)),
                  tape.constant(Tensor::matrix(batch, hidden_))};
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const std::size_t t = reverse ? seq.size() - 1 - k : k;
    Var pre = ag::add_row(ag::add(ag::matmul(seq[t], wi), ag::matmul(state.h, wh)), b);
    Var hc = ag::lstm_cell(pre, state.c);
    state.h = ag::slice_cols(hc, 0, hidden_);
    state.c = ag::slice_cols(hc, hidden_, hidden_);
    out[t] = state.h;
  }
  return out;
}

std::vector<Var> BiSequence::concat() const {
  std::vector<Var> out;
  out.reserve(forward.size());
  for (std::size_t t = 0; t < forward.size(); ++t) {
    const Var parts[] = {forward[t], backward[t]};
    out.push_back(ag::concat_cols(parts));
  }
  return out;
}

Var BiSequence::final_state() const {
  const Var parts[] = {forward.back(), backward.front()};
  return ag::concat_cols(parts);
}

BiLstm::BiLstm(std::string name, std::size_t input, std::size_t hidden, Rng& rng)
    : forward_(name + ".fwd", input, hidden, rng),
      backward_(name + ".bwd", input, hidden, rng) {}

BiSequence BiLstm::run(Tape& tape, const std::vector<Var>& seq) {
  return {forward_.run(tape, seq, false), backward_.run(tape, seq, true)};
}

std::vector<Parameter*> BiLstm::parameters() {
  auto out = forward_.parameters();
  for (auto* p : backward_.parameters()) out.push_back(p);
  return out;
}

namespace {
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

std::pair<std::vector<double>, std::vector<double>> lstm_step(
    std::span<const double> x, std::span<const double> h_prev,
    std::span<const double> c_prev, const LstmWeights& weights) {
  const std::size_t hidden = h_prev.size();
  if (weights.w_input.rows() != x.size() || weights.w_hidden.rows() != hidden ||
      weights.w_input.cols() != 4 * hidden || weights.w_hidden.cols() != 4 * hidden ||
      weights.bias.size() != 4 * hidden || c_prev.size() != hidden) {
    throw ShapeError("lstm_step: weight shapes inconsistent with inputs");
  }
  std::vector<double> pre(weights.bias.values().begin(), weights.bias.values().end());
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t j = 0; j < 4 * hidden; ++j) pre[j] += x[k] * weights.w_input.at(k, j);
  for (std::size_t k = 0; k < hidden; ++k)
    for (std::size_t j = 0; j < 4 * hidden; ++j) pre[j] += h_prev[k] * weights.w_hidden.at(k, j);

  std::vector<double> h(hidden), c(hidden);
  for (std::size_t j = 0; j < hidden; ++j) {
    const double i = logistic(pre[j]);
    const double f = logistic(pre[hidden + j]);
    const double g = std::tanh(pre[2 * hidden + j]);
    const double o = logistic(pre[3 * hidden + j]);
    c[j] = f * c_prev[j] + i * g;
    h[j] = o * std::tanh(c[j]);
  }
  return {std::move(h), std::move(c)};
}

}  // namespace topicsent::nn
