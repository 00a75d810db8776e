#include "topicsent/adam.hpp"

#include <cmath>

namespace topicsent {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state) {
  if (param.shape() != grad.shape() || state.m.shape() != param.shape() ||
      state.v.shape() != param.shape()) {
    throw ShapeError("adam_step: parameter, gradient and moment shapes differ");
  }
  if (!grad.all_finite()) throw ag::NumericError("adam_step: non-finite gradient");

  const AdamHyper& h = state.hyper;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correct1 = 1.0 - std::pow(h.beta1, t);
  const double correct2 = 1.0 - std::pow(h.beta2, t);

  auto p = param.values();
  auto m = state.m.values();
  auto v = state.v.values();
  const auto g = grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
    v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correct1;
    const double v_hat = v[i] / correct2;
    p[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.epsilon);
  }
}

Adam::Adam(std::vector<ag::Parameter*> params, AdamHyper hyper)
    : params_(std::move(params)) {
  states_.reserve(params_.size());
  for (auto* p : params_) states_.emplace_back(p->value.shape(), hyper);
}

void Adam::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    adam_step(params_[i]->value, params_[i]->grad, states_[i]);
    params_[i]->zero_grad();
  }
}

void Adam::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

}  // namespace topicsent
