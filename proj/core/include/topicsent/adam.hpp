#pragma once

#include <cstdint>
#include <vector>

#include "topicsent/autograd.hpp"

namespace topicsent {

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment estimates for one parameter tensor.
struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t step_count = 0;
  AdamHyper hyper;

  AdamState() = default;
  AdamState(const Tensor::Shape& shape, AdamHyper h) : m(shape), v(shape), hyper(h) {}
};

/// One bias-corrected Adam update of param in place. Throws ag::NumericError
/// on a non-finite gradient and ShapeError on mismatched shapes.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state);

/// Adam over a fixed list of parameters; step() consumes and clears their
/// accumulated gradients.
class Adam {
 public:
  Adam(std::vector<ag::Parameter*> params, AdamHyper hyper);

  void step();
  void zero_grad();
  const std::vector<AdamState>& states() const { return states_; }

 private:
  std::vector<ag::Parameter*> params_;
  std::vector<AdamState> states_;
};

}  // namespace topicsent
