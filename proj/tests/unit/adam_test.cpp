#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "topicsent/adam.hpp"

using namespace topicsent;

TEST(Adam, FirstStepClosedForm) {
  Tensor p = Tensor::vector({0.5});
  AdamState s({1}, AdamHyper{});
  adam_step(p, Tensor::vector({1.0}), s);
  EXPECT_NEAR(p[0] - 0.5, -0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(s.step_count, 1u);
}

TEST(Adam, ZeroGradientKeepsParameters) {
  Tensor p = Tensor::vector({0.5, -2.0});
  const Tensor before = p;
  AdamState s({2}, AdamHyper{});
  for (int i = 0; i < 5; ++i) adam_step(p, Tensor({2}), s);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step_count, 5u);
}

TEST(Adam, ZeroLearningRateIsIdentity) {
  Tensor p = Tensor::vector({0.5, -2.0});
  const Tensor before = p;
  AdamHyper h;
  h.lr = 0.0;
  AdamState s({2}, h);
  for (int i = 0; i < 5; ++i) adam_step(p, Tensor::vector({0.3, -7.0}), s);
  EXPECT_EQ(p, before);
}

TEST(Adam, IdenticalInputsGiveIdenticalOutputs) {
  Tensor a = Tensor::vector({0.1, 0.2, 0.3}), b = a;
  AdamState sa({3}, AdamHyper{}), sb({3}, AdamHyper{});
  const Tensor g = Tensor::vector({0.7, -0.1, 2.5});
  for (int i = 0; i < 3; ++i) {
    adam_step(a, g, sa);
    adam_step(b, g, sb);
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa.m, sb.m);
  EXPECT_EQ(sa.v, sb.v);
}

TEST(Adam, RejectsNonFiniteGradientAndShapeMismatch) {
  Tensor p = Tensor::vector({1.0});
  AdamState s({1}, AdamHyper{});
  EXPECT_THROW(adam_step(p, Tensor::vector({std::numeric_limits<double>::quiet_NaN()}), s),
               std::exception);
  EXPECT_THROW(adam_step(p, Tensor::vector({1.0, 2.0}), s), std::exception);
}

TEST(Adam, OptimizerStepsAndClearsGradients) {
  ag::Parameter p("p", Tensor::vector({1.0}));
  Adam opt({&p}, AdamHyper{});
  p.grad[0] = 2.0;
  opt.step();
  EXPECT_LT(p.value[0], 1.0);
  EXPECT_EQ(p.grad[0], 0.0);
  EXPECT_EQ(opt.states()[0].step_count, 1u);
}
