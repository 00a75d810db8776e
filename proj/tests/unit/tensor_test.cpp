#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "topicsent/tensor.hpp"

using topicsent::ShapeError;
using topicsent::Tensor;

TEST(Tensor, ShapeAndFill) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
  for (double v : t.values()) EXPECT_EQ(v, 1.5);
}

TEST(Tensor, DataLengthMustMatchShape) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Tensor, RowMajorAccess) {
  const auto t = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(t.at(1, 0), 4.0);
  EXPECT_EQ(t[5], 6.0);
  EXPECT_EQ(t.row(1)[2], 6.0);
}

TEST(Tensor, VectorCountsAsOneRow) {
  const auto v = Tensor::vector({1, 2, 3});
  EXPECT_EQ(v.rows(), 1u);
  EXPECT_EQ(v.cols(), 3u);
}

TEST(Tensor, ReshapeKeepsDataAndChecksSize) {
  const auto t = Tensor::from_rows({{1, 2}, {3, 4}});
  const auto r = t.reshaped({4});
  EXPECT_EQ(r.rank(), 1u);
  EXPECT_EQ(r[3], 4.0);
  EXPECT_THROW(t.reshaped({3}), ShapeError);
}

TEST(Tensor, FiniteCheck) {
  Tensor t({2}, 0.0);
  EXPECT_TRUE(t.all_finite());
  t[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(t.all_finite());
  t[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(t.all_finite());
}

TEST(Tensor, ShapeString) { EXPECT_EQ(topicsent::shape_string({2, 3}), "[2, 3]"); }
