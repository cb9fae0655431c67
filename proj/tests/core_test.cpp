#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace dpattack;
using dpattack::testing::random_image;

TEST(Color, GrayHasNeutralChroma) {
  const ImageTensor g(Shape{3, 1, 1}, {0.37, 0.37, 0.37});
  const ImageTensor y = rgb_to_ycbcr(g);
  EXPECT_NEAR(y[0], 0.37, 1e-12);
  EXPECT_NEAR(y[1], 0.5, 1e-12);
  EXPECT_NEAR(y[2], 0.5, 1e-12);
}

TEST(Color, PureRedLuma) {
  const ImageTensor red(Shape{3, 1, 1}, {1.0, 0.0, 0.0});
  EXPECT_NEAR(rgb_to_ycbcr(red)[0], 0.299, 1e-12);
}

TEST(Color, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const ImageTensor x = random_image(Shape{3, 8, 8}, rng);
    const ImageTensor back = ycbcr_to_rgb(rgb_to_ycbcr(x));
    for (std::size_t k = 0; k < x.size(); ++k) ASSERT_NEAR(back[k], x[k], 1e-6);
  }
}

TEST(Color, RejectsNonRgb) {
  const ImageTensor x(Shape{1, 2, 2}, {0.1, 0.2, 0.3, 0.4});
  EXPECT_THROW(rgb_to_ycbcr(x), ChannelMismatch);
}

TEST(ApplyDirection, ZeroMagnitudeIsIdentity) {
  const ImageTensor x(Shape{1, 1, 3}, {0.1, 0.5, 0.9});
  const ImageTensor y = apply_direction(x, Direction{1, -1, 1}, 0.0);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(y[k], x[k]);
}

TEST(ApplyDirection, ClipsToUpperBound) {
  const ImageTensor x(Shape{1, 2, 2}, {0.5, 0.5, 0.5, 0.5});
  const ImageTensor y = apply_direction(x, Direction(4), 0.7);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(y[k], 1.0);
}

TEST(ApplyDirection, HandArithmetic) {
  const ImageTensor x(Shape{1, 1, 2}, {0.2, 0.9});
  const ImageTensor y = apply_direction(x, Direction{1, -1}, 0.3);
  EXPECT_NEAR(y[0], 0.5, 1e-15);
  EXPECT_NEAR(y[1], 0.6, 1e-15);
  EXPECT_NEAR(x[0], 0.2, 0.0);  // input untouched
}

TEST(ApplyDirection, LengthMismatch) {
  const ImageTensor x(Shape{1, 1, 2}, {0.2, 0.9});
  EXPECT_THROW(apply_direction(x, Direction(3), 0.1), ShapeError);
}

TEST(ApplyDirection, OutputAlwaysInRange) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const ImageTensor x = random_image(Shape{1, 4, 4}, rng);
    const ImageTensor y =
        apply_direction(x, dpattack::testing::random_direction(16, rng), 2.0 * (t % 5) / 4);
    for (std::size_t k = 0; k < y.size(); ++k) {
      ASSERT_GE(y[k], 0.0);
      ASSERT_LE(y[k], 1.0);
    }
  }
}

TEST(SignWithOne, ZerosMapToPlusOne) {
  const std::vector<double> v{0.0, 0.0, 0.0};
  const Direction d = sign_with_one(v);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(d[i], 1);
}

TEST(SignWithOne, PlainSigns) {
  const std::vector<double> v{-2.5, 0.1};
  const Direction d = sign_with_one(v);
  EXPECT_EQ(d[0], -1);
  EXPECT_EQ(d[1], 1);
}

TEST(SignWithOne, NoEpsilonThreshold) {
  const std::vector<double> v{1e-30, -1e-30};
  const Direction d = sign_with_one(v);
  EXPECT_EQ(d[0], 1);
  EXPECT_EQ(d[1], -1);
}

TEST(SignWithOne, IdempotentOnDirections) {
  std::mt19937_64 rng(9);
  const Direction d = dpattack::testing::random_direction(64, rng);
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = d[i];
  const Direction e = sign_with_one(v);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(e[i], d[i]);
}

TEST(Norm, TwoAndInf) {
  const std::vector<double> v{3.0, -4.0};
  EXPECT_DOUBLE_EQ(norm(v, Norm::l2), 5.0);
  EXPECT_DOUBLE_EQ(norm(v, Norm::linf), 4.0);
  const std::vector<double> z(5, 0.0);
  EXPECT_EQ(norm(z, Norm::l2), 0.0);
  EXPECT_EQ(norm(z, Norm::linf), 0.0);
}

TEST(Norm, UnsupportedNorm) {
  const std::vector<double> v{1.0};
  EXPECT_THROW(norm(v, "l1"), UnsupportedNorm);
  EXPECT_THROW(parse_norm("l0"), UnsupportedNorm);
}

TEST(Direction, RejectsZeroEntries) {
  EXPECT_THROW(Direction({1, 0, -1}), ShapeError);
}

TEST(ImageTensor, RejectsOutOfRange) {
  EXPECT_THROW(ImageTensor(Shape{1, 1, 2}, {0.5, 1.5}), ShapeError);
  EXPECT_THROW(ImageTensor(Shape{1, 1, 2}, {0.5}), ShapeError);
}
