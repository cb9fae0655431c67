#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"

using namespace dpattack;
using dpattack::testing::random_image;

namespace {

// Direct double-sum DCT-II of one block, written from the textbook formula.
double reference_coefficient(const Tensor& x, std::size_t c, std::size_t by, std::size_t bx,
                             std::size_t w, std::size_t u, std::size_t v) {
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (std::size_t m = 0; m < w; ++m) {
    for (std::size_t n = 0; n < w; ++n) {
      s += x(c, by * w + m, bx * w + n) * std::cos(pi * (2.0 * m + 1) * u / (2.0 * w)) *
           std::cos(pi * (2.0 * n + 1) * v / (2.0 * w));
    }
  }
  const double au = u == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
  const double av = v == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
  return au * av * s;
}

double energy(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return s;
}

}  // namespace

TEST(Bdct, MatchesDirectFormula) {
  std::mt19937_64 rng(11);
  for (std::size_t w : {4, 8}) {
    const ImageTensor x = random_image(Shape{3, 16, 16}, rng);
    const BdctCoefficients coef = bdct(x.tensor(), w);
    ASSERT_EQ(coef.blocks() * w * w, 16u * 16u);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t by = 0; by < 16 / w; ++by)
        for (std::size_t bx = 0; bx < 16 / w; ++bx)
          for (std::size_t u = 0; u < w; ++u)
            for (std::size_t v = 0; v < w; ++v)
              ASSERT_NEAR(coef.at(c, by * (16 / w) + bx, u, v),
                          reference_coefficient(x.tensor(), c, by, bx, w, u, v), 1e-12);
  }
}

TEST(Bdct, ParsevalAndRoundTrip) {
  std::mt19937_64 rng(12);
  for (std::size_t w : {2, 4, 8, 16}) {
    const ImageTensor x = random_image(Shape{2, 16, 16}, rng);
    const BdctCoefficients coef = bdct(x.tensor(), w);
    EXPECT_NEAR(energy(coef.data), energy(x.data()), 1e-9 * energy(x.data()));
    const Tensor back = ibdct(coef);
    for (std::size_t k = 0; k < x.size(); ++k) ASSERT_NEAR(back[k], x[k], 1e-12);
  }
}

TEST(Bdct, ConstantImageHasOnlyDc) {
  const Tensor x(Shape{1, 8, 8}, 0.25);
  const BdctCoefficients coef = bdct(x, 4);
  for (std::size_t z = 0; z < coef.blocks(); ++z)
    for (std::size_t u = 0; u < 4; ++u)
      for (std::size_t v = 0; v < 4; ++v)
        EXPECT_NEAR(coef.at(0, z, u, v), u == 0 && v == 0 ? 0.25 * 4 : 0.0, 1e-12);
}

TEST(Bdct, IndivisibleSizesArePaddedAndCropped) {
  std::mt19937_64 rng(13);
  const ImageTensor x = random_image(Shape{1, 10, 13}, rng);
  const BdctCoefficients coef = bdct(x.tensor(), 4);
  EXPECT_EQ(coef.blocks_y, 3u);
  EXPECT_EQ(coef.blocks_x, 4u);
  const Tensor back = ibdct(coef);
  ASSERT_EQ(back.shape(), x.shape());
  for (std::size_t k = 0; k < x.size(); ++k) ASSERT_NEAR(back[k], x[k], 1e-12);
}

TEST(Bdct, InvalidBlockSize) {
  const Tensor x(Shape{1, 8, 8}, 0.5);
  EXPECT_THROW(bdct(x, 0), BlockSizeError);
  EXPECT_THROW(bdct(x, 16), BlockSizeError);
}

TEST(Padding, ReplicatesEdges) {
  const Tensor t(Shape{1, 1, 3}, std::vector<double>{1, 2, 3});
  const Tensor p = replicate_pad(t, 4);
  ASSERT_EQ(p.shape(), (Shape{1, 4, 4}));
  EXPECT_EQ(p(0, 3, 3), 3.0);
  EXPECT_EQ(p(0, 2, 0), 1.0);
  const Tensor c = crop(p, 1, 3);
  EXPECT_EQ(c.values(), t.values());
}

TEST(Haar, PerfectReconstruction) {
  std::mt19937_64 rng(14);
  for (std::size_t levels : {0, 1, 2, 3}) {
    const ImageTensor x = random_image(Shape{3, 16, 16}, rng);
    const DwtDecomposition dec = dwt(x.tensor(), levels);
    EXPECT_EQ(dec.low.height(), 16u >> levels);
    const Tensor back = idwt(dec);
    for (std::size_t k = 0; k < x.size(); ++k) ASSERT_NEAR(back[k], x[k], 1e-9);
  }
}

TEST(Haar, Orthonormal) {
  std::mt19937_64 rng(15);
  const ImageTensor x = random_image(Shape{1, 8, 8}, rng);
  const DwtDecomposition dec = dwt(x.tensor(), 2);
  double e = energy(dec.low.data());
  for (const auto& d : dec.details) e += energy(d.lh.data()) + energy(d.hl.data()) + energy(d.hh.data());
  EXPECT_NEAR(e, energy(x.data()), 1e-9);
}

TEST(Haar, LowBandOfConstantIsScaledConstant) {
  const Tensor x(Shape{1, 4, 4}, 0.3);
  const DwtDecomposition dec = dwt(x, 1);
  for (double v : dec.low.data()) EXPECT_NEAR(v, 0.6, 1e-12);  // 2x2 sum / 2
  for (double v : dec.details[0].hh.data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Haar, LowpassIsBlockMean) {
  std::mt19937_64 rng(16);
  const ImageTensor x = random_image(Shape{1, 8, 8}, rng);
  const Tensor lp = lowpass(x.tensor(), 2);
  for (std::size_t bi = 0; bi < 2; ++bi)
    for (std::size_t bj = 0; bj < 2; ++bj) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) mean += x(0, bi * 4 + i, bj * 4 + j) / 16.0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(lp(0, bi * 4 + i, bj * 4 + j), mean, 1e-12);
    }
}

TEST(Haar, IndivisibleLevelThrows) {
  const Tensor x(Shape{1, 6, 6}, 0.5);
  EXPECT_THROW(dwt(x, 2), LevelError);
}
