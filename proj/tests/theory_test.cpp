#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dpattack/theory/checks.hpp"
#include "helpers.hpp"

using namespace dpattack;
using namespace dpattack::testing;

TEST(Complexity, AlignedInstanceCounts) {
  const auto [g, d0] = aligned_instance(1024, 16, 2);
  const ComplexityReport c = recovery_complexity(g, d0);
  ASSERT_EQ(c.gamma.size(), 16u);
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_EQ(c.gamma[k], 2u);
    EXPECT_EQ(c.dyad_per_block[k], 4u);  // 1024 -> 512 -> 256 -> 128 -> 64
    EXPECT_DOUBLE_EQ(c.log_ratio[k], 4.0);
  }
  EXPECT_EQ(c.t_pat, 32u);
  EXPECT_EQ(c.t_dyad, 64u);
  EXPECT_EQ(c.sum_gamma, 32u);
  EXPECT_DOUBLE_EQ(c.sum_log_ratio, 64.0);
}

TEST(Complexity, UnalignedBlocksOnEightCoordinates) {
  // Blocks [0,3) and [3,8). Covering [0,3) expands [0,8), [0,4), [2,4);
  // covering [3,8) expands [0,8), [0,4), [2,4) as well.
  const auto g = gradient_from_blocks({{0, 3}, {3, 8}}, {1, -1});
  const ComplexityReport c = recovery_complexity(g, Direction(8));
  EXPECT_EQ(c.dyad_per_block, (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(c.gamma, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(c.t_pat, 2u);
  EXPECT_EQ(c.t_dyad, 6u);
  EXPECT_NEAR(c.log_ratio[0], std::log2(8.0 / 3.0), 1e-12);
  EXPECT_NEAR(c.log_ratio[1], std::log2(8.0 / 5.0), 1e-12);
}

TEST(Complexity, StraddlingRunsMeetTwoBlocks) {
  // Runs of length 8 shifted by 4 over blocks of 64: 7 full runs plus two
  // partial ones touch every block, the first and last included.
  const auto [g, d0] = straddling_instance(1024, 16, 8);
  const ComplexityReport c = recovery_complexity(g, d0);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(c.gamma[k], 9u) << k;
  EXPECT_EQ(c.t_dyad, 64u);
}

TEST(Complexity, DimensionMismatch) {
  const auto g = gradient_from_blocks({{0, 4}}, {1});
  EXPECT_THROW(recovery_complexity(g, Direction(5)), ShapeError);
}

TEST(MonteCarlo, HoeffdingInOneDimensionIsACoinFlip) {
  // d = 1: the projection is exactly +-1, so the tail at zeta = 1 is 1/2.
  const McReport r = mc_hoeffding(1, 1.0, 1, 100000, 5);
  EXPECT_NEAR(r.estimate, 0.5, 0.01);
  EXPECT_NEAR(r.target, std::exp(-0.5), 1e-15);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.trials, 100000u);
}

TEST(MonteCarlo, HoeffdingTrialsSplitAcrossUnitVectors) {
  const McReport r = mc_hoeffding(16, 0.5, 7, 1000, 3);
  EXPECT_EQ(r.trials, 1000u);
  EXPECT_NEAR(r.target, std::exp(-2.0), 1e-15);
  EXPECT_EQ(r.detail.at("unit_vectors"), 7);
}

TEST(MonteCarlo, HoeffdingRejectsBadArguments) {
  EXPECT_THROW(mc_hoeffding(0, 0.5, 1, 10, 1), ShapeError);
  EXPECT_THROW(mc_hoeffding(4, 0.0, 1, 10, 1), ShapeError);
  EXPECT_THROW(mc_hoeffding(4, 1.5, 1, 10, 1), ShapeError);
}

TEST(MonteCarlo, ArcsineTargets) {
  EXPECT_DOUBLE_EQ(mc_arcsine(0.0, 10, 1).target, 0.0);
  EXPECT_NEAR(mc_arcsine(0.5, 10, 1).target, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(mc_arcsine(-0.5, 10, 1).target, -1.0 / 3.0, 1e-15);
}

TEST(MonteCarlo, ArcsineEstimates) {
  for (double rho : {-0.9, 0.0, 0.5}) {
    const McReport r = mc_arcsine(rho, 200000, 11);
    EXPECT_NEAR(r.estimate, 2.0 / std::numbers::pi * std::asin(rho), 4.0 / std::sqrt(200000.0));
    EXPECT_TRUE(r.pass);
  }
}

TEST(MonteCarlo, ArcsineRejectsBadArguments) {
  EXPECT_THROW(mc_arcsine(1.0, 10, 1), ShapeError);
  EXPECT_THROW(mc_arcsine(0.2, 0, 1), ShapeError);
}

TEST(Curvature, QuadraticDiagThreeOne) {
  GradientFn grad = [](std::span<const double> p) {
    return std::vector<double>{3.0 * p[0], p[1]};
  };
  const std::vector<double> x{1.0, 2.0};
  const CurvatureEstimate e = power_iteration_hvp(grad, x, 200, 9);
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.lambda_max, 3.0, 1e-3);
}

TEST(Curvature, ZeroModelIsFlat) {
  const BuiltinModel m = BuiltinModel::linear(Shape{1, 4, 4}, 3);
  std::mt19937_64 rng(2);
  const ImageTensor x = random_image(Shape{1, 4, 4}, rng);
  const CurvatureEstimate e = curvature_lambda_max(m, x, Label{1}, 50, 4);
  EXPECT_TRUE(e.converged);
  EXPECT_DOUBLE_EQ(e.lambda_max, 0.0);
}

TEST(Curvature, NamedCheckPasses) {
  const auto reports = check_curvature(3);
  ASSERT_EQ(reports.size(), 2u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.check << " " << r.estimate;
}

TEST(Alignment, GradientSignOfItselfHasCosineOne) {
  const Shape s{1, 4, 4};
  std::mt19937_64 rng(6);
  std::vector<double> w(s.size());
  for (double& v : w) v = std::normal_distribution<double>(0.0, 1.0)(rng);
  const BuiltinModel m = two_class_linear(s, w, 0.0);
  const ImageTensor x = random_image(s, rng);
  // Loss of class 0 grows along w, so its gradient sign is sgn(w).
  std::vector<double> neg(w);
  for (double& v : neg) v = -v;
  EXPECT_DOUBLE_EQ(grad_sign_cosine(m, x, Label{0}, sign_with_one(w)), 1.0);
  EXPECT_DOUBLE_EQ(grad_sign_cosine(m, x, Label{0}, sign_with_one(neg)), -1.0);
}

TEST(Alignment, HraysGrowthIsMonotoneOnUnitWeightLinearModel) {
  // |w_i| = 1, so a smaller boundary distance means more agreement with sgn(w).
  const Shape s{1, 8, 8};
  std::mt19937_64 rng(8);
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = i % 4 == 3 ? -1.0 : 1.0;
  const ImageTensor x = random_image(s, rng, 0.3, 0.7);
  double wx = 0.0, w1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    wx += w[i] * x[i];
    w1 += w[i];
  }
  const BuiltinModel m = two_class_linear(s, w, -wx - 0.2 * w1);
  // Size-2 cells at level 5 tie and each costs a bisection, so single flips
  // only start after roughly 200 queries.
  const AlignmentTrace t = hrays_alignment_growth(m, x, Label{0}, 500);
  ASSERT_GE(t.cosine.size(), 2u);
  EXPECT_DOUBLE_EQ(t.cosine.front(), 0.5);  // 48 of 64 agree
  for (std::size_t k = 1; k < t.cosine.size(); ++k) {
    EXPECT_GT(t.cosine[k], t.cosine[k - 1]) << k;
    EXPECT_GE(t.queries[k], t.queries[k - 1]);
    EXPECT_LE(t.queries[k], 500u);
  }
}

TEST(Alignment, SingleRunInitGivesIdenticalCurves) {
  AlignmentSpec spec;
  spec.d = 64;
  spec.blocks = 4;
  spec.budget = 60;
  spec.trials = 20;
  spec.init.kind = InitKind::single_run;
  const AlignmentCurves c = alignment_curves(spec, 13);
  ASSERT_EQ(c.diff.size(), 61u);
  for (std::size_t t = 0; t <= 60; ++t) {
    EXPECT_DOUBLE_EQ(c.diff[t], 0.0) << t;
    EXPECT_DOUBLE_EQ(c.pattern[t], c.dyadic[t]);
  }
  EXPECT_TRUE(c.indistinguishable());
  EXPECT_TRUE(c.dominates());
}

TEST(Alignment, CurvesStartTogetherAndStayInRange) {
  AlignmentSpec spec;
  spec.d = 64;
  spec.blocks = 4;
  spec.budget = 60;
  spec.trials = 20;
  const AlignmentCurves c = alignment_curves(spec, 14);
  EXPECT_DOUBLE_EQ(c.diff.front(), 0.0);
  for (std::size_t t = 0; t <= 60; ++t) {
    EXPECT_GE(c.pattern[t], 0.0);
    EXPECT_LE(c.pattern[t], 1.0);
    EXPECT_GE(c.dyadic[t], 0.0);
    EXPECT_LE(c.dyadic[t], 1.0);
  }
  const McReport r = dominance_report(c, spec);
  EXPECT_EQ(r.trials, 20u);
  EXPECT_EQ(r.pass, c.dominates());
}

TEST(Checks, ComplexityChecksPass) {
  const auto reports = check_complexity();
  ASSERT_EQ(reports.size(), 2u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.check << " " << r.detail.dump();
}

TEST(Checks, NamesAndUnknownCheck) {
  EXPECT_EQ(theory_check_names().size(), 6u);
  EXPECT_THROW(run_theory_check("nope", 1), FormatError);
  const auto r = run_theory_check("hoeffding", 1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].to_json().at("check"), "hoeffding");
}
