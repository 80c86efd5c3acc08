#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "esrl/policy.hpp"
#include "esrl/potential.hpp"
#include "test_util.hpp"

namespace esrl {
namespace {

// Independent scalar sReLU used as the oracle below.
double srelu_ref(double x, double d) {
  if (x <= 0.0) return 0.0;
  if (x < d) return x * x / (2.0 * d);
  return x - d / 2.0;
}

FicnnParams one_d_net() {
  FicnnParams p = FicnnParams::zeros(1, {1}, 0.1);
  p.wx[0](0, 0) = 1.0;
  p.wz_raw[0](0, 0) = 1.0;
  p.wx[1](0, 0) = 0.0;
  return p;
}

TEST(Srelu, Branches) {
  EXPECT_EQ(srelu(-1.0, 0.1), 0.0);
  EXPECT_NEAR(srelu(0.05, 0.1), 0.0125, 1e-15);
  EXPECT_NEAR(srelu(0.05, 0.1), srelu_ref(0.05, 0.1), 1e-15);
  EXPECT_NEAR(srelu(1.0, 0.1), 0.95, 1e-15);
  EXPECT_EQ(srelu(0.0, 0.1), 0.0);
}

TEST(Srelu, Gradient) {
  EXPECT_EQ(srelu_grad(-1.0, 0.1), 0.0);
  EXPECT_NEAR(srelu_grad(0.05, 0.1), 0.5, 1e-15);
  EXPECT_EQ(srelu_grad(1.0, 0.1), 1.0);
}

TEST(Srelu, ContinuousAtKnots) {
  const double d = 0.1, e = 1e-12;
  EXPECT_NEAR(srelu(d - e, d), srelu(d + e, d), 1e-11);
  EXPECT_NEAR(srelu_grad(d - e, d), srelu_grad(d + e, d), 1e-10);
  EXPECT_NEAR(srelu_grad(e, d), srelu_grad(-e, d), 1e-10);
}

TEST(Srelu, RejectsBadArguments) {
  EXPECT_THROW(srelu(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(srelu(std::nan(""), 0.1), std::invalid_argument);
  EXPECT_THROW(srelu_grad(INFINITY, 0.1), std::invalid_argument);
  EXPECT_THROW(srelu_grad(0.5, -1.0), std::invalid_argument);
}

TEST(Srelu, ConvexOnGrid) {
  for (double x = -0.3; x < 0.3; x += 0.001) {
    const double h = 0.0007;
    EXPECT_LE(srelu(x, 0.1), 0.5 * (srelu(x - h, 0.1) + srelu(x + h, 0.1)) + 1e-15);
  }
}

TEST(Ficnn, HandEvaluatedOneDimensionalNet) {
  const FicnnParams p = one_d_net();
  const Vec x = Vec::Constant(1, 1.0);
  const double z1 = srelu_ref(1.0, 0.1);
  const double psi = srelu_ref(z1, 0.1);
  EXPECT_NEAR(z1, 0.95, 1e-15);
  EXPECT_NEAR(ficnn_eval(p, x), psi, 1e-15);
  EXPECT_NEAR(ficnn_eval(p, x), 0.90, 1e-15);
  Vec g;
  ficnn_eval_with_grad(p, x, g);
  EXPECT_NEAR(g(0), 1.0, 1e-15);
  EXPECT_NEAR(g(0), test::central_difference([&](const Vec& v) { return ficnn_eval(p, v); }, x)(0),
              1e-8);
}

TEST(Ficnn, ZeroAtOrigin) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const FicnnParams p = test::random_ficnn(2, {16, 16}, rng);
    EXPECT_EQ(ficnn_eval(p, Vec::Zero(2)), 0.0);
    EXPECT_EQ(ficnn_input_grad(p, Vec::Zero(2)).norm(), 0.0);
  }
}

TEST(Ficnn, NegativeZWeightsAreProjected) {
  FicnnParams p = one_d_net();
  p.wz_raw[0](0, 0) = -3.0;
  // Effective z-weight is zero, so only the passthrough term is left.
  EXPECT_EQ(ficnn_eval(p, Vec::Constant(1, 1.0)), srelu_ref(0.0, 0.1));
  p.wx[1](0, 0) = 0.5;
  EXPECT_NEAR(ficnn_eval(p, Vec::Constant(1, 1.0)), srelu_ref(0.5, 0.1), 1e-15);
  EXPECT_EQ(p.wz_raw[0](0, 0), -3.0);
}

TEST(Ficnn, MidpointConvexity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const FicnnParams p = test::random_ficnn(2, {16, 16}, rng);
    for (int k = 0; k < 20; ++k) {
      const Vec a{{u(rng), u(rng)}};
      const Vec b{{u(rng), u(rng)}};
      EXPECT_LE(ficnn_eval(p, 0.5 * (a + b)),
                0.5 * (ficnn_eval(p, a) + ficnn_eval(p, b)) + 1e-9);
      EXPECT_GE(ficnn_eval(p, a), 0.0);
    }
  }
}

TEST(Ficnn, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const FicnnParams p = test::random_ficnn(3, {8, 8}, rng);
    const Vec x{{u(rng), u(rng), u(rng)}};
    const Vec g = ficnn_input_grad(p, x);
    const Vec fd = test::central_difference([&](const Vec& v) { return ficnn_eval(p, v); }, x);
    worst = std::max(worst, test::relative_error(g, fd));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Ficnn, GrowsAtMostLinearly) {
  std::mt19937_64 rng(8);
  const FicnnParams p = test::random_ficnn(2, {16, 16}, rng);
  const Vec u = Vec{{0.6, -0.8}};
  const double slope_100 = ficnn_eval(p, 100.0 * u) / 100.0;
  const double slope_1000 = ficnn_eval(p, 1000.0 * u) / 1000.0;
  EXPECT_NEAR(slope_1000, slope_100, 1e-2 * std::max(1.0, slope_100));
}

TEST(Ficnn, DimensionMismatchThrows) {
  const FicnnParams p = one_d_net();
  EXPECT_THROW(ficnn_eval(p, Vec::Zero(2)), std::invalid_argument);
  EXPECT_THROW(ficnn_input_grad(p, Vec::Zero(3)), std::invalid_argument);
}

TEST(Potential, PureQuadratic) {
  PotentialParams p;
  p.ficnn = FicnnParams::zeros(2, {4}, 0.1);
  p.quad.eta = Vec{{2.0, 2.0}};
  EXPECT_EQ(potential_eval(p, Vec::Zero(2)), 0.0);
  EXPECT_NEAR(potential_eval(p, Vec{{1.0, 0.0}}), 1.0, 1e-15);
  const Vec g = potential_grad(p, Vec{{1.0, 0.0}});
  EXPECT_NEAR(g(0), 2.0, 1e-15);
  EXPECT_EQ(g(1), 0.0);
  EXPECT_EQ(potential_grad(p, Vec::Zero(2)).norm(), 0.0);
}

TEST(Potential, EtaIsClamped) {
  PotentialParams p;
  p.ficnn = FicnnParams::zeros(1, {4}, 0.1);
  p.quad.eta = Vec::Constant(1, 10.0);
  EXPECT_NEAR(potential_eval(p, Vec::Constant(1, 1.0)), 2.5, 1e-15);
  p.quad.eta(0) = -4.0;
  EXPECT_NEAR(potential_eval(p, Vec::Constant(1, 1.0)), 0.5e-3, 1e-18);
  EXPECT_EQ(p.quad.eta(0), -4.0);
}

TEST(Potential, StrictlyPositiveAwayFromOrigin) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    PotentialParams p;
    p.ficnn = test::random_ficnn(2, {16, 16}, rng);
    p.quad.eta = Vec{{u(rng), u(rng)}};
    const Vec x{{u(rng), u(rng)}};
    if (x.norm() == 0.0) continue;
    EXPECT_GT(potential_eval(p, x), 0.0);
  }
}

TEST(Potential, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    PotentialParams p;
    p.ficnn = test::random_ficnn(2, {16, 16}, rng);
    p.quad.eta = Vec{{2.0 * u(rng), 2.0 * u(rng)}};
    const Vec x{{u(rng), u(rng)}};
    const Vec fd = test::central_difference([&](const Vec& v) { return potential_eval(p, v); }, x);
    EXPECT_LT(test::relative_error(potential_grad(p, x), fd), 1e-4);
  }
}

}  // namespace
}  // namespace esrl
