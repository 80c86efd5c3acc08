#include <gtest/gtest.h>

#include <memory>
#include <random>

#include "esrl/verify.hpp"

namespace esrl {
namespace {

EsPolicyParams random_policy(const PolicyArchitecture& a, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return initialize_policy(a, rng);
}

Arm2Config fine_arm() {
  Arm2Config cfg;
  cfg.dt = 1e-4;
  return cfg;
}

SimState state(const Vec& x, const Vec& xdot) {
  SimState s;
  s.x = x;
  s.xdot = xdot;
  return s;
}

TEST(LyapunovValue, ZeroAtEquilibrium) {
  PolicyArchitecture a;
  a.goal = Vec{{0.5, -0.5}};
  const EsPolicyParams p = random_policy(a, 1);
  const Arm2Env env(Arm2Config{});
  EXPECT_EQ(lyapunov_value(p, env, state(a.goal, Vec::Zero(2))), 0.0);
}

TEST(LyapunovValue, PointMassClosedForm) {
  PolicyArchitecture a;
  a.dim = 1;
  a.goal = Vec::Zero(1);
  const FlatLayout layout = FlatLayout::make(a);
  EsPolicyParams p = unflatten(layout, Vec::Zero(layout.total));
  p.potential.quad.eta = Vec::Constant(1, 2.0);
  const double v = lyapunov_value(p, Mat::Identity(1, 1), state(Vec::Constant(1, 1.0),
                                                                 Vec::Constant(1, 2.0)));
  EXPECT_NEAR(v, 3.0, 1e-15);
}

TEST(LyapunovValue, PositiveAwayFromEquilibrium) {
  PolicyArchitecture a;
  const Arm2Env env(Arm2Config{});
  a.goal = env.goal();
  const FlatLayout layout = FlatLayout::make(a);
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const EsPolicyParams p = unflatten(layout, random_flat(layout, rng).values);
    const SimState s = state(a.goal + Vec{{u(rng), u(rng)}}, Vec{{u(rng), u(rng)}});
    ASSERT_GT(lyapunov_value(p, env, s), 0.0);
  }
}

TEST(LyapunovValue, RejectsBadMassMatrix) {
  PolicyArchitecture a;
  const EsPolicyParams p = random_policy(a, 1);
  const SimState s = state(Vec::Ones(2), Vec::Ones(2));
  EXPECT_THROW(lyapunov_value(p, Mat{{1.0, 0.0}, {0.0, -1.0}}, s), std::invalid_argument);
  EXPECT_THROW(lyapunov_value(p, Mat{{1.0, 0.5}, {0.0, 1.0}}, s), std::invalid_argument);
  EXPECT_THROW(lyapunov_value(p, Mat::Identity(3, 3), s), std::invalid_argument);
}

TEST(FreeMotion, EquilibriumHasZeroResidual) {
  PolicyArchitecture a;
  const Arm2Env env(fine_arm());
  a.goal = env.goal();
  const EsPolicyParams p = random_policy(a, 2);
  const LyapunovReport r =
      check_free_motion_decrease(p, env, state(env.goal(), Vec::Zero(2)), 200);
  EXPECT_TRUE(r.passed);
  for (double x : r.residual_series) EXPECT_EQ(x, 0.0);
  for (double v : r.v_series) EXPECT_EQ(v, 0.0);
}

TEST(FreeMotion, RandomPoliciesPassAndDecrease) {
  PolicyArchitecture a;
  const Arm2Env env(fine_arm());
  a.goal = env.goal();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VerifyConfig cfg;
  cfg.c = 2e5;
  for (int t = 0; t < 5; ++t) {
    const EsPolicyParams p = random_policy(a, 10 + t);
    const SimState s0 = state(env.goal() + Vec{{u(rng), u(rng)}}, Vec{{u(rng), u(rng)}});
    const LyapunovReport r = check_free_motion_decrease(p, env, s0, 3000, cfg);
    EXPECT_TRUE(r.passed) << "max violation " << r.max_violation;
    EXPECT_LT(r.v_series.back(), r.v_series.front());
    EXPECT_EQ(r.v_series.size(), 3001u);
    EXPECT_EQ(r.residual_series.size(), 3000u);
  }
}

TEST(FreeMotion, NegatedDampingIsFlagged) {
  PolicyArchitecture a;
  const Arm2Env env(fine_arm());
  a.goal = env.goal();
  EsPolicyParams p = random_policy(a, 4);
  p.damping.diag_net.b.back().setConstant(2.0);
  const SimState s0 = state(env.goal() + Vec{{0.3, -0.2}}, Vec{{0.5, 0.5}});
  VerifyConfig cfg;
  cfg.c = 2e5;
  EXPECT_TRUE(check_free_motion_decrease(p, env, s0, 3000, cfg).passed);
  bool flagged = true;
  try {
    flagged = !check_free_motion_decrease(p, env, s0, 3000, cfg, {true}).passed;
  } catch (const SimulationFault&) {
    // Blew up, which is also a detection.
  }
  EXPECT_TRUE(flagged);
}

TEST(Passivity, WithoutContactMatchesFreeMotion) {
  PolicyArchitecture a;
  const Arm2Env env(fine_arm());
  a.goal = env.goal();
  const EsPolicyParams p = random_policy(a, 5);
  const SimState s0 = state(Vec{{0.1, 0.2}}, Vec{{0.3, -0.1}});
  const LyapunovReport f = check_free_motion_decrease(p, env, s0, 500);
  const LyapunovReport q = check_passivity(p, env, s0, 500);
  EXPECT_EQ(f.residual_series, q.residual_series);
  for (double x : q.external_power_series) EXPECT_EQ(x, 0.0);
}

TEST(Passivity, BlockAgainstWallHolds) {
  const auto env = std::make_shared<Block2dEnv>(Block2dConfig{});
  PolicyArchitecture a;
  a.goal = env->goal();
  bool touched = false;
  for (int t = 0; t < 5; ++t) {
    const EsPolicyParams p = random_policy(a, 20 + t);
    const LyapunovReport r = check_passivity(p, *env, env->initial_state(), 2000);
    EXPECT_TRUE(r.passed) << "max violation " << r.max_violation;
    for (double x : r.external_power_series) touched = touched || x != 0.0;
  }
  EXPECT_TRUE(touched);
}

TEST(Passivity, EnergyInjectionIsFlagged) {
  const auto inner = std::make_shared<Block2dEnv>(Block2dConfig{});
  const EnergyInjectingEnv env(inner, 5.0);
  PolicyArchitecture a;
  a.goal = inner->goal();
  const EsPolicyParams p = random_policy(a, 6);
  const SimState s0 = state(Vec{{0.0, 0.2}}, Vec{{1.0, 0.0}});
  EXPECT_TRUE(check_passivity(p, *inner, s0, 500).passed);
  EXPECT_FALSE(check_passivity(p, env, s0, 500).passed);
}

TEST(Audit, RandomVectorPasses) {
  const FlatLayout layout = FlatLayout::make(PolicyArchitecture{});
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const AuditReport r = audit_preconditions(random_flat(layout, rng));
    EXPECT_TRUE(r.passed()) << to_json(r).dump();
  }
}

TEST(Audit, NegativeZWeightsStillPass) {
  const FlatLayout layout = FlatLayout::make(PolicyArchitecture{});
  std::mt19937_64 rng(8);
  FlatParamVector flat = random_flat(layout, rng);
  for (const auto& s : layout.segments) {
    if (s.name.rfind("icnn.wz", 0) != 0) continue;
    for (int i = 0; i < s.size(); ++i) flat.values(s.offset + i) = -std::abs(flat.values(s.offset + i)) - 0.1;
  }
  EXPECT_TRUE(audit_preconditions(flat).passed());
}

TEST(Audit, EveryVariantPasses) {
  for (auto v : {PotentialVariant::kCombined, PotentialVariant::kIcnnOnly,
                 PotentialVariant::kQuadOnly}) {
    PolicyArchitecture a;
    a.variant = v;
    const FlatLayout layout = FlatLayout::make(a);
    std::mt19937_64 rng(9);
    EXPECT_TRUE(audit_preconditions(random_flat(layout, rng, 3.0)).passed()) << to_string(v);
  }
}

}  // namespace
}  // namespace esrl
