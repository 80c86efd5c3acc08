#include "esrl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace esrl {

double lyapunov_value(const EsPolicyParams& p, const Mat& mass, const SimState& s) {
  const int n = p.dim();
  if (s.x.size() != n || s.xdot.size() != n || mass.rows() != n || mass.cols() != n)
    throw std::invalid_argument("lyapunov_value: dimension mismatch");
  if ((mass - mass.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + mass.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("lyapunov_value: mass matrix is not symmetric");
  if (Eigen::LLT<Mat>(mass).info() != Eigen::Success)
    throw std::invalid_argument("lyapunov_value: mass matrix is not positive definite");
  const Vec e = s.x - p.goal;
  return potential_eval(p.potential, e) + 0.5 * s.xdot.dot(mass * s.xdot);
}

double lyapunov_value(const EsPolicyParams& p, const Environment& env, const SimState& s) {
  return lyapunov_value(p, env.mass_matrix(s.x), s);
}

namespace {

enum class Branch { kFreeMotion, kPassivity };

LyapunovReport run_check(const EsPolicyParams& p, const Environment& env, const SimState& s0,
                         int ticks, const VerifyConfig& cfg, const VerifyHooks& hooks,
                         Branch branch) {
  require(ticks >= 1, "verify: need at least one tick");
  require(p.dim() == env.dim(), "verify: policy and environment dimensions differ");
  const double h = env.dt();
  LyapunovReport r;
  r.tolerance = cfg.c * h;
  r.v_series.reserve(ticks + 1);

  auto control = [&](const SimState& at, const Mat& d) {
    Vec u = -potential_grad(p.potential, at.x - p.goal);
    u += (hooks.negate_damping ? 1.0 : -1.0) * (d * at.xdot);
    return u;
  };

  SimState s = s0;
  double v = lyapunov_value(p, env, s);
  r.v_series.push_back(v);
  for (int k = 0; k < ticks; ++k) {
    const Mat d = damping_matrix(p.damping, s.xdot);
    const Vec f_ext = env.external_force(s);
    const SimState next = env.step(s, control(s, d));
    const Vec v_bar = 0.5 * (s.xdot + next.xdot);
    const double dissipation = s.xdot.dot(d * s.xdot);
    const double ext_power = v_bar.dot(f_ext);
    const double v_next = lyapunov_value(p, env, next);
    const double residual = (v_next - v) / h + dissipation - ext_power;

    r.dissipation_series.push_back(dissipation);
    r.external_power_series.push_back(ext_power);
    r.residual_series.push_back(residual);
    r.v_series.push_back(v_next);
    s = next;
    v = v_next;
  }

  if (branch == Branch::kFreeMotion) {
    double worst = 0.0;
    for (double x : r.residual_series) worst = std::max(worst, std::abs(x));
    r.max_violation = worst;
    const bool at_equilibrium = r.v_series.front() == 0.0;
    r.decreased = at_equilibrium || r.v_series.back() < r.v_series.front();
    r.passed = r.max_violation <= r.tolerance && r.decreased;
  } else {
    double worst = 0.0;
    for (double x : r.residual_series) worst = std::max(worst, x);
    r.max_violation = worst;
    r.passed = r.max_violation <= r.tolerance;
  }
  return r;
}

}  // namespace

LyapunovReport check_free_motion_decrease(const EsPolicyParams& p, const Environment& env,
                                          const SimState& s0, int ticks, const VerifyConfig& cfg,
                                          const VerifyHooks& hooks) {
  return run_check(p, env, s0, ticks, cfg, hooks, Branch::kFreeMotion);
}

LyapunovReport check_passivity(const EsPolicyParams& p, const Environment& env,
                               const SimState& s0, int ticks, const VerifyConfig& cfg,
                               const VerifyHooks& hooks) {
  return run_check(p, env, s0, ticks, cfg, hooks, Branch::kPassivity);
}

EnergyInjectingEnv::EnergyInjectingEnv(std::shared_ptr<const Environment> inner, double gain)
    : inner_(std::move(inner)), gain_(gain) {
  require(inner_ != nullptr, "EnergyInjectingEnv: null environment");
}

SimState EnergyInjectingEnv::step(const SimState& s, const Vec& u) const {
  // Unreported force along the velocity: a contact that generates energy.
  return inner_->step(s, u + gain_ * s.xdot);
}

bool AuditReport::passed() const {
  return convex && psi_zero_at_origin && grad_zero_at_origin && psi_nonnegative &&
         potential_positive && quad_positive && damping_symmetric && damping_positive_definite;
}

AuditReport audit_preconditions(const FlatParamVector& flat, const AuditConfig& cfg) {
  AuditReport rep;
  const EsPolicyParams p = unflatten(flat.layout, flat.values);
  const int n = p.dim();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-cfg.sample_radius, cfg.sample_radius);
  auto draw = [&] {
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = unif(rng);
    return x;
  };

  const Vec s = p.potential.quad.effective_diag();
  rep.quad_positive = (s.array() > 0.0).all();

  const Vec zero = Vec::Zero(n);
  Vec g0;
  const double psi0 = ficnn_eval_with_grad(p.potential.ficnn, zero, g0);
  rep.psi_zero_at_origin = psi0 == 0.0;
  rep.grad_zero_at_origin = g0.cwiseAbs().maxCoeff() <= cfg.grad_origin_tol;

  for (int t = 0; t < cfg.convexity_pairs; ++t) {
    const Vec a = draw();
    const Vec b = draw();
    const Vec mid = 0.5 * (a + b);
    const double pa = ficnn_eval(p.potential.ficnn, a);
    const double pb = ficnn_eval(p.potential.ficnn, b);
    const double pm = ficnn_eval(p.potential.ficnn, mid);
    if (pm > 0.5 * (pa + pb) + cfg.convexity_tol) rep.convex = false;
    const double va = potential_eval(p.potential, a);
    const double vb = potential_eval(p.potential, b);
    const double vm = potential_eval(p.potential, mid);
    if (vm > 0.5 * (va + vb) + cfg.convexity_tol) rep.convex = false;
    if (pa < 0.0 || pb < 0.0 || pm < 0.0) rep.psi_nonnegative = false;
    if (!a.isZero(0.0) && !(va > 0.0)) rep.potential_positive = false;
  }

  for (int t = 0; t < cfg.damping_velocities; ++t) {
    const Mat d = damping_matrix(p.damping, draw());
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12) rep.damping_symmetric = false;
    if (Eigen::LLT<Mat>(d).info() != Eigen::Success) rep.damping_positive_definite = false;
  }
  return rep;
}

nlohmann::json to_json(const LyapunovReport& r, bool include_series) {
  nlohmann::json j{{"max_violation", r.max_violation},
                   {"tolerance", r.tolerance},
                   {"decreased", r.decreased},
                   {"passed", r.passed},
                   {"ticks", r.residual_series.size()},
                   {"v_start", r.v_series.empty() ? 0.0 : r.v_series.front()},
                   {"v_end", r.v_series.empty() ? 0.0 : r.v_series.back()}};
  if (include_series) {
    j["v_series"] = r.v_series;
    j["dissipation_series"] = r.dissipation_series;
    j["external_power_series"] = r.external_power_series;
    j["residual_series"] = r.residual_series;
  }
  return j;
}

nlohmann::json to_json(const AuditReport& r) {
  return {{"convex", r.convex},
          {"psi_zero_at_origin", r.psi_zero_at_origin},
          {"grad_zero_at_origin", r.grad_zero_at_origin},
          {"psi_nonnegative", r.psi_nonnegative},
          {"potential_positive", r.potential_positive},
          {"quad_positive", r.quad_positive},
          {"damping_symmetric", r.damping_symmetric},
          {"damping_positive_definite", r.damping_positive_definite},
          {"passed", r.passed()}};
}

}  // namespace esrl
