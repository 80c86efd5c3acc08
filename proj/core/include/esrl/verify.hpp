#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "esrl/envs.hpp"
#include "esrl/policy.hpp"

namespace esrl {

/// V_L = 0.5 (x-g)^T S (x-g) + Psi(x-g) + 0.5 xdot^T M(x) xdot
double lyapunov_value(const EsPolicyParams& p, const Mat& mass, const SimState& s);
double lyapunov_value(const EsPolicyParams& p, const Environment& env, const SimState& s);

struct LyapunovReport {
  std::vector<double> v_series;               // V_L at each tick, length T+1
  std::vector<double> dissipation_series;     // xdot^T D(xdot) xdot, length T
  std::vector<double> external_power_series;  // xbar^T f_ext, length T
  std::vector<double> residual_series;        // discrete balance residual, length T
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool decreased = true;  // V_L(end) < V_L(start), free-motion check only
  bool passed = false;
};

struct VerifyConfig {
  /// Residual tolerance is c * dt.
  double c = 500.0;
};

/// Deliberate faults used to check that the checks can fail.
struct VerifyHooks {
  bool negate_damping = false;  // simulate u with +D(xdot) xdot
};

/// Free-motion branch: |dV/dt + xdot^T D xdot| <= c dt at every tick and
/// V_L(end) < V_L(start) from any non-equilibrium start.
LyapunovReport check_free_motion_decrease(const EsPolicyParams& p, const Environment& env,
                                          const SimState& s0, int ticks,
                                          const VerifyConfig& cfg = {},
                                          const VerifyHooks& hooks = {});

/// Interaction branch: dV/dt <= xbar^T f_ext - xdot^T D xdot + c dt, where
/// f_ext is the contact force the environment reports.
LyapunovReport check_passivity(const EsPolicyParams& p, const Environment& env,
                               const SimState& s0, int ticks, const VerifyConfig& cfg = {},
                               const VerifyHooks& hooks = {});

/// Wraps an environment and pushes the block along its velocity while
/// reporting only the wrapped environment's contact force.
class EnergyInjectingEnv final : public Environment {
 public:
  EnergyInjectingEnv(std::shared_ptr<const Environment> inner, double gain);

  int dim() const override { return inner_->dim(); }
  double dt() const override { return inner_->dt(); }
  int substeps() const override { return inner_->substeps(); }
  SimState initial_state() const override { return inner_->initial_state(); }
  Vec goal() const override { return inner_->goal(); }
  SimState step(const SimState& s, const Vec& u) const override;
  Vec external_force(const SimState& s) const override { return inner_->external_force(s); }
  Mat mass_matrix(const Vec& x) const override { return inner_->mass_matrix(x); }
  bool success(const SimState& s) const override { return inner_->success(s); }

 private:
  std::shared_ptr<const Environment> inner_;
  double gain_;
};

struct AuditConfig {
  int convexity_pairs = 50;
  int damping_velocities = 100;
  double sample_radius = 1.0;
  double convexity_tol = 1e-9;
  double grad_origin_tol = 1e-12;
  std::uint64_t seed = 0;
};

struct AuditReport {
  bool convex = true;
  bool psi_zero_at_origin = true;
  bool grad_zero_at_origin = true;
  bool psi_nonnegative = true;
  bool potential_positive = true;
  bool quad_positive = true;
  bool damping_symmetric = true;
  bool damping_positive_definite = true;
  bool passed() const;
};

/// Checks the stability hypotheses (S > 0, Psi convex with Psi(0) = 0 and
/// grad Psi(0) = 0, D(xdot) symmetric positive definite) on one parameter
/// vector by sampling.
AuditReport audit_preconditions(const FlatParamVector& flat, const AuditConfig& cfg = {});

nlohmann::json to_json(const LyapunovReport& r, bool include_series = false);
nlohmann::json to_json(const AuditReport& r);

}  // namespace esrl
